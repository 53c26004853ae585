#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace lsc {

/// Exact rational arithmetic for communication-cost formulas. Costs like
/// 10/3 must round-trip exactly, so nothing here ever touches floating
/// point; doubles are derived only for display.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

/// "10/3" for proper fractions, "7" when the denominator is 1.
inline std::string rational_str(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double rational_double(const Rational& r) { return r.convert_to<double>(); }

inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) return 0;
    BigInt acc = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        acc *= (n - k + i);
        acc /= i;
    }
    return acc;
}

} // namespace lsc
