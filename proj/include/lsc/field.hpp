#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsc {

class DivisionByZero : public std::domain_error {
public:
    DivisionByZero() : std::domain_error("inversion of zero in prime field") {}
};

/// Element values are plain integers in [0, q); all reduction is done by
/// the owning PrimeField context.
using FieldElement = std::uint64_t;

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/**
 * Arithmetic context for the prime field F_q.
 *
 * q is restricted to < 2^32 so that products of reduced operands fit in
 * 64 bits without a wide-multiply. The default modulus is the Mersenne
 * prime 2^31 - 1.
 */
class PrimeField {
public:
    static constexpr std::uint64_t kDefaultModulus = 2147483647ULL;

    explicit PrimeField(std::uint64_t q = kDefaultModulus) : q_(q) {
        if (q >= (1ULL << 32))
            throw std::invalid_argument("modulus must be < 2^32");
        if (!is_prime(q))
            throw std::invalid_argument("modulus " + std::to_string(q) + " is not prime");
    }

    std::uint64_t modulus() const { return q_; }

    FieldElement reduce(std::uint64_t x) const { return x % q_; }

    /// Maps a signed integer into [0, q).
    FieldElement from_int(std::int64_t x) const {
        std::int64_t r = x % static_cast<std::int64_t>(q_);
        if (r < 0) r += static_cast<std::int64_t>(q_);
        return static_cast<FieldElement>(r);
    }

    FieldElement add(FieldElement a, FieldElement b) const {
        FieldElement s = a + b;
        return s >= q_ ? s - q_ : s;
    }

    FieldElement sub(FieldElement a, FieldElement b) const {
        return a >= b ? a - b : a + q_ - b;
    }

    FieldElement neg(FieldElement a) const { return a == 0 ? 0 : q_ - a; }

    FieldElement mul(FieldElement a, FieldElement b) const { return (a * b) % q_; }

    FieldElement pow(FieldElement base, std::uint64_t e) const {
        FieldElement acc = 1;
        base %= q_;
        while (e > 0) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }

    FieldElement inv(FieldElement a) const {
        if (a == 0) throw DivisionByZero();
        // Extended Euclid on (a, q); q prime guarantees gcd 1.
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = static_cast<std::int64_t>(q_), new_r = static_cast<std::int64_t>(a % q_);
        while (new_r != 0) {
            std::int64_t quot = r / new_r;
            std::int64_t tmp = t - quot * new_t;
            t = new_t;
            new_t = tmp;
            tmp = r - quot * new_r;
            r = new_r;
            new_r = tmp;
        }
        return from_int(t);
    }

    FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

    /// p/r rationals (the convention used for human-readable constants)
    /// mapped into F_q via modular inverse.
    FieldElement from_fraction(std::int64_t num, std::int64_t den) const {
        return mul(from_int(num), inv(from_int(den)));
    }

    bool operator==(const PrimeField& other) const { return q_ == other.q_; }
    bool operator!=(const PrimeField& other) const { return q_ != other.q_; }

private:
    std::uint64_t q_;
};

} // namespace lsc
