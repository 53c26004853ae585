#pragma once

#include "lsc/field.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lsc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic stream keyed by (seed, tag words). Distinct keys give
/// independent streams, so construction sub-steps can draw their randomness
/// without ordering dependencies between each other.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
        std::uint64_t state = seed;
        std::uint64_t mixed = detail::splitmix64(state);
        for (std::uint64_t t : tags) {
            state ^= t;
            mixed ^= detail::splitmix64(state);
        }
        return Rng(mixed);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased draw in [0, bound) via rejection; bit-stable across platforms
    /// (mt19937_64 itself is fully specified by the standard).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    FieldElement field_element(const PrimeField& f) { return below(f.modulus()); }

    FieldElement nonzero_field_element(const PrimeField& f) { return 1 + below(f.modulus() - 1); }

private:
    std::mt19937_64 engine_;
};

} // namespace lsc
