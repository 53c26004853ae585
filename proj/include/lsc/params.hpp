#pragma once

#include "lsc/field.hpp"

#include <stdexcept>
#include <string>

namespace lsc {

class MustPadFirst : public std::invalid_argument {
public:
    MustPadFirst(int K, int N)
        : std::invalid_argument("N=" + std::to_string(N) + " does not divide K=" +
                                std::to_string(K) + "; pad virtual datasets first") {}
};

class InfeasibleRegime : public std::runtime_error {
public:
    explicit InfeasibleRegime(const std::string& what) : std::runtime_error(what) {}
};

/// Mod(b, a) with values in {1, ..., a}: Mod(b, a) = a when a divides b.
/// Matches the 1-based index convention used throughout the construction.
inline int mod1(long long b, int a) {
    long long r = ((b - 1) % a + a) % a;
    return static_cast<int>(r) + 1;
}

inline int padded_dataset_count(int K, int N) { return ((K + N - 1) / N) * N; }

/**
 * System parameters of a (K, N, Nr, Kc, m) run.
 *
 * K datasets, N workers, answers awaited from any Nr of them, Kc demanded
 * linear combinations, computation-cost factor m. K_real tracks how many
 * datasets are real when K was padded up to a multiple of N; the padded
 * tail carries all-zero messages.
 */
struct ProblemParams {
    int K = 0;
    int N = 0;
    int Nr = 0;
    int Kc = 0;
    int m = 0;
    std::uint64_t q = PrimeField::kDefaultModulus;
    int L = 0;
    int K_real = -1; // -1 means "all K datasets are real"

    int real_datasets() const { return K_real < 0 ? K : K_real; }

    /// Datasets assigned per worker: (K/N)(N - Nr + m).
    int M() const { return (K / N) * (N - Nr + m); }

    /// Demand multiplicity u = ceil(Kc * N / K).
    int u() const { return static_cast<int>((static_cast<long long>(Kc) * N + K - 1) / K); }

    /// Padded demand count Kc' = (K/N) * u.
    int Kc_padded() const { return (K / N) * u(); }

    /// Virtual demand rows v = Kc' * (Nr - m - u + 1); meaningful when
    /// u <= Nr - m + 1 (the regime the single-shot construction covers).
    int v() const { return Kc_padded() * (Nr - m - u() + 1); }

    /// Sub-messages per message in the single-shot construction.
    int splits() const { return m + u() - 1; }

    /// Threshold (K/N)(Nr - m + 1): demanded counts at or above it are
    /// served at the cut-set cost.
    int large_regime_threshold() const { return (K / N) * (Nr - m + 1); }

    bool divides_evenly() const { return K % N == 0; }

    ProblemParams with_padded_datasets() const {
        ProblemParams p = *this;
        p.K_real = real_datasets();
        p.K = padded_dataset_count(K, N);
        return p;
    }

    /// Throws on any violated structural constraint. Call once at the edge
    /// (CLI / experiment entry); library code assumes validated params.
    void validate() const {
        if (N < 1 || K < 1) throw std::invalid_argument("K and N must be positive");
        if (!(1 <= m && m <= Nr && Nr <= N))
            throw std::invalid_argument("need 1 <= m <= Nr <= N");
        if (!(1 <= Kc && Kc <= K)) throw std::invalid_argument("need 1 <= Kc <= K");
        if (!divides_evenly()) throw MustPadFirst(K, N);
        if (K_real >= 0 && K_real > K) throw std::invalid_argument("K_real exceeds K");
        PrimeField check(q); // validates primality
        if (L < 0) throw std::invalid_argument("L must be nonnegative");
    }
};

} // namespace lsc
