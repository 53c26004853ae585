#pragma once

#include "lsc/rational.hpp"
#include "lsc/scheme.hpp"

#include <string>
#include <vector>

namespace lsc {

enum class Regime { SmallKc, Main, LargeKc };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::SmallKc: return "small-Kc";
        case Regime::Main: return "main";
        case Regime::LargeKc: return "large-Kc";
    }
    return "?";
}

/// Cost-regime split. Boundaries go to the simpler composite: Kc == K/N
/// is served as independent single-demand schemes, Kc == (K/N)(Nr-m+1) as
/// one cut-set-rate construction.
inline Regime classify_regime(const ProblemParams& p) {
    if (p.Kc >= p.large_regime_threshold()) return Regime::LargeKc;
    if (p.Kc <= p.K / p.N) return Regime::SmallKc;
    return Regime::Main;
}

/**
 * A complete computing scheme for one parameter point.
 *
 * - main: one single-shot construction on the (possibly padded) demand.
 * - small-Kc: Kc independent single-demand constructions over N merged
 *   messages; merge_coeffs[i] maps the K raw messages onto the i-th
 *   sub-scheme's N merged messages.
 * - large-Kc: one construction per P-subset of demand rows, each run on a
 *   mix of the B message slices; mix[s] holds sub-problem s's mixing
 *   coefficients (a Vandermonde row, so each demand row can solve for its
 *   B slice results from the B sub-problems containing it).
 */
struct Scheme {
    Scheme(ProblemParams p, FieldMatrix demand, Regime r, std::uint64_t s)
        : params(p), F(std::move(demand)), regime(r), seed(s) {}

    ProblemParams params; // original request (Kc unpadded)
    FieldMatrix F;        // Kc x K demand
    Regime regime = Regime::Main;
    std::uint64_t seed = 0;
    int padding_rows = 0;

    std::vector<CoreScheme> cores;

    // small-Kc bookkeeping
    std::vector<FieldMatrix> merge_coeffs; // per demand row: N x K

    // large-Kc bookkeeping
    int B = 1;                               // slices per demanded combination
    std::vector<std::vector<int>> subsets;   // P-subsets of demand rows (1-based)
    std::vector<std::vector<FieldElement>> mix; // per subset: B mixing coefficients
    std::vector<FieldElement> mix_nodes;     // per subset: its Vandermonde node

    bool decodability_sampled() const {
        for (const auto& c : cores)
            if (c.decodability_sampled) return true;
        return false;
    }

    /// L must be a multiple of this for exact encode/decode.
    int required_L_divisor() const {
        switch (regime) {
            case Regime::Main: return cores.empty() ? params.splits() : cores[0].params.splits();
            case Regime::SmallKc: return params.m;
            case Regime::LargeKc: return B * params.Nr;
        }
        return 1;
    }
};

namespace detail {

constexpr std::uint64_t kTagSubScheme = 0x21;
constexpr std::uint64_t kTagMergeScale = 0x22;
constexpr std::uint64_t kTagLargeSub = 0x23;

} // namespace detail

/// Middle regime: (K/N)(u-1) < Kc <= (K/N)u with u <= Nr-m+1.
inline Scheme build_scheme(const FieldMatrix& F, const ProblemParams& params, std::uint64_t seed,
                           const BuildOptions& opts = {}) {
    Scheme scheme{params, F, Regime::Main, seed};
    scheme.padding_rows = params.Kc_padded() - params.Kc;
    scheme.cores.push_back(build_core_scheme(F, params, seed, opts));
    return scheme;
}

/**
 * Small-Kc regime (Kc <= K/N): one single-demand (N, N, Nr, 1, m)
 * construction per demanded combination. Datasets sharing the same cyclic
 * worker window (k = k' mod N) are merged into one message, with the
 * demand coefficients folded into the merge; the sub-scheme demands a
 * random nonzero combination of the merged messages, whose inverse weight
 * is absorbed on the merge side so the recovered row is exactly F_i W.
 */
inline Scheme build_scheme_small_kc(const FieldMatrix& F, const ProblemParams& params,
                                    std::uint64_t seed, const BuildOptions& opts = {}) {
    if (params.Kc > params.K / params.N)
        throw InfeasibleRegime("small-Kc composite requires Kc <= K/N");
    PrimeField f(params.q);
    Scheme scheme{params, F, Regime::SmallKc, seed};

    ProblemParams sub = params;
    sub.K = params.N;
    sub.Kc = 1;
    sub.K_real = -1;
    if (!feasibility_constraint(sub))
        throw InfeasibleRegime("single-demand sub-problem violates the feasibility constraint");

    for (int i = 1; i <= params.Kc; ++i) {
        Rng scale_rng = Rng::derive(seed, {detail::kTagMergeScale, static_cast<std::uint64_t>(i)});
        std::vector<FieldElement> g(static_cast<std::size_t>(params.N));
        for (auto& x : g) x = scale_rng.nonzero_field_element(f);

        FieldMatrix demand(1, static_cast<std::size_t>(params.N), f);
        for (int r = 1; r <= params.N; ++r)
            demand.at(0, static_cast<std::size_t>(r - 1)) = g[static_cast<std::size_t>(r - 1)];

        FieldMatrix coeffs(static_cast<std::size_t>(params.N), static_cast<std::size_t>(params.K),
                           f);
        for (int k = 1; k <= params.K; ++k) {
            const int r = mod1(k, params.N);
            coeffs.at(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(k - 1)) =
                f.mul(f.inv(g[static_cast<std::size_t>(r - 1)]),
                      F.at(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(k - 1)));
        }

        scheme.cores.push_back(build_core_scheme(
            demand, sub, Rng::derive(seed, {detail::kTagSubScheme, static_cast<std::uint64_t>(i)}).next_u64(),
            opts));
        scheme.merge_coeffs.push_back(std::move(coeffs));
    }
    return scheme;
}

/**
 * Large-Kc regime (Kc >= P := (K/N)(Nr-m+1)), cost exactly Kc.
 *
 * Kc == P is a single v = 0 construction. Beyond it, each demanded
 * combination is cut into B = C(Kc-1, P-1) contiguous slices and one
 * sub-problem runs per P-subset of demand rows, over a Vandermonde mix of
 * the B message slices; a demand row appears in exactly B sub-problems
 * with pairwise distinct mix nodes, so the master inverts a B x B
 * Vandermonde system per row to read off its slices.
 */
inline Scheme build_scheme_large_kc(const FieldMatrix& F, const ProblemParams& params,
                                    std::uint64_t seed, const BuildOptions& opts = {}) {
    const int P = params.large_regime_threshold();
    if (params.Kc < P) throw InfeasibleRegime("large-Kc composite requires Kc >= (K/N)(Nr-m+1)");
    PrimeField f(params.q);
    Scheme scheme{params, F, Regime::LargeKc, seed};

    ProblemParams sub = params;
    sub.Kc = P;

    if (params.Kc == P) {
        scheme.B = 1;
        std::vector<int> all_rows(static_cast<std::size_t>(P));
        for (int i = 0; i < P; ++i) all_rows[static_cast<std::size_t>(i)] = i + 1;
        scheme.subsets.push_back(all_rows);
        scheme.mix.push_back({1});
        scheme.mix_nodes.push_back(0);
        scheme.cores.push_back(build_core_scheme(F, sub, seed, opts));
        return scheme;
    }

    const BigInt n_subsets = binomial(params.Kc, P);
    if (n_subsets > opts.large_kc_cap)
        throw BinomialTooLarge("C(Kc, P) = " + n_subsets.str() + " sub-problems exceeds cap " +
                               std::to_string(opts.large_kc_cap));
    const BigInt slices = binomial(params.Kc - 1, P - 1);
    scheme.B = slices.convert_to<int>();

    std::size_t idx = 0;
    for (const auto& subset : detail::all_subsets(params.Kc, P)) {
        std::vector<std::size_t> rows;
        rows.reserve(subset.size());
        for (int r : subset) rows.push_back(static_cast<std::size_t>(r - 1));
        FieldMatrix demand = F.select_rows(rows);

        // Vandermonde node x = subset index; nodes are pairwise distinct so
        // any B of these rows form an invertible system.
        std::vector<FieldElement> lambda(static_cast<std::size_t>(scheme.B));
        const FieldElement x = f.reduce(static_cast<std::uint64_t>(idx));
        FieldElement p = 1;
        for (int b = 0; b < scheme.B; ++b) {
            lambda[static_cast<std::size_t>(b)] = p;
            p = f.mul(p, x);
        }

        scheme.subsets.push_back(subset);
        scheme.mix.push_back(std::move(lambda));
        scheme.mix_nodes.push_back(x);
        scheme.cores.push_back(build_core_scheme(
            demand, sub,
            Rng::derive(seed, {detail::kTagLargeSub, static_cast<std::uint64_t>(idx)}).next_u64(),
            opts));
        ++idx;
    }
    return scheme;
}

/// Routes to the builder for the parameter point's cost regime.
inline Scheme synthesize_scheme(const FieldMatrix& F, const ProblemParams& params,
                                std::uint64_t seed, const BuildOptions& opts = {}) {
    switch (classify_regime(params)) {
        case Regime::SmallKc: return build_scheme_small_kc(F, params, seed, opts);
        case Regime::LargeKc: return build_scheme_large_kc(F, params, seed, opts);
        case Regime::Main: return build_scheme(F, params, seed, opts);
    }
    throw std::logic_error("unreachable");
}

/// Re-checks the built scheme's two structural guarantees on demand.
struct SchemeVerification {
    bool transmit_ok = true;
    bool decodable = true;
    bool sampled = false;
};

inline SchemeVerification verify_scheme(const Scheme& scheme, const BuildOptions& opts = {}) {
    SchemeVerification v;
    for (const auto& core : scheme.cores) {
        if (!transmit_constraints_hold(core)) v.transmit_ok = false;
        DecodabilityResult dec =
            check_decodability(core.trans, core.params.N, core.params.Nr, opts, scheme.seed);
        if (!dec.ok) v.decodable = false;
        if (dec.sampled) v.sampled = true;
    }
    return v;
}

} // namespace lsc
