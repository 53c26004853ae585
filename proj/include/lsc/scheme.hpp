#pragma once

#include "lsc/assignment.hpp"
#include "lsc/matrix.hpp"
#include "lsc/params.hpp"
#include "lsc/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lsc {

class ConstructionFailed : public std::runtime_error {
public:
    explicit ConstructionFailed(const std::string& what) : std::runtime_error(what) {}
};

class BinomialTooLarge : public std::runtime_error {
public:
    explicit BinomialTooLarge(const std::string& what) : std::runtime_error(what) {}
};

inline int compute_u(const ProblemParams& params) { return params.u(); }

/// Constraint under which the single-shot construction is known to work:
///   N >= (m+u-1)/u + u(Nr-m-u+1),
/// evaluated exactly as N*u >= (m+u-1) + u^2*(Nr-m-u+1).
inline bool feasibility_constraint(const ProblemParams& params) {
    const long long u = params.u();
    const long long lhs = static_cast<long long>(params.N) * u;
    const long long rhs = (params.m + u - 1) + u * u * (params.Nr - params.m - u + 1);
    return lhs >= rhs;
}

/// Uniform i.i.d. demand matrix (Kc x K).
inline FieldMatrix random_demand(const ProblemParams& params, Rng& rng) {
    PrimeField f(params.q);
    FieldMatrix F(static_cast<std::size_t>(params.Kc), static_cast<std::size_t>(params.K), f);
    for (std::size_t r = 0; r < F.rows(); ++r)
        for (std::size_t c = 0; c < F.cols(); ++c) F.at(r, c) = rng.field_element(f);
    return F;
}

/// Pads the demand matrix up to Kc' = (K/N)u rows with uniform i.i.d.
/// demand vectors; existing rows are untouched.
inline FieldMatrix pad_demand(const FieldMatrix& F, const ProblemParams& params, Rng& rng) {
    const int target = params.Kc_padded();
    if (static_cast<int>(F.rows()) > target)
        throw ShapeError("pad_demand: demand already exceeds (K/N)u rows");
    const PrimeField& f = F.field();
    FieldMatrix padded(static_cast<std::size_t>(target), F.cols(), f);
    for (std::size_t r = 0; r < F.rows(); ++r)
        for (std::size_t c = 0; c < F.cols(); ++c) padded.at(r, c) = F.at(r, c);
    for (std::size_t r = F.rows(); r < padded.rows(); ++r)
        for (std::size_t c = 0; c < padded.cols(); ++c) padded.at(r, c) = rng.field_element(f);
    return padded;
}

/// Structured demand used for the feasibility reduction when N | K:
/// (K/N)u x K block-diagonal, one dense random u x N block per group.
inline FieldMatrix block_diagonal_demand(const ProblemParams& params, Rng& rng) {
    if (!params.divides_evenly()) throw MustPadFirst(params.K, params.N);
    const int u = params.u(), N = params.N, groups = params.K / params.N;
    PrimeField f(params.q);
    FieldMatrix F(static_cast<std::size_t>(groups * u), static_cast<std::size_t>(params.K), f);
    for (int g = 0; g < groups; ++g)
        for (int r = 0; r < u; ++r)
            for (int c = 0; c < N; ++c)
                F.at(static_cast<std::size_t>(g * u + r), static_cast<std::size_t>(g * N + c)) =
                    rng.field_element(f);
    return F;
}

/**
 * Effective demand matrix F' of shape (Nr*Kc') x (K*(m+u-1)): the top
 * (m+u-1)*Kc' rows hold block-diagonal copies of the padded demand F, the
 * bottom v rows are the virtual demands a_{i,k} filled in by Step 2.
 */
struct EffectiveDemand {
    FieldMatrix Fprime;
    int K = 0;
    int Kc_prime = 0;
    int splits = 0; // m+u-1
    int v = 0;

    int virtual_row_start() const { return splits * Kc_prime; }
    /// Flat column of sub-message (k, t), both 1-based.
    std::size_t col_of(int k, int t) const {
        return static_cast<std::size_t>((t - 1) * K + (k - 1));
    }
    FieldElement& a(int i, std::size_t col) { // virtual row i in [1..v]
        return Fprime.at(static_cast<std::size_t>(virtual_row_start() + i - 1), col);
    }
};

inline EffectiveDemand build_effective_demand(const FieldMatrix& F, const ProblemParams& params) {
    const int Kc_prime = params.Kc_padded();
    if (static_cast<int>(F.rows()) != Kc_prime || static_cast<int>(F.cols()) != params.K)
        throw ShapeError("build_effective_demand: F must be Kc' x K");
    EffectiveDemand e{FieldMatrix(static_cast<std::size_t>(params.Nr) * Kc_prime,
                                  static_cast<std::size_t>(params.K) * params.splits(), F.field()),
                      params.K, Kc_prime, params.splits(), params.v()};
    for (int t = 1; t <= e.splits; ++t)
        for (int i = 0; i < Kc_prime; ++i)
            for (int k = 0; k < e.K; ++k)
                e.Fprime.at(static_cast<std::size_t>((t - 1) * Kc_prime + i),
                            static_cast<std::size_t>((t - 1) * e.K + k)) =
                    F.at(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
    return e;
}

/**
 * Transmission matrix S of shape (N*Kc') x (Nr*Kc'). Row (n, j) is worker
 * n's j-th transmission vector against the rows of F'. Column blocks:
 * S_t = columns [(t-1)Kc', tKc') for t in [m+u-1], then the v-wide striped
 * tail block chosen in Step 1.
 */
struct TransmissionMatrix {
    FieldMatrix S;
    int N = 0;
    int Kc_prime = 0;
    int splits = 0;
    int v = 0;

    std::size_t row_of(int n, int j) const {
        return static_cast<std::size_t>((n - 1) * Kc_prime + (j - 1));
    }
    std::size_t s_col(int t, int i1) const {
        return static_cast<std::size_t>((t - 1) * Kc_prime + (i1 - 1));
    }
    std::size_t b_col(int i3) const {
        return static_cast<std::size_t>(splits * Kc_prime + (i3 - 1));
    }
    /// Stripe width v/Kc' = Nr-m-u+1.
    int stripe_width() const { return Kc_prime == 0 ? 0 : v / Kc_prime; }

    /// Stacked rows of the workers in A (ascending), j-minor order, as used
    /// for both the decodability check and the master's inversion.
    FieldMatrix stack(const std::vector<int>& workers) const {
        std::vector<std::size_t> rows;
        rows.reserve(workers.size() * static_cast<std::size_t>(Kc_prime));
        for (int n : workers)
            for (int j = 1; j <= Kc_prime; ++j) rows.push_back(row_of(n, j));
        return S.select_rows(rows);
    }
};

/// Step 1: the striped tail block. Row (n, j) draws its stripe
/// b^{n,j}_{(j-1)v/Kc'+1 .. j v/Kc'} uniformly i.i.d. and is zero elsewhere.
inline FieldMatrix sample_S_last_block(const ProblemParams& params, Rng& rng) {
    const int Kc_prime = params.Kc_padded();
    const int v = params.v();
    const int w = Kc_prime == 0 ? 0 : v / Kc_prime;
    PrimeField f(params.q);
    FieldMatrix block(static_cast<std::size_t>(params.N) * Kc_prime, static_cast<std::size_t>(v),
                      f);
    for (int n = 1; n <= params.N; ++n)
        for (int j = 1; j <= Kc_prime; ++j)
            for (int s = 0; s < w; ++s)
                block.at(static_cast<std::size_t>((n - 1) * Kc_prime + (j - 1)),
                         static_cast<std::size_t>((j - 1) * w + s)) = rng.field_element(f);
    return block;
}

/**
 * Solution of one Step-2 block: all of worker-block values
 * s^{n,j}_{(t-1)Kc'+i1} plus the virtual-demand entries of stripe j inside
 * column block t.
 */
struct BlockSolution {
    int t = 0;
    int j = 0;
    std::vector<FieldElement> s_vals; // (n-1)*Kc' + (i1-1), n in [N], i1 in [Kc']
    std::vector<FieldElement> a_vals; // r*K + (k-1), r in [0, v/Kc'), k in [K]
};

namespace detail {

/// True when in-block index i1 is one of the free positions
/// (i-1)u + Mod(n, u), i in [K/N], for worker n.
inline bool is_free_position(int i1, int n, int u, int groups) {
    int d = i1 - mod1(n, u);
    return d >= 0 && d % u == 0 && d / u < groups;
}

} // namespace detail

/**
 * Step 2 for a fixed (t, j): assembles the K(Nr-m) linear constraints
 *
 *   sum_i1 f_{i1,k} s^{n,j}_{(t-1)Kc'+i1} + sum_{i3 in stripe j} b^{n,j}_{i3} a_{i3,(t-1)K+k} = 0
 *                                    for all n in [N], k not in Z_n,
 *
 * fixes the K free positions to `free_values` (ordered by worker, then by
 * i in [K/N]), and solves the remaining K(Nr-m) unknowns exactly.
 *
 * Throws SingularSystem when the square system is not invertible; the
 * caller retries with fresh free values.
 */
inline BlockSolution solve_block(int t, int j, const FieldMatrix& F, const Assignment& assign,
                                 const FieldMatrix& S_last, const ProblemParams& params,
                                 const std::vector<FieldElement>& free_values) {
    const PrimeField& f = F.field();
    const int N = params.N, K = params.K, u = params.u();
    const int Kc_prime = params.Kc_padded();
    const int groups = K / N;
    const int w = Kc_prime == 0 ? 0 : params.v() / Kc_prime; // stripe width
    if (static_cast<int>(free_values.size()) != K)
        throw ShapeError("solve_block: expected K free values");

    // Unknown numbering: s-unknowns (n, i1) that are not free positions, in
    // (n, i1) order, then a-unknowns (r, k) in (r, k) order.
    const int n_svars = N * Kc_prime;
    std::vector<int> var_index(static_cast<std::size_t>(n_svars + w * K), -1);
    std::vector<FieldElement> fixed(static_cast<std::size_t>(n_svars), 0);
    std::vector<bool> is_fixed(static_cast<std::size_t>(n_svars), false);

    int n_unknowns = 0;
    for (int n = 1; n <= N; ++n) {
        for (int i1 = 1; i1 <= Kc_prime; ++i1) {
            const int flat = (n - 1) * Kc_prime + (i1 - 1);
            if (detail::is_free_position(i1, n, u, groups)) {
                const int i = (i1 - mod1(n, u)) / u; // 0-based group index
                fixed[static_cast<std::size_t>(flat)] =
                    free_values[static_cast<std::size_t>((n - 1) * groups + i)];
                is_fixed[static_cast<std::size_t>(flat)] = true;
            } else {
                var_index[static_cast<std::size_t>(flat)] = n_unknowns++;
            }
        }
    }
    for (int r = 0; r < w; ++r)
        for (int k = 0; k < K; ++k)
            var_index[static_cast<std::size_t>(n_svars + r * K + k)] = n_unknowns++;

    const int n_constraints = K * (params.Nr - params.m);
    if (n_unknowns != n_constraints)
        throw std::logic_error("solve_block: unknown/constraint count mismatch");

    FieldMatrix A(static_cast<std::size_t>(n_constraints), static_cast<std::size_t>(n_constraints),
                  f);
    std::vector<FieldElement> c(static_cast<std::size_t>(n_constraints), 0);

    int eq = 0;
    for (int n = 1; n <= N; ++n) {
        const std::size_t s_row = static_cast<std::size_t>((n - 1) * Kc_prime + (j - 1));
        for (int k : assign.missing_datasets(n, K)) {
            for (int i1 = 1; i1 <= Kc_prime; ++i1) {
                const FieldElement coeff =
                    F.at(static_cast<std::size_t>(i1 - 1), static_cast<std::size_t>(k - 1));
                if (coeff == 0) continue;
                const int flat = (n - 1) * Kc_prime + (i1 - 1);
                if (is_fixed[static_cast<std::size_t>(flat)]) {
                    c[static_cast<std::size_t>(eq)] =
                        f.sub(c[static_cast<std::size_t>(eq)],
                              f.mul(coeff, fixed[static_cast<std::size_t>(flat)]));
                } else {
                    const int col = var_index[static_cast<std::size_t>(flat)];
                    A.at(static_cast<std::size_t>(eq), static_cast<std::size_t>(col)) = f.add(
                        A.at(static_cast<std::size_t>(eq), static_cast<std::size_t>(col)), coeff);
                }
            }
            for (int r = 0; r < w; ++r) {
                const int i3 = (j - 1) * w + r + 1;
                const FieldElement coeff = S_last.at(s_row, static_cast<std::size_t>(i3 - 1));
                if (coeff == 0) continue;
                const int col = var_index[static_cast<std::size_t>(n_svars + r * K + (k - 1))];
                A.at(static_cast<std::size_t>(eq), static_cast<std::size_t>(col)) = coeff;
            }
            ++eq;
        }
    }

    const std::vector<FieldElement> solved = solve_linear(A, c);

    BlockSolution out;
    out.t = t;
    out.j = j;
    out.s_vals.assign(static_cast<std::size_t>(n_svars), 0);
    out.a_vals.assign(static_cast<std::size_t>(w * K), 0);
    for (int flat = 0; flat < n_svars; ++flat) {
        out.s_vals[static_cast<std::size_t>(flat)] =
            is_fixed[static_cast<std::size_t>(flat)]
                ? fixed[static_cast<std::size_t>(flat)]
                : solved[static_cast<std::size_t>(var_index[static_cast<std::size_t>(flat)])];
    }
    for (int idx = 0; idx < w * K; ++idx)
        out.a_vals[static_cast<std::size_t>(idx)] =
            solved[static_cast<std::size_t>(var_index[static_cast<std::size_t>(n_svars + idx)])];

    // Substitute back: every constraint must vanish exactly.
    for (int n = 1; n <= N; ++n) {
        const std::size_t s_row = static_cast<std::size_t>((n - 1) * Kc_prime + (j - 1));
        for (int k : assign.missing_datasets(n, K)) {
            std::uint64_t acc = 0;
            for (int i1 = 1; i1 <= Kc_prime; ++i1)
                acc = f.add(acc, f.mul(F.at(static_cast<std::size_t>(i1 - 1),
                                            static_cast<std::size_t>(k - 1)),
                                       out.s_vals[static_cast<std::size_t>((n - 1) * Kc_prime +
                                                                           (i1 - 1))]));
            for (int r = 0; r < w; ++r) {
                const int i3 = (j - 1) * w + r + 1;
                acc = f.add(acc, f.mul(S_last.at(s_row, static_cast<std::size_t>(i3 - 1)),
                                       out.a_vals[static_cast<std::size_t>(r * K + (k - 1))]));
            }
            if (acc != 0) throw std::logic_error("solve_block: residual constraint nonzero");
        }
    }
    return out;
}

/// Draws the K free values uniformly i.i.d. and solves the block.
inline BlockSolution solve_block(int t, int j, const FieldMatrix& F, const Assignment& assign,
                                 const FieldMatrix& S_last, const ProblemParams& params, Rng& rng) {
    PrimeField f(params.q);
    std::vector<FieldElement> free_values(static_cast<std::size_t>(params.K));
    for (auto& x : free_values) x = rng.field_element(f);
    return solve_block(t, j, F, assign, S_last, params, free_values);
}

struct BuildOptions {
    int max_retries = 8;
    std::uint64_t subset_cap = 200000; // exhaustive decodability up to this many subsets
    std::uint64_t large_kc_cap = 256;  // cap on C(Kc, P) sub-problems
};

/// One complete single-shot construction. `params.Kc` equals the padded
/// demand count Kc'; the demand matrix stored here includes padding rows.
struct CoreScheme {
    ProblemParams params; // Kc == Kc_padded()
    Assignment assignment;
    FieldMatrix F;        // Kc' x K
    EffectiveDemand effective;
    TransmissionMatrix trans;
    bool decodability_sampled = false;
};

namespace detail {

inline std::vector<std::vector<int>> all_subsets(int N, int size) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        out.push_back(cur);
        int i = size - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == N - size + i + 1) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int l = i + 1; l < size; ++l)
            cur[static_cast<std::size_t>(l)] = cur[static_cast<std::size_t>(l - 1)] + 1;
    }
    return out;
}

inline std::uint64_t subset_count(int N, int size) {
    // Saturating C(N, size); anything that overflows is "too many" anyway.
    std::uint64_t exact = 1;
    for (int i = 1; i <= size; ++i) {
        if (exact > UINT64_MAX / static_cast<std::uint64_t>(N - size + i)) return UINT64_MAX;
        exact = exact * static_cast<std::uint64_t>(N - size + i) / static_cast<std::uint64_t>(i);
    }
    return exact;
}

inline std::vector<int> random_subset(int N, int size, Rng& rng) {
    // Partial Fisher-Yates over [1..N].
    std::vector<int> pool(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
    std::vector<int> out(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        std::size_t pick = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(N - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick]);
        out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

struct DecodabilityResult {
    bool ok = true;
    bool sampled = false;
    std::uint64_t checked = 0;
    std::optional<std::vector<int>> failing_subset;
};

/// Step 3: every Nr-subset of workers must stack to an invertible matrix.
/// Exhaustive while C(N, Nr) fits under the cap, sampled beyond it.
inline DecodabilityResult check_decodability(const TransmissionMatrix& trans, int N, int Nr,
                                             const BuildOptions& opts, std::uint64_t seed) {
    DecodabilityResult res;
    const std::uint64_t total = detail::subset_count(N, Nr);
    if (total <= opts.subset_cap) {
        for (const auto& subset : detail::all_subsets(N, Nr)) {
            ++res.checked;
            if (!is_invertible(trans.stack(subset))) {
                res.ok = false;
                res.failing_subset = subset;
                return res;
            }
        }
    } else {
        res.sampled = true;
        Rng rng = Rng::derive(seed, {0x5u, static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(Nr)});
        for (std::uint64_t i = 0; i < opts.subset_cap; ++i) {
            auto subset = detail::random_subset(N, Nr, rng);
            ++res.checked;
            if (!is_invertible(trans.stack(subset))) {
                res.ok = false;
                res.failing_subset = subset;
                return res;
            }
        }
    }
    return res;
}

/// Exact transmit-constraint audit: s^{n,j} . d_{k+(t-1)K} == 0 for every
/// worker n, transmission j, block t, and dataset k outside Z_n.
inline bool transmit_constraints_hold(const CoreScheme& core) {
    const PrimeField& f = core.F.field();
    const auto& e = core.effective;
    const auto& tm = core.trans;
    for (int n = 1; n <= core.params.N; ++n) {
        const auto missing = core.assignment.missing_datasets(n, core.params.K);
        for (int j = 1; j <= tm.Kc_prime; ++j) {
            const auto s_row = tm.S.row(tm.row_of(n, j));
            for (int t = 1; t <= e.splits; ++t) {
                for (int k : missing) {
                    std::uint64_t acc = 0;
                    const std::size_t col = e.col_of(k, t);
                    for (std::size_t r = 0; r < e.Fprime.rows(); ++r)
                        acc = f.add(acc, f.mul(s_row[r], e.Fprime.at(r, col)));
                    if (acc != 0) return false;
                }
            }
        }
    }
    return true;
}

namespace detail {

// Tag words for derived random streams.
constexpr std::uint64_t kTagDemandPad = 0x11;
constexpr std::uint64_t kTagStepOne = 0x12;
constexpr std::uint64_t kTagSolve = 0x13;

} // namespace detail

/**
 * Steps 1-3 for the regime (K/N)(u-1) < Kc <= (K/N)u with
 * u <= Nr - m + 1: pads the demand to Kc' rows, fixes the striped tail
 * block, solves every (t, j) block, and verifies decodability. Retries
 * singular blocks with fresh free values up to max_retries times, then
 * restarts from Step 1; gives up with ConstructionFailed after
 * max_retries full restarts.
 */
inline CoreScheme build_core_scheme(const FieldMatrix& F, const ProblemParams& params,
                                    std::uint64_t seed, const BuildOptions& opts = {}) {
    if (!feasibility_constraint(params))
        throw InfeasibleRegime("parameters violate N >= (m+u-1)/u + u(Nr-m-u+1)");
    const int u = params.u();
    if (u > params.Nr - params.m + 1)
        throw InfeasibleRegime("Kc above (K/N)(Nr-m+1); use the large-Kc composite");

    ProblemParams core_params = params;
    core_params.Kc = params.Kc_padded();

    Rng pad_rng = Rng::derive(seed, {detail::kTagDemandPad});
    const FieldMatrix F_padded = pad_demand(F, params, pad_rng);
    const Assignment assign = cyclic_assignment(core_params);
    const int Kc_prime = core_params.Kc;
    const int splits = core_params.splits();
    const int v = core_params.v();

    for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
        Rng step1_rng = Rng::derive(seed, {detail::kTagStepOne, static_cast<std::uint64_t>(attempt)});
        const FieldMatrix S_last = sample_S_last_block(core_params, step1_rng);

        EffectiveDemand effective = build_effective_demand(F_padded, core_params);
        TransmissionMatrix trans{FieldMatrix(static_cast<std::size_t>(core_params.N) * Kc_prime,
                                             static_cast<std::size_t>(core_params.Nr) * Kc_prime,
                                             F.field()),
                                 core_params.N, Kc_prime, splits, v};
        for (std::size_t r = 0; r < S_last.rows(); ++r)
            for (std::size_t c = 0; c < S_last.cols(); ++c)
                trans.S.at(r, trans.b_col(static_cast<int>(c) + 1)) = S_last.at(r, c);

        bool blocks_ok = true;
        const int w = Kc_prime == 0 ? 0 : v / Kc_prime;
        for (int t = 1; t <= splits && blocks_ok; ++t) {
            for (int j = 1; j <= Kc_prime && blocks_ok; ++j) {
                bool solved = false;
                for (int retry = 0; retry < opts.max_retries && !solved; ++retry) {
                    Rng block_rng = Rng::derive(
                        seed, {detail::kTagSolve, static_cast<std::uint64_t>(attempt),
                               static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(j),
                               static_cast<std::uint64_t>(retry)});
                    try {
                        BlockSolution sol =
                            solve_block(t, j, F_padded, assign, S_last, core_params, block_rng);
                        for (int n = 1; n <= core_params.N; ++n)
                            for (int i1 = 1; i1 <= Kc_prime; ++i1)
                                trans.S.at(trans.row_of(n, j), trans.s_col(t, i1)) =
                                    sol.s_vals[static_cast<std::size_t>((n - 1) * Kc_prime +
                                                                        (i1 - 1))];
                        for (int r = 0; r < w; ++r)
                            for (int k = 1; k <= core_params.K; ++k)
                                effective.a((j - 1) * w + r + 1, effective.col_of(k, t)) =
                                    sol.a_vals[static_cast<std::size_t>(r * core_params.K +
                                                                        (k - 1))];
                        solved = true;
                    } catch (const SingularSystem&) {
                        // retry with fresh free values
                    }
                }
                if (!solved) blocks_ok = false;
            }
        }
        if (!blocks_ok) continue;

        DecodabilityResult dec = check_decodability(trans, core_params.N, core_params.Nr, opts, seed);
        if (!dec.ok) continue;

        CoreScheme core{core_params, assign, F_padded, std::move(effective), std::move(trans),
                        dec.sampled};
        return core;
    }
    throw ConstructionFailed("single-shot construction failed after max_retries restarts");
}

} // namespace lsc
