#pragma once

#include "lsc/rational.hpp"
#include "lsc/regimes.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lsc {

class IndivisibleL : public std::invalid_argument {
public:
    IndivisibleL(int L, int divisor)
        : std::invalid_argument("L=" + std::to_string(L) + " not divisible by " +
                                std::to_string(divisor)) {}
};

/// The K raw messages as a K x L matrix; padded (virtual) datasets carry
/// all-zero rows so padded and unpadded demands agree on real messages.
struct MessageSet {
    FieldMatrix W;

    /// Contiguous slice t (1-based) of width L/divisor from every message.
    FieldMatrix slice(int t, int divisor) const {
        const std::size_t width = W.cols() / static_cast<std::size_t>(divisor);
        FieldMatrix out(W.rows(), width, W.field());
        const std::size_t off = static_cast<std::size_t>(t - 1) * width;
        for (std::size_t k = 0; k < W.rows(); ++k)
            for (std::size_t c = 0; c < width; ++c) out.at(k, c) = W.at(k, off + c);
        return out;
    }
};

inline MessageSet generate_messages(const ProblemParams& params, std::uint64_t seed,
                                    int divisor_override = -1) {
    const int divisor = divisor_override > 0 ? divisor_override : params.splits();
    if (params.L <= 0 || params.L % divisor != 0) throw IndivisibleL(params.L, divisor);
    PrimeField f(params.q);
    MessageSet msg{FieldMatrix(static_cast<std::size_t>(params.K),
                               static_cast<std::size_t>(params.L), f)};
    Rng rng = Rng::derive(seed, {0x31});
    const int real = params.real_datasets();
    for (int k = 1; k <= params.K; ++k) {
        if (k > real) continue; // virtual dataset: zero message
        for (int c = 0; c < params.L; ++c)
            msg.W.at(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(c)) =
                rng.field_element(f);
    }
    return msg;
}

/// One worker's transmissions, one payload matrix per constituent core
/// (rows = that core's Kc' transmissions, cols = sub-message width).
struct WorkerAnswer {
    int worker = 0;
    std::vector<FieldMatrix> per_core;

    std::size_t symbols() const {
        std::size_t total = 0;
        for (const auto& m : per_core) total += m.rows() * m.cols();
        return total;
    }
};

namespace detail {

/// Stacked sub-message vector [W_{1,1}; ...; W_{K,1}; W_{1,2}; ...] as a
/// (K*splits) x (L/splits) matrix, matching F' column order.
inline FieldMatrix stacked_submessages(const FieldMatrix& W, int splits) {
    const std::size_t K = W.rows();
    const std::size_t width = W.cols() / static_cast<std::size_t>(splits);
    FieldMatrix out(K * static_cast<std::size_t>(splits), width, W.field());
    for (int t = 0; t < splits; ++t)
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t c = 0; c < width; ++c)
                out.at(static_cast<std::size_t>(t) * K + k, c) =
                    W.at(k, static_cast<std::size_t>(t) * width + c);
    return out;
}

/// Worker n's payload for one core: its Kc' rows of S times F' times the
/// stacked sub-messages.
inline FieldMatrix encode_core(int n, const CoreScheme& core, const FieldMatrix& messages) {
    const auto& tm = core.trans;
    std::vector<std::size_t> rows;
    rows.reserve(static_cast<std::size_t>(tm.Kc_prime));
    for (int j = 1; j <= tm.Kc_prime; ++j) rows.push_back(tm.row_of(n, j));
    const FieldMatrix own_rows = tm.S.select_rows(rows);
    const FieldMatrix coeffs = mat_mul(own_rows, core.effective.Fprime);
    return mat_mul(coeffs, stacked_submessages(messages, core.effective.splits));
}

/// Messages as seen by each core of the composite regimes.
inline FieldMatrix core_input_messages(const Scheme& scheme, std::size_t core_idx,
                                       const FieldMatrix& W) {
    switch (scheme.regime) {
        case Regime::Main:
            return W;
        case Regime::SmallKc:
            return mat_mul(scheme.merge_coeffs[core_idx], W); // N merged messages
        case Regime::LargeKc: {
            // Vandermonde mix of the B major slices, K x (L/B).
            const PrimeField& f = W.field();
            const int B = scheme.B;
            const std::size_t width = W.cols() / static_cast<std::size_t>(B);
            FieldMatrix mixed(W.rows(), width, f);
            for (int b = 0; b < B; ++b) {
                const FieldElement lambda = scheme.mix[core_idx][static_cast<std::size_t>(b)];
                if (lambda == 0) continue;
                for (std::size_t k = 0; k < W.rows(); ++k)
                    for (std::size_t c = 0; c < width; ++c)
                        mixed.at(k, c) =
                            f.add(mixed.at(k, c),
                                  f.mul(lambda, W.at(k, static_cast<std::size_t>(b) * width + c)));
            }
            return mixed;
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace detail

inline WorkerAnswer worker_encode(int n, const Scheme& scheme, const MessageSet& messages) {
    WorkerAnswer ans;
    ans.worker = n;
    ans.per_core.reserve(scheme.cores.size());
    for (std::size_t c = 0; c < scheme.cores.size(); ++c) {
        FieldMatrix input = detail::core_input_messages(scheme, c, messages.W);
        ans.per_core.push_back(detail::encode_core(n, scheme.cores[c], input));
    }
    return ans;
}

class SingularStack : public std::runtime_error {
public:
    SingularStack() : std::runtime_error("stacked transmission matrix not invertible") {}
};

/**
 * Decodes the answers of responder set A (|A| = Nr, ascending, matching
 * the order of `answers`) back to the Kc demanded combinations, exactly.
 */
inline FieldMatrix master_decode(const std::vector<int>& A, const std::vector<WorkerAnswer>& answers,
                                 const Scheme& scheme) {
    if (static_cast<int>(A.size()) != scheme.params.Nr)
        throw ShapeError("master_decode: need exactly Nr answers");
    const PrimeField& f = scheme.F.field();
    const int L = scheme.params.L;
    FieldMatrix result(static_cast<std::size_t>(scheme.params.Kc), static_cast<std::size_t>(L), f);

    // Per-row slice results for the large-Kc regime: collected[i] holds the
    // recovered mixed slices of demand row i+1, one per covering subset.
    std::vector<std::vector<std::vector<FieldElement>>> collected;
    std::vector<std::vector<FieldElement>> collected_nodes;
    if (scheme.regime == Regime::LargeKc) {
        collected.resize(static_cast<std::size_t>(scheme.params.Kc));
        collected_nodes.resize(static_cast<std::size_t>(scheme.params.Kc));
    }

    for (std::size_t c = 0; c < scheme.cores.size(); ++c) {
        const CoreScheme& core = scheme.cores[c];
        const auto& tm = core.trans;
        FieldMatrix stacked = tm.stack(A);
        const std::size_t width = answers[0].per_core[c].cols();
        FieldMatrix X(stacked.rows(), width, f);
        for (std::size_t a = 0; a < A.size(); ++a)
            for (int j = 1; j <= tm.Kc_prime; ++j)
                for (std::size_t col = 0; col < width; ++col)
                    X.at(a * static_cast<std::size_t>(tm.Kc_prime) + static_cast<std::size_t>(j - 1),
                         col) = answers[a].per_core[c].at(static_cast<std::size_t>(j - 1), col);

        FieldMatrix inv(0, 0, f);
        try {
            inv = invert(stacked);
        } catch (const SingularSystem&) {
            throw SingularStack();
        }
        const FieldMatrix Y = mat_mul(inv, X); // F' times stacked sub-messages

        switch (scheme.regime) {
            case Regime::Main: {
                // Row (t-1)Kc' + (i-1) of Y is slice t of demanded row i.
                for (int i = 1; i <= scheme.params.Kc; ++i)
                    for (int t = 1; t <= core.effective.splits; ++t)
                        for (std::size_t col = 0; col < width; ++col)
                            result.at(static_cast<std::size_t>(i - 1),
                                      static_cast<std::size_t>(t - 1) * width + col) =
                                Y.at(static_cast<std::size_t>((t - 1) * tm.Kc_prime + (i - 1)), col);
                break;
            }
            case Regime::SmallKc: {
                // Core c serves demand row c+1; its Kc' is 1.
                for (int t = 1; t <= core.effective.splits; ++t)
                    for (std::size_t col = 0; col < width; ++col)
                        result.at(c, static_cast<std::size_t>(t - 1) * width + col) =
                            Y.at(static_cast<std::size_t>(t - 1), col);
                break;
            }
            case Regime::LargeKc: {
                // Reassemble each covered row's mixed slice from the Nr
                // sub-message blocks, then record it for the Vandermonde solve.
                const auto& subset = scheme.subsets[c];
                for (std::size_t r = 0; r < subset.size(); ++r) {
                    std::vector<FieldElement> mixed_slice;
                    mixed_slice.reserve(static_cast<std::size_t>(core.effective.splits) * width);
                    for (int t = 1; t <= core.effective.splits; ++t)
                        for (std::size_t col = 0; col < width; ++col)
                            mixed_slice.push_back(
                                Y.at(static_cast<std::size_t>((t - 1) * tm.Kc_prime) + r, col));
                    const int row = subset[r];
                    collected[static_cast<std::size_t>(row - 1)].push_back(std::move(mixed_slice));
                    collected_nodes[static_cast<std::size_t>(row - 1)].push_back(
                        scheme.mix_nodes[c]);
                }
                break;
            }
        }
    }

    if (scheme.regime == Regime::LargeKc) {
        const int B = scheme.B;
        const std::size_t slice_len = static_cast<std::size_t>(scheme.params.L / B);
        for (int i = 1; i <= scheme.params.Kc; ++i) {
            auto& rows = collected[static_cast<std::size_t>(i - 1)];
            auto& nodes = collected_nodes[static_cast<std::size_t>(i - 1)];
            if (static_cast<int>(rows.size()) != B)
                throw std::logic_error("master_decode: slice coverage mismatch");
            if (B == 1) {
                for (std::size_t col = 0; col < slice_len; ++col)
                    result.at(static_cast<std::size_t>(i - 1), col) = rows[0][col];
                continue;
            }
            // Vandermonde system V x = collected, V[r][b] = node_r^b.
            FieldMatrix V(static_cast<std::size_t>(B), static_cast<std::size_t>(B), f);
            for (int r = 0; r < B; ++r) {
                FieldElement p = 1;
                for (int b = 0; b < B; ++b) {
                    V.at(static_cast<std::size_t>(r), static_cast<std::size_t>(b)) = p;
                    p = f.mul(p, nodes[static_cast<std::size_t>(r)]);
                }
            }
            const FieldMatrix Vinv = invert(V);
            for (std::size_t col = 0; col < slice_len; ++col) {
                std::vector<FieldElement> rhs(static_cast<std::size_t>(B));
                for (int r = 0; r < B; ++r) rhs[static_cast<std::size_t>(r)] = rows[static_cast<std::size_t>(r)][col];
                const auto slices = mat_vec(Vinv, rhs);
                for (int b = 0; b < B; ++b)
                    result.at(static_cast<std::size_t>(i - 1),
                              static_cast<std::size_t>(b) * slice_len + col) =
                        slices[static_cast<std::size_t>(b)];
            }
        }
    }
    return result;
}

enum class StragglerPolicy { Exhaustive, RandomSubset };

struct SimReport {
    ProblemParams params;
    Regime regime = Regime::Main;
    std::uint64_t seed = 0;
    bool success = false;
    Rational R_measured;
    std::uint64_t subsets_checked = 0;
    std::optional<std::vector<int>> responder_set; // the sampled A (random policy)
    std::optional<std::vector<int>> failing_subset;
    std::string failure;
    std::size_t symbols_per_worker = 0;
    bool decodability_sampled = false; // build-time subset check hit the cap
};

/**
 * Full pipeline on a random demand and random messages: build, encode,
 * decode for every responder set (or one sampled set), and compare against
 * the direct F W oracle symbol for symbol.
 */
inline SimReport run_experiment(const ProblemParams& params, std::uint64_t seed,
                                StragglerPolicy policy, const BuildOptions& opts = {}) {
    ProblemParams p = params.divides_evenly() ? params : params.with_padded_datasets();
    p.validate();

    Rng demand_rng = Rng::derive(seed, {0x41});
    const FieldMatrix F = random_demand(p, demand_rng);
    Scheme scheme = synthesize_scheme(F, p, seed, opts);

    if (p.L <= 0 || p.L % scheme.required_L_divisor() != 0)
        throw IndivisibleL(p.L, scheme.required_L_divisor());
    const MessageSet messages = generate_messages(p, seed, scheme.required_L_divisor());
    const FieldMatrix oracle = mat_mul(F, messages.W);

    std::vector<WorkerAnswer> all_answers;
    all_answers.reserve(static_cast<std::size_t>(p.N));
    for (int n = 1; n <= p.N; ++n) all_answers.push_back(worker_encode(n, scheme, messages));

    SimReport report;
    report.params = p;
    report.regime = scheme.regime;
    report.seed = seed;
    report.symbols_per_worker = all_answers[0].symbols();
    report.decodability_sampled = scheme.decodability_sampled();
    report.success = true;

    // Symmetric transmission: every worker ships the same symbol count, so
    // the max over responder sets is Nr times the per-worker load.
    for (const auto& ans : all_answers)
        if (ans.symbols() != report.symbols_per_worker)
            throw std::logic_error("run_experiment: asymmetric transmission lengths");

    auto check_subset = [&](const std::vector<int>& A) {
        std::vector<WorkerAnswer> answers;
        answers.reserve(A.size());
        for (int n : A) answers.push_back(all_answers[static_cast<std::size_t>(n - 1)]);
        ++report.subsets_checked;
        FieldMatrix decoded(0, 0, F.field());
        try {
            decoded = master_decode(A, answers, scheme);
        } catch (const SingularStack&) {
            report.success = false;
            report.failing_subset = A;
            report.failure = "singular stacked matrix";
            return false;
        }
        if (!(decoded == oracle)) {
            report.success = false;
            report.failing_subset = A;
            report.failure = "decoded output differs from F*W";
            return false;
        }
        return true;
    };

    if (policy == StragglerPolicy::Exhaustive) {
        for (const auto& A : detail::all_subsets(p.N, p.Nr))
            if (!check_subset(A)) break;
    } else {
        Rng subset_rng = Rng::derive(seed, {0x42});
        auto A = detail::random_subset(p.N, p.Nr, subset_rng);
        report.responder_set = A;
        check_subset(A);
    }

    report.R_measured = Rational(BigInt(static_cast<std::uint64_t>(p.Nr) *
                                        report.symbols_per_worker),
                                 BigInt(p.L));
    return report;
}

} // namespace lsc
