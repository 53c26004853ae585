#pragma once

#include "lsc/params.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace lsc {

/**
 * Dataset-to-worker assignment. Z[n-1] lists the datasets held by worker n,
 * H[k-1] lists the workers holding dataset k; both 1-based and sorted.
 * The two views are duals: k in Z_n iff n in H_k.
 */
struct Assignment {
    std::vector<std::vector<int>> Z;
    std::vector<std::vector<int>> H;

    bool worker_holds(int n, int k) const {
        const auto& z = Z[static_cast<std::size_t>(n - 1)];
        return std::binary_search(z.begin(), z.end(), k);
    }

    /// Datasets worker n cannot compute, ascending.
    std::vector<int> missing_datasets(int n, int K) const {
        std::vector<int> out;
        const auto& z = Z[static_cast<std::size_t>(n - 1)];
        out.reserve(static_cast<std::size_t>(K) - z.size());
        for (int k = 1; k <= K; ++k)
            if (!std::binary_search(z.begin(), z.end(), k)) out.push_back(k);
        return out;
    }
};

/**
 * The cyclic assignment: dataset k goes to the window of N - Nr + m
 * consecutive workers ending at Mod(k, N),
 *
 *   H_k = { Mod(k, N), Mod(k-1, N), ..., Mod(k - N + Nr - m + 1, N) },
 *
 * so worker n holds, for every p in [0 : K/N - 1],
 *
 *   { Mod(n, N) + pN, Mod(n+1, N) + pN, ..., Mod(n + N - Nr + m - 1, N) + pN }.
 *
 * Pure function of the parameters; requires N | K.
 */
inline Assignment cyclic_assignment(const ProblemParams& params) {
    if (!params.divides_evenly()) throw MustPadFirst(params.K, params.N);
    const int K = params.K, N = params.N;
    const int window = N - params.Nr + params.m;

    Assignment a;
    a.H.assign(static_cast<std::size_t>(K), {});
    a.Z.assign(static_cast<std::size_t>(N), {});

    for (int k = 1; k <= K; ++k) {
        auto& hk = a.H[static_cast<std::size_t>(k - 1)];
        hk.reserve(static_cast<std::size_t>(window));
        for (int d = 0; d < window; ++d) hk.push_back(mod1(k - d, N));
        std::sort(hk.begin(), hk.end());
    }
    for (int n = 1; n <= N; ++n) {
        auto& zn = a.Z[static_cast<std::size_t>(n - 1)];
        for (int p = 0; p < K / N; ++p)
            for (int d = 0; d < window; ++d) zn.push_back(mod1(n + d, N) + p * N);
        std::sort(zn.begin(), zn.end());
    }
    return a;
}

struct AssignmentReport {
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};

/// Checks the computation-cost cap |Z_n| <= M and Z/H duality. Returns a
/// report rather than throwing so callers can surface every violation.
inline AssignmentReport validate_assignment(const Assignment& a, const ProblemParams& params) {
    AssignmentReport report;
    const int M = params.M();
    if (a.Z.size() != static_cast<std::size_t>(params.N))
        report.violations.push_back("Z has " + std::to_string(a.Z.size()) + " workers, expected " +
                                    std::to_string(params.N));
    if (a.H.size() != static_cast<std::size_t>(params.K))
        report.violations.push_back("H has " + std::to_string(a.H.size()) + " datasets, expected " +
                                    std::to_string(params.K));
    if (!report.violations.empty()) return report;

    for (int n = 1; n <= params.N; ++n) {
        const auto& z = a.Z[static_cast<std::size_t>(n - 1)];
        if (z.size() > static_cast<std::size_t>(M))
            report.violations.push_back("worker " + std::to_string(n) + " holds " +
                                        std::to_string(z.size()) + " datasets, cap is " +
                                        std::to_string(M));
        for (int k : z) {
            if (k < 1 || k > params.K) {
                report.violations.push_back("worker " + std::to_string(n) +
                                            " references dataset " + std::to_string(k));
                continue;
            }
            const auto& h = a.H[static_cast<std::size_t>(k - 1)];
            if (!std::binary_search(h.begin(), h.end(), n))
                report.violations.push_back("duality broken: dataset " + std::to_string(k) +
                                            " in Z_" + std::to_string(n) + " but worker missing from H");
        }
    }
    for (int k = 1; k <= params.K; ++k) {
        for (int n : a.H[static_cast<std::size_t>(k - 1)]) {
            if (n < 1 || n > params.N) {
                report.violations.push_back("dataset " + std::to_string(k) + " references worker " +
                                            std::to_string(n));
                continue;
            }
            if (!a.worker_holds(n, k))
                report.violations.push_back("duality broken: worker " + std::to_string(n) +
                                            " in H_" + std::to_string(k) + " but dataset missing from Z");
        }
    }
    return report;
}

} // namespace lsc
