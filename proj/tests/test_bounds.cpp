#include "lsc/bounds.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lsc;

namespace {

ProblemParams params_of(int K, int N, int Nr, int Kc, int m) {
    ProblemParams p;
    p.K = K;
    p.N = N;
    p.Nr = Nr;
    p.Kc = Kc;
    p.m = m;
    p.L = 0;
    return p;
}

} // namespace

TEST_CASE("achievable cost by regime", "[bounds]") {
    CHECK(achievable_cost(params_of(6, 6, 5, 2, 2)) == make_rational(10, 3));
    CHECK(achievable_cost(params_of(20, 10, 7, 2, 2)) == make_rational(7));
    // Boundary of the cut-set regime: Kc = (K/N)(Nr-m+1) = 12.
    CHECK(achievable_cost(params_of(20, 10, 7, 12, 2)) == make_rational(12));
    CHECK(achievable_cost(params_of(20, 10, 7, 20, 2)) == make_rational(20));

    SECTION("infeasible middle points throw, the bare formula does not") {
        auto p = params_of(20, 10, 7, 5, 2); // u = 3: 4/3 + 9 > 10
        CHECK_FALSE(feasibility_constraint(p));
        CHECK_THROWS_AS(achievable_cost(p), InfeasibleRegime);
        CHECK(achievable_cost_formula(p) == make_rational(21, 2));
    }
}

TEST_CASE("cyclic converse", "[bounds]") {
    CHECK(converse_cyclic(params_of(5, 5, 4, 2, 2)) == make_rational(8, 3));
    CHECK(converse_cyclic(params_of(20, 10, 7, 20, 2)) == make_rational(20));

    SECTION("matches achievable across the tradeoff sweep (K=20, N=10, Nr=8, Kc=8)") {
        for (int m = 1; m <= 8; ++m) {
            auto p = params_of(20, 10, 8, 8, m);
            CHECK(converse_cyclic(p) == achievable_cost_formula(p));
        }
    }
}

TEST_CASE("baseline cost", "[bounds]") {
    CHECK(baseline_cost(params_of(20, 10, 8, 8, 2)) == make_rational(32));
    CHECK(baseline_cost(params_of(12, 6, 5, 1, 2)) == make_rational(5, 2)); // Nr/m

    SECTION("never beats the scheme on the evaluated sweeps") {
        // The m-sweep at (20,10,8,8) and the Kc-sweep at (20,10,7,m=2).
        // (Not a universal law: padding Kc up to (K/N)u can cost more than
        // independent single-demand runs when m is large, e.g. Kc=3, m=4.)
        for (int m = 1; m <= 8; ++m) {
            auto p = params_of(20, 10, 8, 8, m);
            CHECK(baseline_cost(p) >= achievable_cost_formula(p));
        }
        for (int Kc = 1; Kc <= 20; ++Kc) {
            auto p = params_of(20, 10, 7, Kc, 2);
            CHECK(baseline_cost(p) >= achievable_cost_formula(p));
        }
    }
}

TEST_CASE("achievable meets the converse exactly on the coincidence set", "[bounds]") {
    // Equality holds when K = N, or Kc <= K/N, or Kc >= (K/N)(Nr-m+1), or
    // Kc = (K/N)u in the middle regime; strict gap otherwise.
    for (int KoverN : {1, 2, 3}) {
        const int N = 6, K = N * KoverN;
        for (int Nr = 2; Nr <= N; ++Nr)
            for (int m = 1; m <= Nr; ++m)
                for (int Kc = 1; Kc <= K; ++Kc) {
                    auto p = params_of(K, N, Nr, Kc, m);
                    const bool coincide = K == N || Kc <= K / N ||
                                          Kc >= p.large_regime_threshold() ||
                                          (K / N) * p.u() == Kc;
                    const bool equal = achievable_cost_formula(p) == converse_cyclic(p);
                    CHECK(equal == coincide);
                }
    }
}

TEST_CASE("converse dominates the cut-set floor", "[bounds]") {
    for (int Kc = 1; Kc <= 12; ++Kc)
        for (int m = 1; m <= 6; ++m) {
            auto p = params_of(12, 6, 6, Kc, m);
            CHECK(converse_cyclic(p) >= cutset_bound(p));
        }
}

TEST_CASE("optimality verdicts", "[bounds]") {
    SECTION("K = N is cyclic-optimal with the closed form") {
        for (int Kc = 1; Kc <= 6; ++Kc) {
            auto p = params_of(6, 6, 5, Kc, 2);
            CostReport r = optimality_report(p);
            if (Kc >= p.large_regime_threshold()) {
                CHECK(r.verdict == OptimalityVerdict::Exact);
                CHECK(r.R_ach == make_rational(Kc));
            } else {
                CHECK(r.verdict == OptimalityVerdict::CyclicOptimal);
                CHECK(r.R_ach == make_rational(5LL * Kc, 2 + Kc - 1));
            }
            CHECK(r.R_ach == r.R_converse_cyc);
            CHECK(r.ratio == make_rational(1));
        }
    }

    SECTION("small Kc is cyclic-optimal at Nr Kc / m") {
        auto p = params_of(20, 10, 7, 2, 2);
        CostReport r = optimality_report(p);
        CHECK(r.verdict == OptimalityVerdict::CyclicOptimal);
        CHECK(r.R_ach == make_rational(7));
        CHECK(r.R_ach == r.R_converse_cyc);
    }

    SECTION("cut-set regime is exactly optimal") {
        auto p = params_of(20, 10, 7, 15, 2);
        CostReport r = optimality_report(p);
        CHECK(r.verdict == OptimalityVerdict::Exact);
        CHECK(r.R_ach == make_rational(15));
        CHECK(r.R_cutset == make_rational(15));
    }

    SECTION("middle regime is within a factor of two") {
        auto p = params_of(20, 10, 7, 3, 2);
        CostReport r = optimality_report(p);
        CHECK(r.verdict == OptimalityVerdict::OrderTwo);
        CHECK(r.ratio <= 2);
        CHECK(r.ratio >= 1);
    }

    SECTION("infeasible middle points report unknown") {
        auto p = params_of(5, 5, 5, 2, 2);
        CostReport r = optimality_report(p);
        CHECK_FALSE(r.feasible);
        CHECK(r.verdict == OptimalityVerdict::Unknown);
    }
}

TEST_CASE("converse audit on the worked five-worker point", "[bounds][worked]") {
    auto p = params_of(5, 5, 4, 2, 2);
    AuditRecord rec = converse_audit(p, 1);
    REQUIRE(rec.inequalities.size() == 5);

    // Straggler window n=5 pins datasets {2,3} on responders {1,2,3}.
    const auto& last = rec.inequalities[4];
    CHECK(last.stragglers == std::vector<int>{5});
    CHECK(last.datasets == std::vector<int>{2, 3});
    CHECK(last.responding_holders == std::vector<int>{1, 2, 3});
    CHECK(last.rhs_Kc == 2);
    CHECK(last.rank_ok);

    // The five inequalities T-sums >= 2L, window per straggler anchor.
    std::vector<std::vector<int>> expected_windows = {
        {2, 3, 4}, {3, 4, 5}, {1, 4, 5}, {1, 2, 5}, {1, 2, 3}};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(rec.inequalities[i].responding_holders == expected_windows[i]);
        CHECK(rec.inequalities[i].rhs_Kc == 2);
    }

    CHECK(rec.total_T_bound == make_rational(10, 3));
    CHECK(rec.implied_converse == make_rational(8, 3));
    CHECK(rec.matches_formula);
}

TEST_CASE("converse audit agrees with the formula across a grid", "[bounds]") {
    for (int N = 4; N <= 8; ++N)
        for (int Nr = 2; Nr <= N; ++Nr)
            for (int m = 1; m <= Nr; ++m)
                for (int Kc = 1; Kc <= Nr - m + 1; ++Kc) {
                    auto p = params_of(N, N, Nr, Kc, m);
                    AuditRecord rec = converse_audit(p, 9);
                    CHECK(rec.matches_formula);
                    for (const auto& ineq : rec.inequalities) {
                        CHECK(static_cast<int>(ineq.responding_holders.size()) == p.m + p.u() - 1);
                        CHECK(ineq.rank_ok);
                    }
                }
}

TEST_CASE("converse audit covers grouped datasets when K > N", "[bounds]") {
    auto p = params_of(20, 10, 7, 4, 2); // u = 2, datasets come in pairs
    AuditRecord rec = converse_audit(p, 5);
    CHECK(rec.matches_formula);
    for (const auto& ineq : rec.inequalities) {
        CHECK(ineq.datasets.size() == 4); // (K/N) * u
        CHECK(static_cast<int>(ineq.responding_holders.size()) == 3);
        CHECK(ineq.rank_ok);
    }
}

TEST_CASE("audit rejects cut-set-regime points", "[bounds]") {
    CHECK_THROWS_AS(converse_audit(params_of(20, 10, 7, 13, 2), 1), AuditMismatch);
}
