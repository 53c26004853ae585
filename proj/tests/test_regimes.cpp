#include "lsc/lsc.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lsc;

namespace {

ProblemParams params_of(int K, int N, int Nr, int Kc, int m, int L = 0) {
    ProblemParams p;
    p.K = K;
    p.N = N;
    p.Nr = Nr;
    p.Kc = Kc;
    p.m = m;
    p.L = L;
    return p;
}

} // namespace

TEST_CASE("regime classification", "[regimes]") {
    CHECK(classify_regime(params_of(20, 10, 7, 2, 2)) == Regime::SmallKc);
    CHECK(classify_regime(params_of(20, 10, 7, 3, 2)) == Regime::Main);
    CHECK(classify_regime(params_of(20, 10, 7, 11, 2)) == Regime::Main);
    CHECK(classify_regime(params_of(20, 10, 7, 12, 2)) == Regime::LargeKc);
    CHECK(classify_regime(params_of(6, 6, 5, 1, 2)) == Regime::SmallKc);
    CHECK(classify_regime(params_of(6, 6, 5, 2, 2)) == Regime::Main);
    CHECK(classify_regime(params_of(6, 6, 5, 4, 2)) == Regime::LargeKc);
}

TEST_CASE("datasets congruent mod N share a worker window", "[regimes]") {
    auto p = params_of(20, 10, 7, 2, 2);
    Assignment a = cyclic_assignment(p);
    for (int k = 1; k <= 10; ++k) CHECK(a.H[static_cast<std::size_t>(k - 1)] ==
                                        a.H[static_cast<std::size_t>(k + 10 - 1)]);
}

TEST_CASE("small-Kc composite builds and verifies", "[regimes]") {
    auto p = params_of(20, 10, 7, 2, 2, 2);
    Rng rng(17);
    FieldMatrix F = random_demand(p, rng);
    Scheme scheme = build_scheme_small_kc(F, p, 99);

    CHECK(scheme.regime == Regime::SmallKc);
    REQUIRE(scheme.cores.size() == 2);
    REQUIRE(scheme.merge_coeffs.size() == 2);
    for (const auto& core : scheme.cores) {
        CHECK(core.params.K == 10); // merged message space
        CHECK(core.params.Kc == 1);
        CHECK(transmit_constraints_hold(core));
        CHECK(check_decodability(core.trans, core.params.N, core.params.Nr, {}, 99).ok);
    }

    SECTION("merge coefficients land only on the owning group") {
        const PrimeField f(p.q);
        for (int i = 0; i < 2; ++i) {
            const auto& C = scheme.merge_coeffs[static_cast<std::size_t>(i)];
            REQUIRE(C.rows() == 10);
            REQUIRE(C.cols() == 20);
            for (int r = 1; r <= 10; ++r)
                for (int k = 1; k <= 20; ++k) {
                    if (mod1(k, 10) != r)
                        CHECK(C.at(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(k - 1)) == 0);
                }
        }
    }

    SECTION("rejected above K/N") {
        auto bad = params_of(20, 10, 7, 3, 2, 2);
        CHECK_THROWS_AS(build_scheme_small_kc(F, bad, 1), InfeasibleRegime);
    }
}

TEST_CASE("large-Kc composite at the threshold is a single core", "[regimes]") {
    auto p = params_of(6, 6, 5, 4, 2, 5); // P = Nr-m+1 = 4
    Rng rng(23);
    FieldMatrix F = random_demand(p, rng);
    Scheme scheme = build_scheme_large_kc(F, p, 7);
    CHECK(scheme.regime == Regime::LargeKc);
    CHECK(scheme.B == 1);
    REQUIRE(scheme.cores.size() == 1);
    CHECK(scheme.cores[0].params.Kc == 4);
    CHECK(transmit_constraints_hold(scheme.cores[0]));
}

TEST_CASE("large-Kc composite above the threshold", "[regimes]") {
    // (6,6,5,5,2): P = 4, C(5,4) = 5 sub-problems, B = C(4,3) = 4 slices.
    auto p = params_of(6, 6, 5, 5, 2, 20);
    Rng rng(29);
    FieldMatrix F = random_demand(p, rng);
    Scheme scheme = build_scheme_large_kc(F, p, 13);

    CHECK(scheme.B == 4);
    REQUIRE(scheme.cores.size() == 5);
    REQUIRE(scheme.subsets.size() == 5);
    for (const auto& subset : scheme.subsets) CHECK(subset.size() == 4);

    // Every demand row is covered by exactly B sub-problems with pairwise
    // distinct mixing nodes.
    for (int row = 1; row <= 5; ++row) {
        std::vector<FieldElement> nodes;
        for (std::size_t s = 0; s < scheme.subsets.size(); ++s)
            for (int r : scheme.subsets[s])
                if (r == row) nodes.push_back(scheme.mix_nodes[s]);
        REQUIRE(nodes.size() == 4);
        std::sort(nodes.begin(), nodes.end());
        CHECK(std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end());
    }

    for (const auto& core : scheme.cores) {
        CHECK(core.params.Kc == 4);
        CHECK(core.effective.v == 0);
        CHECK(transmit_constraints_hold(core));
    }

    SECTION("composite cost identity") {
        // C(Kc, P) * P / C(Kc-1, P-1) == Kc, the accounting the composite
        // realizes, here and at a few harder points.
        for (auto [Kc, P] : {std::pair{5, 4}, {8, 4}, {12, 7}, {20, 12}}) {
            Rational lhs = Rational(binomial(Kc, P) * P, binomial(Kc - 1, P - 1));
            CHECK(lhs == make_rational(Kc));
        }
    }
}

TEST_CASE("large-Kc composite respects the sub-problem cap", "[regimes]") {
    auto p = params_of(20, 10, 7, 20, 2, 0); // C(20,12) = 125970 sub-problems
    Rng rng(31);
    FieldMatrix F = random_demand(p, rng);
    CHECK_THROWS_AS(build_scheme_large_kc(F, p, 1), BinomialTooLarge);
}

TEST_CASE("dispatcher picks the regime builder", "[regimes]") {
    Rng rng(37);
    {
        auto p = params_of(6, 6, 5, 2, 2, 3);
        FieldMatrix F = random_demand(p, rng);
        CHECK(synthesize_scheme(F, p, 3).regime == Regime::Main);
    }
    {
        auto p = params_of(12, 6, 5, 1, 2, 2);
        FieldMatrix F = random_demand(p, rng);
        CHECK(synthesize_scheme(F, p, 3).regime == Regime::SmallKc);
    }
    {
        auto p = params_of(6, 6, 5, 4, 2, 5);
        FieldMatrix F = random_demand(p, rng);
        CHECK(synthesize_scheme(F, p, 3).regime == Regime::LargeKc);
    }
}

TEST_CASE("verify_scheme flags all cores", "[regimes]") {
    auto p = params_of(6, 6, 5, 2, 2, 3);
    Rng rng(41);
    FieldMatrix F = random_demand(p, rng);
    Scheme scheme = build_scheme(F, p, 5);
    SchemeVerification v = verify_scheme(scheme);
    CHECK(v.transmit_ok);
    CHECK(v.decodable);
    CHECK_FALSE(v.sampled);
}

TEST_CASE("composite builders are deterministic in the seed", "[regimes]") {
    Rng rng(47);
    {
        auto p = params_of(12, 6, 5, 2, 2, 2);
        FieldMatrix F = random_demand(p, rng);
        CHECK(scheme_json(build_scheme_small_kc(F, p, 8)) ==
              scheme_json(build_scheme_small_kc(F, p, 8)));
    }
    {
        auto p = params_of(6, 6, 5, 5, 2, 20);
        FieldMatrix F = random_demand(p, rng);
        CHECK(scheme_json(build_scheme_large_kc(F, p, 8)) ==
              scheme_json(build_scheme_large_kc(F, p, 8)));
    }
}

TEST_CASE("scheme serializes with dense matrices as decimal strings", "[regimes][json]") {
    auto p = params_of(6, 6, 5, 2, 2, 3);
    Rng rng(43);
    FieldMatrix F = random_demand(p, rng);
    Scheme scheme = build_scheme(F, p, 5);
    json j = scheme_json(scheme);
    CHECK(j["regime"] == "main");
    CHECK(j["seed"] == 5);
    CHECK(j["params"]["K"] == 6);
    REQUIRE(j["cores"].size() == 1);
    CHECK(j["cores"][0]["Fprime"].size() == 10);
    CHECK(j["cores"][0]["Fprime"][0].size() == 18);
    CHECK(j["cores"][0]["S"].size() == 12);
    CHECK(j["F"][0][0].is_string());
}
