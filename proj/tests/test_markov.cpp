#include "erglab/markov.hpp"

#include "erglab/builtin.hpp"
#include "erglab/errors.hpp"
#include "erglab/stable.hpp"

#include "doctest.h"
#include "oracle.hpp"

#include <cmath>

using namespace erglab;

namespace {

CylinderSet zero_fiber(const MarkovModel& m) {
    FiberedCylinder c;
    c.fiber = std::vector<int>(m.kappa(), 0);
    return {c};
}

}  // namespace

TEST_CASE("stationary_distribution") {
    std::vector<std::vector<Rational>> sym{{Rational(1, 2), Rational(1, 2)},
                                           {Rational(1, 2), Rational(1, 2)}};
    auto mu = stationary_distribution(sym);
    CHECK(mu[0] == Rational(1, 2));
    CHECK(mu[1] == Rational(1, 2));

    std::vector<std::vector<Rational>> biased{
        {Rational(9, 10), Rational(1, 10)}, {Rational(1, 5), Rational(4, 5)}};
    auto mu2 = stationary_distribution(biased);
    CHECK(mu2[0] == Rational(2, 3));
    CHECK(mu2[1] == Rational(1, 3));

    std::vector<std::vector<Rational>> id{{Rational(1), Rational(0)},
                                          {Rational(0), Rational(1)}};
    CHECK_THROWS_AS(stationary_distribution(id), StructuralError);
}

TEST_CASE("model validation") {
    // uncentered cocycle rejected
    std::vector<std::vector<Branch>> drift(1);
    drift[0] = {Branch{0, Rational(1, 2), {1}}, Branch{0, Rational(1, 2), {1}}};
    CHECK_THROWS_AS(MarkovModel(1, 1, drift, Backend::Float), StructuralError);

    // periodic base rejected
    std::vector<std::vector<Branch>> twocycle(2);
    twocycle[0] = {Branch{1, Rational(1), {}}};
    twocycle[1] = {Branch{0, Rational(1), {}}};
    CHECK_THROWS_AS(MarkovModel(2, 0, twocycle, Backend::Float),
                    StructuralError);
}

TEST_CASE("cylinder_measure") {
    auto lazy = builtin_model("lazy-walk", Backend::Exact);
    CHECK(cylinder_measure_exact(lazy, {0, {0, 0}, {}}) == Rational(1));

    auto uni = builtin_model("uniform-2state", Backend::Exact);
    CHECK(cylinder_measure_exact(uni, {0, {0, 1}, {}}) == Rational(1, 4));
    // same value at any position
    CHECK(cylinder_measure_exact(uni, {-3, {0, 1}, {}}) == Rational(1, 4));

    auto biased = builtin_model("biased-2state", Backend::Exact);
    CHECK(cylinder_measure_exact(biased, {0, {0, 1, 0}, {}}) ==
          Rational(2, 3) * Rational(1, 10) * Rational(1, 5));

    CHECK_THROWS_AS(cylinder_measure_exact(uni, {0, {0, 7}, {}}),
                    std::domain_error);
    CHECK_THROWS_AS(cylinder_measure_exact(uni, {0, {}, {}}),
                    std::domain_error);
}

TEST_CASE("step_distribution matches the one-step law and conserves mass") {
    auto lazy = builtin_model("lazy-walk", Backend::Exact);
    LatticeDistributionExact start;
    start.kappa = 1;
    start.support[{0, {0}}] = Rational(1);

    auto one = step_distribution_exact(lazy, start, 1);
    CHECK(one.support.at({0, {-1}}) == Rational(1, 4));
    CHECK(one.support.at({0, {0}}) == Rational(1, 2));
    CHECK(one.support.at({0, {1}}) == Rational(1, 4));

    auto two = step_distribution_exact(lazy, start, 2);
    CHECK(two.support.at({0, {0}}) == Rational(3, 8));
    CHECK(two.total_mass() == Rational(1));

    auto zero = step_distribution_exact(lazy, start, 0);
    CHECK(zero.support == start.support);

    // float backend conserves mass to 1e-12 over a long run
    auto lazy_f = builtin_model("lazy-walk", Backend::Float);
    LatticeDistribution fstart;
    fstart.kappa = 1;
    fstart.support[{0, {0}}] = 1.0;
    auto out = step_distribution(lazy_f, fstart, 200);
    CHECK(std::abs(out.total_mass() - 1.0) < 1e-12);
}

TEST_CASE("step_distribution equals path enumeration on all builtins") {
    for (const auto& name : builtin_model_names()) {
        auto m = builtin_model(name, Backend::Exact);
        int n = m.kappa() == 2 ? 4 : 5;
        auto law = oracle::walk_law(m, 0, std::vector<int>(m.kappa(), 0), n);
        LatticeDistributionExact start;
        start.kappa = m.kappa();
        start.support[{0, std::vector<int>(m.kappa(), 0)}] = Rational(1);
        auto dp = step_distribution_exact(m, start, n);
        for (const auto& [key, mass] : law) {
            INFO(name);
            CHECK(dp.support.at(key) == mass);
        }
        CHECK(dp.support.size() == law.size());
    }
}

TEST_CASE("return_probability") {
    auto lazy = builtin_model("lazy-walk", Backend::Exact);
    CHECK(return_probability_exact(lazy, 0, 1) == Rational(1, 2));
    CHECK(return_probability_exact(lazy, 0, 2) == Rational(3, 8));

    auto uni = builtin_model("uniform-2state", Backend::Exact);
    for (int n = 1; n <= 5; ++n)
        CHECK(return_probability_exact(uni, 0, n) == Rational(1));

    // sub-multiplicativity u_{m+n} >= mu_s u_m u_n
    auto u = return_sequence(lazy, 0, 24);
    double mu0 = lazy.stationary()[0];
    for (int m = 1; m <= 12; ++m)
        for (int n = 1; n + m <= 24; ++n)
            CHECK(u.at(m + n) >= mu0 * u.at(m) * u.at(n) - 1e-15);
}

TEST_CASE("multi_correlation small cases") {
    auto lazy = builtin_model("lazy-walk", Backend::Exact);
    auto zf = zero_fiber(lazy);

    SUBCASE("d=0 returns the set measure") {
        CHECK(multi_correlation_exact(lazy, {zf}, 0, {0}) == Rational(1));
    }
    SUBCASE("lazy walk, d=2, k=2 equals 81-path enumeration") {
        std::vector<CylinderSet> sets{zf, zf, zf};
        std::vector<std::int64_t> r{0, 0, 0};
        auto dp = multi_correlation_exact(lazy, sets, 2, r);
        auto brute = oracle::multi_correlation(lazy, sets, 2, r);
        CHECK(dp == brute);
    }
    SUBCASE("nonlazy walk, d=2, k=2 gives 1/4") {
        auto nl = builtin_model("nonlazy-walk", Backend::Exact);
        auto zfn = zero_fiber(nl);
        std::vector<CylinderSet> sets{zfn, zfn, zfn};
        CHECK(multi_correlation_exact(nl, sets, 2, {0, 0, 0}) ==
              Rational(1, 4));
    }
    SUBCASE("k=0, r=0 returns the intersection measure, symmetric in sets") {
        FiberedCylinder a{0, {0}, std::vector<int>{0}};
        FiberedCylinder b;
        b.fiber = std::vector<int>{0};
        std::vector<CylinderSet> s1{{a}, {b}};
        std::vector<CylinderSet> s2{{b}, {a}};
        auto v1 = multi_correlation_exact(lazy, s1, 0, {0, 0});
        auto v2 = multi_correlation_exact(lazy, s2, 0, {0, 0});
        CHECK(v1 == v2);
        CHECK(v1 == cylinder_measure_exact(lazy, a));
    }
    SUBCASE("full space on an unextended model gives 1") {
        auto uni = builtin_model("uniform-2state", Backend::Exact);
        CylinderSet full{{FiberedCylinder{}}};
        std::vector<CylinderSet> sets{full, full, full};
        CHECK(multi_correlation_exact(uni, sets, 3, {0, 0, 0}) == Rational(1));
    }
}

TEST_CASE("multi_correlation equals path enumeration exhaustively") {
    // every builtin with |S| <= 3, several shapes of queries, n <= 8
    for (const auto& name : builtin_model_names()) {
        auto m = builtin_model(name, Backend::Exact);
        if (m.kappa() == 2 && name == "z2-walk") continue;  // separate case
        auto zf = zero_fiber(m);
        FiberedCylinder word_cyl;
        word_cyl.word = {0};
        word_cyl.fiber = std::vector<int>(m.kappa(), 0);
        for (std::int64_t k : {1, 2, 3}) {
            for (int d : {1, 2}) {
                std::vector<CylinderSet> sets(d + 1, zf);
                sets[0] = {word_cyl};
                std::vector<std::int64_t> r(d + 1, 0);
                r[d] = 1;  // offset one anchor
                INFO(name << " k=" << k << " d=" << d);
                CHECK(multi_correlation_exact(m, sets, k, r) ==
                      oracle::multi_correlation(m, sets, k, r));
            }
        }
    }
    // two-dimensional lattice case, small window
    auto z2 = builtin_model("z2-walk", Backend::Exact);
    auto zf2 = zero_fiber(z2);
    std::vector<CylinderSet> sets{zf2, zf2};
    CHECK(multi_correlation_exact(z2, sets, 2, {0, 0}) ==
          oracle::multi_correlation(z2, sets, 2, {0, 0}));
}

TEST_CASE("multi_correlation with overlapping words and negative shifts") {
    auto uni = builtin_model("cycle-3state", Backend::Exact);
    FiberedCylinder a;
    a.word = {0, 1};
    a.fiber = std::vector<int>{0};
    FiberedCylinder b;
    b.word = {1, 2};
    b.fiber = std::vector<int>{1};
    std::vector<CylinderSet> sets{{a}, {b}};
    for (std::int64_t k : {1, 2}) {
        std::vector<std::int64_t> r{0, -1};
        CHECK(multi_correlation_exact(uni, sets, k, r) ==
              oracle::multi_correlation(uni, sets, k, r));
    }
}

TEST_CASE("recurrence_witness") {
    auto lazy = builtin_model("lazy-walk", Backend::Float);
    auto nl = builtin_model("nonlazy-walk", Backend::Float);
    CHECK(recurrence_witness(lazy, zero_fiber(lazy), 2, 8) == 1);
    CHECK(recurrence_witness(nl, zero_fiber(nl), 2, 8) == 2);

    FiberedCylinder far;
    far.fiber = std::vector<int>{50};
    CHECK(!recurrence_witness(lazy, {far}, 2, 3).has_value());
}

TEST_CASE("admissibility_band") {
    auto lazy = builtin_model("lazy-walk", Backend::Float);
    auto zf = zero_fiber(lazy);

    // d = 1 is the definitional identity: ratio == m(Omega) exactly
    auto rep1 = admissibility_band(lazy, zf, 1, {5, 25});
    CHECK(rep1.band.low == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep1.band.high == doctest::Approx(1.0).epsilon(1e-12));

    auto rep2 = admissibility_band(lazy, zf, 2, {20, 60});
    CHECK(rep2.band.low > 0);
    CHECK(rep2.band.high < 10);
    CHECK(rep2.skipped.empty());

    // parity obstruction reported for the nonlazy walk
    auto nl = builtin_model("nonlazy-walk", Backend::Float);
    auto repn = admissibility_band(nl, zero_fiber(nl), 2, {10, 20});
    CHECK(repn.skipped.size() == 5);  // odd n in [10, 20]
}

TEST_CASE("induced_return_distribution") {
    auto nl = builtin_model("nonlazy-walk", Backend::Float);
    auto law = induced_return_distribution(nl, 12);
    CHECK(law.at(2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(law.at(4) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(law.at(1) == 0.0);

    auto lazy = builtin_model("lazy-walk", Backend::Float);
    auto law2 = induced_return_distribution(lazy, 16);
    CHECK(law2.at(1) == doctest::Approx(0.5).epsilon(1e-14));

    // total mass increases toward 1
    double total = 0, prev = 0;
    for (int n = 1; n <= 16; ++n) {
        total += law2.at(n);
        CHECK(total >= prev);
        prev = total;
    }
    CHECK(total > 0.85);
    CHECK(total < 1.0);

    // against enumeration
    auto brute = oracle::first_return_law(lazy, 8);
    for (int n = 1; n <= 8; ++n)
        CHECK(law2.at(n) ==
              doctest::Approx(to_double(brute[n])).epsilon(1e-13));
}

TEST_CASE("recurrence_classify on the three lattice walks") {
    auto lazy = builtin_model("lazy-walk", Backend::Float);
    auto v1 = recurrence_classify(lazy, 2, 2000);
    CHECK(v1.kind == RecurrenceKind::Recurrent);
    CHECK(v1.boundary_case);

    auto z2 = builtin_model("z2-walk", Backend::Float);
    auto v2 = recurrence_classify(z2, 2, 400);
    CHECK(v2.kind == RecurrenceKind::Dissipative);

    auto v3 = recurrence_classify(z2, 1, 400);
    CHECK(v3.kind == RecurrenceKind::Recurrent);
}

TEST_CASE("rwm_defect: defining set gives zero defect for d=1") {
    auto lazy = builtin_model("lazy-walk", Backend::Float);
    auto zf = zero_fiber(lazy);
    // m([z=0] cap T^-k [z=0]) = u_k exactly, so the defect vanishes
    double defect = rwm_defect(lazy, {zf, zf}, 1, {0, 0}, 64);
    CHECK(defect == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rwm_defect decreases for short cylinders") {
    auto lazy = builtin_model("lazy-walk", Backend::Float);
    FiberedCylinder c;
    c.word = {0, 0};
    c.fiber = std::vector<int>{0};
    CylinderSet set{c};
    double d200 = rwm_defect(lazy, {set, set}, 1, {0, 0}, 200, 2);
    double d400 = rwm_defect(lazy, {set, set}, 1, {0, 0}, 400, 2);
    CHECK(d400 < d200 * 1.1);
    CHECK(d400 < 0.35);
}

TEST_CASE("stable density check") {
    CHECK(stable_density_check(1.0, 1.0) == 0.0);

    // analytic antiderivative: integral over [c,d] = e^{-1/(pi d)} - e^{-1/(pi c)}
    auto exact = [](double c, double d) {
        return std::exp(-1.0 / (M_PI * d)) - std::exp(-1.0 / (M_PI * c));
    };
    for (auto [c, d] : {std::pair{0.5, 2.0}, {0.1, 10.0}, {1e-3, 1e3}}) {
        CHECK(stable_density_check(c, d) ==
              doctest::Approx(exact(c, d)).epsilon(1e-8));
    }

    double full = stable_density_check(1e-6, 1e6);
    CHECK(std::abs(full - 1.0) < 1e-3);

    // monotone in the interval
    CHECK(stable_density_check(1e-4, 1e4) <= full + 1e-12);
    CHECK_THROWS_AS(stable_density_check(-1.0, 1.0), std::domain_error);
}
