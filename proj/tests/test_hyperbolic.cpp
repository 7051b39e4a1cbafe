#include "erglab/fuchsian.hpp"
#include "erglab/hyperbolic.hpp"

#include "erglab/errors.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace erglab;

namespace {

std::mt19937_64 rng(2024);

DiskPoint random_point(double max_r = 0.95) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = max_r * std::sqrt(u(rng));
    double th = 2 * M_PI * u(rng);
    return DiskPoint{std::polar(r, th)};
}

}  // namespace

TEST_CASE("hyperbolic distance") {
    DiskPoint origin{Complex(0, 0)};
    CHECK(hyp_dist(origin, origin) == 0.0);
    CHECK(hyp_dist(origin, DiskPoint{Complex(0.5, 0)}) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-14));
    for (int i = 0; i < 1000; ++i) {
        DiskPoint x = random_point(), y = random_point();
        CHECK(std::abs(hyp_dist(x, y) - hyp_dist(y, x)) < 1e-14);
    }
}

TEST_CASE("mobius maps act by isometries") {
    MobiusMap id = MobiusMap::identity();
    LineElement w{Complex(0.3, 0.2), 1.0};
    auto w2 = id.apply(w);
    CHECK(std::abs(w2.base - w.base) == 0.0);
    CHECK(w2.angle == doctest::Approx(w.angle));

    Complex z(0.4, -0.3);
    MobiusMap t = MobiusMap::translation_to(z);
    CHECK(std::abs(t.apply(Complex(0, 0)) - z) < 1e-15);

    FuchsianGroup schottky = FuchsianGroup::schottky();
    for (int i = 0; i < 1000; ++i) {
        DiskPoint x = random_point(), y = random_point();
        const MobiusMap& g = schottky.letter(i % 4);
        CHECK(std::abs(hyp_dist(g.apply(x), g.apply(y)) - hyp_dist(x, y)) <
              1e-12);
    }
}

TEST_CASE("geodesic flow") {
    LineElement w{Complex(0, 0), 0.7};
    auto still = geodesic_flow(w, 0.0);
    CHECK(std::abs(still.base - w.base) == 0.0);

    double t = 1.3;
    auto moved = geodesic_flow(w, t);
    CHECK(std::abs(moved.base - std::polar(std::tanh(t / 2), 0.7)) < 1e-15);
    CHECK(moved.angle == doctest::Approx(0.7));

    std::uniform_real_distribution<double> tdist(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        DiskPoint x = random_point(0.8);
        LineElement e{x.z, std::uniform_real_distribution<double>(
                               0.0, 2 * M_PI)(rng)};
        double s = tdist(rng), u = tdist(rng);
        auto a = geodesic_flow(e, s + u);
        auto b = geodesic_flow(geodesic_flow(e, u), s);
        CHECK(std::abs(a.base - b.base) < 1e-10);

        // flowed distance equals |t|
        auto f = geodesic_flow(e, s);
        CHECK(std::abs(hyp_dist(DiskPoint{e.base}, DiskPoint{f.base}) -
                       std::abs(s)) < 1e-10);
    }
}

TEST_CASE("flow commutes with isometries and anticommutes with reversal") {
    FuchsianGroup schottky = FuchsianGroup::schottky();
    std::uniform_real_distribution<double> tdist(-4.0, 4.0);
    std::uniform_real_distribution<double> adist(0.0, 2 * M_PI);
    for (int i = 0; i < 1000; ++i) {
        LineElement e{random_point(0.8).z, adist(rng)};
        double t = tdist(rng);
        const MobiusMap& g = schottky.letter(i % 4);
        auto one = g.apply(geodesic_flow(e, t));
        auto two = geodesic_flow(g.apply(e), t);
        CHECK(std::abs(one.base - two.base) < 1e-10);

        auto lhs = geodesic_flow(direction_reverse(e), t);
        auto rhs = direction_reverse(geodesic_flow(e, -t));
        CHECK(std::abs(lhs.base - rhs.base) < 1e-10);
        CHECK(std::abs(std::remainder(lhs.angle - rhs.angle, 2 * M_PI)) <
              1e-10);
    }
}

TEST_CASE("euclidean ball data") {
    auto b0 = ball_euclid(DiskPoint{Complex(0, 0)}, 0.8);
    CHECK(std::abs(b0.center) == 0.0);
    CHECK(b0.radius == doctest::Approx(std::tanh(0.4)).epsilon(1e-15));

    DiskPoint w{Complex(0.9, 0)};
    auto b = ball_euclid(w, 0.1);
    DiskPoint hi{b.center + b.radius};
    DiskPoint lo{b.center - b.radius};
    CHECK(std::abs(hyp_dist(w, hi) - 0.1) < 1e-10);
    CHECK(std::abs(hyp_dist(w, lo) - 0.1) < 1e-10);

    auto tiny = ball_euclid(w, 1e-9);
    CHECK(std::abs(tiny.center - w.z) < 1e-9);
    CHECK(tiny.radius < 1e-8);

    CHECK_THROWS_AS(ball_euclid(DiskPoint{Complex(0.999999, 0)}, 3.0),
                    std::domain_error);
}

TEST_CASE("subtended angle window against dense sampling") {
    DiskPoint w{Complex(0.5, 0)};
    double eta = 0.1;
    double lam = lambda_len(w, eta);
    // count directions whose ray meets the ball
    int hits = 0;
    const int N = 1000000;
    auto ball = ball_euclid(w, eta);
    for (int i = 0; i < N; ++i) {
        double th = 2 * M_PI * (i + 0.5) / N;
        // the ray hits the ball iff the angular distance to the center is
        // below the half width asin(r/|c|)
        Complex dir = std::polar(1.0, th);
        double dist_line = std::abs(std::imag(std::conj(dir) * ball.center));
        bool forward = std::real(std::conj(dir) * ball.center) > 0;
        if (forward && dist_line < ball.radius) ++hits;
    }
    double sampled = 2 * M_PI * static_cast<double>(hits) / N;
    CHECK(std::abs(sampled - lam) < 1e-3);

    CHECK_THROWS_AS(lambda_len(DiskPoint{Complex(0.01, 0)}, 0.5),
                    std::domain_error);
}

TEST_CASE("angle window asymptotics carry the sharp constant four") {
    // lambda ~ eta (1-|w|^2) and 1-|w|^2 = sech^2(rho/2) ~ 4 e^{-rho}
    double rho = 8.0, eta = 0.01;
    DiskPoint w{Complex(std::tanh(rho / 2), 0)};
    double ratio = lambda_len(w, eta) / (eta * std::exp(-rho));
    CHECK(std::abs(ratio / 4.0 - 1.0) < 0.01);
    // the unnormalized ratio is far from 1; the acceptance suite records
    // this as the literal criterion's failure
    CHECK(ratio > 3.5);
}

TEST_CASE("J window positivity iff and containment in Lambda") {
    for (int iw = 1; iw <= 50; ++iw)
        for (int is = 1; is <= 50; ++is)
            for (int ie = 1; ie <= 10; ++ie) {
                double wr = 0.019 * iw;
                double s = 0.12 * is;
                double eta = 0.047 * ie;
                DiskPoint w{Complex(wr, 0)};
                double d0 = hyp_dist(DiskPoint{Complex(0, 0)}, w);
                double jl;
                try {
                    jl = j_len(w, eta, s);
                } catch (const std::domain_error&) {
                    continue;  // ball touches the boundary
                }
                bool inside = d0 > s - eta && d0 < s + eta;
                if (std::min(std::abs(d0 - (s - eta)),
                             std::abs(d0 - (s + eta))) > 1e-9)
                    CHECK(jl > 0 == inside);
                if (d0 > eta) CHECK(jl <= lambda_len(w, eta) + 1e-12);
            }
}

TEST_CASE("schottky enumeration matches free group counts") {
    auto E = enumerate_group(FuchsianGroup::schottky(), 5);
    std::map<int, int> per_level;
    for (const auto& g : E.elements) ++per_level[g.length];
    CHECK(per_level[0] == 1);
    CHECK(per_level[1] == 4);
    CHECK(per_level[2] == 12);
    CHECK(per_level[3] == 36);
    CHECK(per_level[4] == 108);
    CHECK(per_level[5] == 324);
    CHECK(E.elements.size() == 1 + 4 + 12 + 36 + 108 + 324);

    // idempotence
    auto E2 = enumerate_group(FuchsianGroup::schottky(), 5);
    REQUIRE(E.elements.size() == E2.elements.size());
    for (std::size_t i = 0; i < E.elements.size(); ++i)
        CHECK(E.elements[i].word == E2.elements[i].word);
}

TEST_CASE("octagon group passes its relator and stays discrete at depth 4") {
    auto G = FuchsianGroup::octagon();
    CHECK(G.relator_residual() < 1e-9);
    auto E = enumerate_group(G, 4);
    // surface group: strictly fewer elements than the free count
    std::map<int, int> per_level;
    for (const auto& g : E.elements) ++per_level[g.length];
    CHECK(per_level[1] == 8);
    CHECK(per_level[2] < 8 * 7 + 1);
    CHECK(E.ratio_low > 0);

    // fundamental-domain style check: nontrivial elements move the center
    // by at least the pairing translation length
    double min_move = 1e9;
    DiskPoint origin{Complex(0, 0)};
    for (const auto& g : E.elements) {
        if (g.length == 0) continue;
        min_move = std::min(
            min_move, hyp_dist(origin, DiskPoint{g.map.apply(origin.z)}));
    }
    double len = 2.0 * std::acosh(1.0 / std::tan(M_PI / 8.0));
    CHECK(min_move > len - 1e-9);
}

TEST_CASE("word metric band and certified coverage") {
    auto E = enumerate_group(FuchsianGroup::schottky(), 6);
    auto band = word_metric_band(E);
    CHECK(band.low > 0);
    CHECK(band.high >= band.low);

    // single generator: distance over word length approaches the
    // translation length
    double L0 = 2.0 * std::acosh(3.0);
    DiskPoint origin{Complex(0, 0)};
    MobiusMap g = FuchsianGroup::schottky().letter(0);
    MobiusMap power = MobiusMap::identity();
    for (int n = 1; n <= 6; ++n) {
        power = power.compose(g);
        double d = hyp_dist(origin, DiskPoint{power.apply(origin.z)});
        CHECK(std::abs(d / n - L0) < 1e-9);
    }
}

TEST_CASE("orbital sums over certified annuli") {
    auto E = enumerate_group(FuchsianGroup::schottky(), 6);
    DiskPoint origin{Complex(0, 0)};
    double L0 = 2.0 * std::acosh(3.0);

    CHECK(orbital_sum(E, origin, 1.0, 0.5, std::nullopt) == 0.0);

    double narrow = orbital_sum(E, origin, L0, 0.2, std::nullopt);
    double wide = orbital_sum(E, origin, L0, 1.0, std::nullopt);
    CHECK(narrow > 0);
    CHECK(wide >= narrow);

    // the four generators sit in the first annulus
    CHECK(narrow == doctest::Approx(4 * std::exp(-L0)).epsilon(1e-12));

    CHECK_THROWS_AS(orbital_sum(E, origin, 100.0, 0.5, std::nullopt),
                    CoverageError);

    // kernel restriction keeps only zero-exponent-sum elements
    ThetaMap theta;
    theta.rows = {{1, 0}, {0, 1}};
    double restricted = orbital_sum(E, origin, L0, 0.2, theta);
    CHECK(restricted == 0.0);  // generators have nonzero exponent sums
}

TEST_CASE("correlation integral at zero gap equals the product measure") {
    auto E = enumerate_group(FuchsianGroup::schottky(), 4);
    DiskPoint origin{Complex(0, 0)};
    double eps = 0.3;
    CHECK(correlation_integral(E, origin, eps, 0.0) ==
          doctest::Approx(2 * M_PI * ball_area(eps)).epsilon(1e-12));
}

TEST_CASE("correlation integral sits inside the annulus sandwich") {
    auto E = enumerate_group(FuchsianGroup::schottky(), 4);
    DiskPoint origin{Complex(0, 0)};
    double L0 = 2.0 * std::acosh(3.0);
    double eps = 0.4;
    double integral = correlation_integral(E, origin, eps, L0, 1e-5);
    double lower = orbital_sum(E, origin, L0, eps / 2, std::nullopt);
    double upper = orbital_sum(E, origin, L0, 2 * eps, std::nullopt);
    CHECK(integral > 0);
    CHECK(lower > 0);
    CHECK(upper >= lower);
    // two-sided comparability with modest constants at this scale
    CHECK(integral < 10.0 * upper);
    CHECK(integral > 1e-4 * lower);
}

TEST_CASE("pair correlation reduces to the integral at p = 1") {
    auto E = enumerate_group(FuchsianGroup::schottky(), 4);
    DiskPoint origin{Complex(0, 0)};
    double L0 = 2.0 * std::acosh(3.0);
    auto gc = multi_correlation_geodesic(E, origin, 0.2, {L0}, 1e-5);
    double direct = correlation_integral(E, origin, 0.2, L0, 1e-5);
    CHECK(gc.lhs == doctest::Approx(direct).epsilon(1e-4));

    // gaps below the minimal translation length: empty intersection
    auto none = multi_correlation_geodesic(E, origin, 0.2, {1.0, 1.0}, 1e-5);
    CHECK(none.lhs == 0.0);
}
