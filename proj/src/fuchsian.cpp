#include "erglab/fuchsian.hpp"

#include "erglab/errors.hpp"
#include "erglab/quadrature.hpp"
#include "erglab/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace erglab {

namespace {

constexpr double kRoundUnit = 1e-7;   // dedup quantization
constexpr double kAuditradius = 1e-6;  // 10x the rounding unit

std::array<double, 4> flat(const MobiusMap& m) {
    return {m.a().real(), m.a().imag(), m.b().real(), m.b().imag()};
}

// sign-normalized quantized key; (a,b) and (-a,-b) act identically
struct Key {
    std::array<std::int64_t, 4> q;
    bool operator==(const Key& o) const { return q == o.q; }
    bool operator<(const Key& o) const { return q < o.q; }
};

std::array<double, 4> canonical(const MobiusMap& m) {
    auto v = flat(m);
    double lead = std::abs(v[0]) > 1e-9 ? v[0] : v[1];
    if (lead < 0)
        for (auto& x : v) x = -x;
    return v;
}

Key make_key(const MobiusMap& m) {
    auto v = canonical(m);
    Key k;
    for (int i = 0; i < 4; ++i)
        k.q[i] = static_cast<std::int64_t>(std::llround(v[i] / kRoundUnit));
    return k;
}

double key_distance(const MobiusMap& x, const MobiusMap& y) {
    auto a = canonical(x), b = canonical(y);
    double d = 0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

FuchsianGroup::FuchsianGroup(std::vector<MobiusMap> generator_pairs,
                             std::optional<std::vector<int>> relator,
                             std::string name)
    : pairs_(std::move(generator_pairs)),
      relator_(std::move(relator)),
      name_(std::move(name)) {
    if (pairs_.empty()) throw StructuralError("need at least one generator");
    for (const auto& g : pairs_) {
        letters_.push_back(g);
        letters_.push_back(g.inverse());
    }
    if (relator_) {
        double res = relator_residual();
        if (res > 1e-9)
            throw StructuralError(
                "relator does not evaluate to +-identity (residual " +
                std::to_string(res) + ")");
    }
}

double FuchsianGroup::relator_residual() const {
    if (!relator_) return 0.0;
    MobiusMap prod = MobiusMap::identity();
    for (int letter_idx : *relator_) prod = prod.compose(letter(letter_idx));
    auto v = flat(prod);
    double plus = std::max({std::abs(v[0] - 1.0), std::abs(v[1]),
                            std::abs(v[2]), std::abs(v[3])});
    double minus = std::max({std::abs(v[0] + 1.0), std::abs(v[1]),
                             std::abs(v[2]), std::abs(v[3])});
    return std::min(plus, minus);
}

FuchsianGroup FuchsianGroup::schottky() {
    double len = 2.0 * std::acosh(3.0);
    std::vector<MobiusMap> gens{MobiusMap::axis_translation(len, 0.0),
                                MobiusMap::axis_translation(len, M_PI / 2)};
    return FuchsianGroup(std::move(gens), std::nullopt, "schottky");
}

FuchsianGroup FuchsianGroup::octagon() {
    // regular octagon with vertex angle pi/4: the center-to-side distance
    // solves cosh(rho) = cot(pi/8); opposite sides are paired by the
    // translations through the side midpoints
    double rho_mid = std::acosh(1.0 / std::tan(M_PI / 8.0));
    double len = 2.0 * rho_mid;
    std::vector<MobiusMap> gens;
    for (int k = 0; k < 4; ++k)
        gens.push_back(MobiusMap::axis_translation(len, k * M_PI / 4.0));
    // side-pairing relation g0 g1^- g2 g3^- g0^- g1 g2^- g3
    std::vector<int> rel{0, 3, 4, 7, 1, 2, 5, 6};
    return FuchsianGroup(std::move(gens), rel, "octagon");
}

Enumeration enumerate_group(const FuchsianGroup& G, int max_len) {
    if (max_len < 1) throw std::domain_error("need max_len >= 1");
    if (max_len > 14) throw ResourceError("enumeration depth capped at 14");

    Enumeration E;
    E.max_len = max_len;

    std::map<Key, std::size_t> seen;
    GroupElement id;
    id.map = MobiusMap::identity();
    id.length = 0;
    id.theta.assign(G.num_pairs(), 0);
    E.elements.push_back(id);
    seen[make_key(id.map)] = 0;

    std::vector<std::size_t> frontier{0};
    for (int level = 1; level <= max_len; ++level) {
        std::vector<std::size_t> next;
        for (std::size_t idx : frontier) {
            // copy: elements vector may grow
            GroupElement parent = E.elements[idx];
            for (int letter = 0; letter < G.num_letters(); ++letter) {
                if (!parent.word.empty() &&
                    FuchsianGroup::inverse_letter(parent.word.back()) == letter)
                    continue;
                GroupElement child;
                child.map = parent.map.compose(G.letter(letter));
                child.map.renormalize();
                child.word = parent.word;
                child.word.push_back(letter);
                child.length = level;
                child.theta = parent.theta;
                child.theta[letter / 2] += (letter % 2 == 0) ? 1 : -1;

                Key key = make_key(child.map);
                auto it = seen.find(key);
                if (it != seen.end()) {
                    double d = key_distance(child.map, E.elements[it->second].map);
                    if (d > 2.0 * kRoundUnit)
                        throw StructuralError(
                            "dedup collision: distinct matrices share a key; "
                            "finer rounding required");
                    continue;
                }
                seen[key] = E.elements.size();
                next.push_back(E.elements.size());
                E.elements.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }

    // near-collision audit over coarse cells
    {
        std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
        auto coarse_cell = [](const std::array<double, 4>& v, int d0, int d1,
                              int d2, int d3) {
            std::int64_t h = 1469598103934665603LL;
            auto mix = [&h](std::int64_t x) {
                h ^= x;
                h *= 1099511628211LL;
            };
            mix(static_cast<std::int64_t>(std::floor(v[0] / kAuditradius)) + d0);
            mix(static_cast<std::int64_t>(std::floor(v[1] / kAuditradius)) + d1);
            mix(static_cast<std::int64_t>(std::floor(v[2] / kAuditradius)) + d2);
            mix(static_cast<std::int64_t>(std::floor(v[3] / kAuditradius)) + d3);
            return h;
        };
        for (std::size_t i = 0; i < E.elements.size(); ++i) {
            auto v = canonical(E.elements[i].map);
            buckets[coarse_cell(v, 0, 0, 0, 0)].push_back(i);
        }
        for (std::size_t i = 0; i < E.elements.size(); ++i) {
            auto v = canonical(E.elements[i].map);
            for (int d0 = -1; d0 <= 1; ++d0)
                for (int d1 = -1; d1 <= 1; ++d1)
                    for (int d2 = -1; d2 <= 1; ++d2)
                        for (int d3 = -1; d3 <= 1; ++d3) {
                            auto it = buckets.find(coarse_cell(v, d0, d1, d2, d3));
                            if (it == buckets.end()) continue;
                            for (std::size_t j : it->second) {
                                if (j <= i) continue;
                                if (key_distance(E.elements[i].map,
                                                 E.elements[j].map) <
                                    kAuditradius)
                                    throw StructuralError(
                                        "dedup audit: two elements within 10x "
                                        "rounding radius");
                            }
                        }
        }
    }

    DiskPoint origin{Complex(0, 0)};
    E.orbit_dist.reserve(E.elements.size());
    bool first = true;
    for (const auto& g : E.elements) {
        double d = hyp_dist(origin, DiskPoint{g.map.apply(Complex(0, 0))});
        E.orbit_dist.push_back(d);
        if (g.length == 0) continue;
        double r = d / g.length;
        if (first) {
            E.ratio_low = E.ratio_high = r;
            first = false;
        } else {
            E.ratio_low = std::min(E.ratio_low, r);
            E.ratio_high = std::max(E.ratio_high, r);
        }
    }
    return E;
}

BandVerdict word_metric_band(const Enumeration& E) {
    BandVerdict b;
    b.low = E.ratio_low;
    b.high = E.ratio_high;
    b.window = IndexRange{1, E.max_len};
    return b;
}

bool ThetaMap::in_kernel(const std::vector<std::int64_t>& v) const {
    for (const auto& row : rows) {
        std::int64_t dot = 0;
        for (std::size_t i = 0; i < row.size() && i < v.size(); ++i)
            dot += row[i] * v[i];
        if (dot != 0) return false;
    }
    return true;
}

namespace {

void require_coverage(const Enumeration& E, DiskPoint x, double needed,
                      const char* who) {
    double offset = 2.0 * hyp_dist(DiskPoint{Complex(0, 0)}, x);
    double cert = E.certified_distance() - offset;
    if (needed > cert)
        throw CoverageError(std::string(who) +
                                ": annulus not certified complete at this "
                                "enumeration depth",
                            cert);
}

}  // namespace

double orbital_sum(const Enumeration& E, DiskPoint x, double t, double eps,
                   const std::optional<ThetaMap>& kernel_constraint) {
    if (!(eps > 0)) throw std::domain_error("need eps > 0");
    require_coverage(E, x, t + eps, "orbital_sum");
    KahanSum acc;
    for (std::size_t i = 0; i < E.elements.size(); ++i) {
        const auto& g = E.elements[i];
        if (kernel_constraint && !kernel_constraint->in_kernel(g.theta))
            continue;
        double d = hyp_dist(x, DiskPoint{g.map.apply(x.z)});
        if (d < t - eps || d > t + eps) continue;
        acc.add(std::exp(-d));
    }
    return acc.value();
}

namespace {

// circular arc as segments inside [0, 2 pi)
using Segments = std::vector<std::pair<double, double>>;

Segments arc_segments(double center, double half) {
    if (half <= 0) return {};
    if (half >= M_PI) return {{0.0, 2.0 * M_PI}};
    double lo = normalize_angle(center - half);
    double hi = lo + 2.0 * half;
    if (hi <= 2.0 * M_PI) return {{lo, hi}};
    return {{0.0, hi - 2.0 * M_PI}, {lo, 2.0 * M_PI}};
}

Segments intersect_segments(const Segments& a, const Segments& b) {
    Segments out;
    for (const auto& [alo, ahi] : a)
        for (const auto& [blo, bhi] : b) {
            double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
            if (hi > lo) out.emplace_back(lo, hi);
        }
    return out;
}

double segments_length(const Segments& s) {
    double total = 0;
    for (const auto& [lo, hi] : s) total += hi - lo;
    return total;
}

// arc of { theta : R e^{i theta} in ball }, as (center angle, half width);
// half < 0 encodes empty
std::pair<double, double> circle_ball_arc(const EuclidBall& ball, double R) {
    double C = std::abs(ball.center);
    if (C == 0.0)
        return {0.0, R < ball.radius ? M_PI : -1.0};
    double cosv = (R * R + C * C - ball.radius * ball.radius) / (2.0 * R * C);
    if (cosv >= 1.0) return {0.0, -1.0};
    if (cosv <= -1.0) return {0.0, M_PI};
    return {std::atan2(ball.center.imag(), ball.center.real()),
            std::acos(cosv)};
}

// adaptive tensor quadrature over the ball N(x, eps) of a per-point
// integrand, refined in the angular direction until rel_tol
double ball_quadrature(DiskPoint x, double eps,
                       const std::function<double(Complex)>& phi,
                       double rel_tol) {
    EuclidBall domain = ball_euclid(x, eps);
    GaussRule u_rule = gauss_legendre(12);
    GaussRule v_rule = gauss_legendre(12);
    const int u_panels = 4;

    auto evaluate = [&](int v_panels) {
        KahanSum total;
        for (int up = 0; up < u_panels; ++up) {
            double ua = static_cast<double>(up) / u_panels;
            double ub = static_cast<double>(up + 1) / u_panels;
            for (std::size_t ui = 0; ui < u_rule.nodes.size(); ++ui) {
                double u = 0.5 * (ua + ub) + 0.5 * (ub - ua) * u_rule.nodes[ui];
                double wu = 0.5 * (ub - ua) * u_rule.weights[ui];
                for (int vp = 0; vp < v_panels; ++vp) {
                    double va = 2.0 * M_PI * vp / v_panels;
                    double vb = 2.0 * M_PI * (vp + 1) / v_panels;
                    for (std::size_t vi = 0; vi < v_rule.nodes.size(); ++vi) {
                        double v = 0.5 * (va + vb) +
                                   0.5 * (vb - va) * v_rule.nodes[vi];
                        double wv = 0.5 * (vb - va) * v_rule.weights[vi];
                        Complex z = domain.center +
                                    std::polar(domain.radius * u, v);
                        double omz = 1.0 - std::norm(z);
                        double jac = 4.0 * domain.radius * domain.radius * u /
                                     (omz * omz);
                        total.add(wu * wv * jac * phi(z));
                    }
                }
            }
        }
        return total.value();
    };

    double prev = evaluate(8);
    for (int v_panels = 16; v_panels <= 128; v_panels *= 2) {
        double cur = evaluate(v_panels);
        if (std::abs(cur - prev) <=
            rel_tol * std::max(std::abs(cur), 1e-30)) {
            return cur;
        }
        prev = cur;
    }
    throw AccuracyError("ball quadrature did not reach tolerance", prev);
}

}  // namespace

double correlation_integral(const Enumeration& E, DiskPoint x, double eps,
                            double s, double rel_tol) {
    if (!(eps > 0)) throw std::domain_error("need eps > 0");
    if (s < 0) throw std::domain_error("need s >= 0");
    if (s == 0.0) return 2.0 * M_PI * ball_area(eps);
    require_coverage(E, x, s + 2 * eps, "correlation_integral");

    std::vector<Complex> targets;
    for (std::size_t i = 0; i < E.elements.size(); ++i) {
        double d = hyp_dist(x, DiskPoint{E.elements[i].map.apply(x.z)});
        if (d >= s - 2 * eps - 1e-12 && d <= s + 2 * eps + 1e-12)
            targets.push_back(E.elements[i].map.apply(x.z));
    }
    if (targets.empty()) return 0.0;

    double R = std::tanh(s / 2.0);
    auto phi = [&](Complex z) {
        MobiusMap back = MobiusMap::translation_to(z).inverse();
        double total = 0.0;
        for (const Complex& gx : targets) {
            Complex w = back.apply(gx);
            if (std::abs(w) >= 1.0 - 1e-12) continue;
            EuclidBall ball = ball_euclid(DiskPoint{w}, eps);
            auto [center, half] = circle_ball_arc(ball, R);
            (void)center;
            if (half > 0) total += 2.0 * half;
        }
        return total;
    };
    return ball_quadrature(x, eps, phi, rel_tol);
}

GeodesicCorrelation multi_correlation_geodesic(const Enumeration& E,
                                               DiskPoint x, double eps,
                                               const std::vector<double>& gaps,
                                               double rel_tol) {
    if (gaps.empty()) throw std::domain_error("need at least one gap");
    const int p = static_cast<int>(gaps.size());
    std::vector<double> times(p);
    double acc = 0;
    for (int j = 0; j < p; ++j) {
        if (!(gaps[j] > 0)) throw std::domain_error("gaps must be positive");
        acc += gaps[j];
        times[j] = acc;
    }
    require_coverage(E, x, times.back() + 2 * eps * p + 2 * eps,
                     "multi_correlation_geodesic");

    // per level: candidate orbit points within the fattened annulus
    std::vector<std::vector<Complex>> cands(p);
    for (int j = 0; j < p; ++j)
        for (std::size_t i = 0; i < E.elements.size(); ++i) {
            Complex gx = E.elements[i].map.apply(x.z);
            double d = hyp_dist(x, DiskPoint{gx});
            if (d >= times[j] - 2 * eps * (j + 1) - 1e-12 &&
                d <= times[j] + 2 * eps * (j + 1) + 1e-12)
                cands[j].push_back(gx);
        }

    // tuples surviving the consecutive-distance pruning
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur(p);
    std::function<void(int)> grow = [&](int j) {
        if (j == p) {
            tuples.push_back(cur);
            if (tuples.size() > 2'000'000)
                throw ResourceError("tuple set too large");
            return;
        }
        for (int i = 0; i < static_cast<int>(cands[j].size()); ++i) {
            if (j > 0) {
                double d = hyp_dist(DiskPoint{cands[j - 1][cur[j - 1]]},
                                    DiskPoint{cands[j][i]});
                if (d < gaps[j] - 4 * eps - 1e-12 ||
                    d > gaps[j] + 4 * eps + 1e-12)
                    continue;
            }
            cur[j] = i;
            grow(j + 1);
        }
    };
    grow(0);

    GeodesicCorrelation out;
    if (!tuples.empty()) {
        std::vector<double> radii(p);
        for (int j = 0; j < p; ++j) radii[j] = std::tanh(times[j] / 2.0);
        auto psi = [&](Complex z) {
            MobiusMap back = MobiusMap::translation_to(z).inverse();
            // arcs cached per (level, candidate)
            std::vector<std::vector<std::pair<double, double>>> arcs(p);
            for (int j = 0; j < p; ++j) {
                arcs[j].resize(cands[j].size(), {0.0, -1.0});
                for (std::size_t i = 0; i < cands[j].size(); ++i) {
                    Complex w = back.apply(cands[j][i]);
                    if (std::abs(w) >= 1.0 - 1e-12) continue;
                    EuclidBall ball = ball_euclid(DiskPoint{w}, eps);
                    arcs[j][i] = circle_ball_arc(ball, radii[j]);
                }
            }
            double total = 0.0;
            for (const auto& tup : tuples) {
                Segments segs{{0.0, 2.0 * M_PI}};
                bool empty = false;
                for (int j = 0; j < p && !empty; ++j) {
                    auto [c, h] = arcs[j][tup[j]];
                    if (h <= 0) {
                        empty = true;
                        break;
                    }
                    segs = intersect_segments(segs, arc_segments(c, h));
                    empty = segs.empty();
                }
                if (!empty) total += segments_length(segs);
            }
            return total;
        };
        out.lhs = ball_quadrature(x, eps, psi, rel_tol);
    }

    out.rhs_product = 1.0;
    for (int j = 0; j < p; ++j)
        out.rhs_product *= correlation_integral(E, x, 4 * eps, gaps[j], rel_tol);
    if (out.rhs_product > 0)
        out.ratio = out.lhs / out.rhs_product;
    else
        out.ratio = out.lhs > 0 ? INFINITY : 0.0;
    return out;
}

CoverCount cover_counting(const Enumeration& E, const ThetaMap& theta,
                          const std::vector<double>& t_grid, double eps) {
    CoverCount out;
    const double kappa = static_cast<double>(theta.kappa());
    DiskPoint origin{Complex(0, 0)};
    for (double t : t_grid) {
        double s = orbital_sum(E, origin, t, eps, theta);
        out.t.push_back(t);
        out.value.push_back(std::pow(t, 0.5 * kappa) * s);
    }
    return out;
}

}  // namespace erglab
