#include "erglab/semiflow.hpp"

#include "erglab/builtin.hpp"
#include "erglab/detail/dp.hpp"
#include "erglab/errors.hpp"
#include "erglab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace erglab {

namespace {

std::int64_t to_int64_checked(const BigInt& v) {
    if (v > BigInt(INT64_MAX / 4) || v < BigInt(INT64_MIN / 4))
        throw ResourceError("roof lattice value out of range");
    return v.convert_to<std::int64_t>();
}

// smallest integer >= r
std::int64_t ceil_rational(const Rational& r) {
    BigInt q = numerator(r) / denominator(r);  // truncation toward zero
    Rational back(q);
    if (back < r) q += 1;
    return to_int64_checked(q);
}

std::int64_t floor_rational(const Rational& r) {
    BigInt q = numerator(r) / denominator(r);
    Rational back(q);
    if (back > r) q -= 1;
    return to_int64_checked(q);
}

}  // namespace

RoofFunction::RoofFunction(std::vector<Rational> values_per_state)
    : values_(std::move(values_per_state)) {
    if (values_.empty()) throw std::domain_error("roof needs values");
    BigInt lcm = 1;
    for (const auto& v : values_) {
        if (!(v > 0)) throw std::domain_error("roof values must be positive");
        lcm = boost::multiprecision::lcm(lcm, denominator(v));
    }
    Q_ = to_int64_checked(lcm);
    min_ = max_ = values_[0];
    for (const auto& v : values_) {
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }
    for (const auto& v : values_) {
        Rational scaled = v * Q_;
        lattice_.push_back(to_int64_checked(numerator(scaled)));
    }
}

SemiflowModel::SemiflowModel(MarkovModel base, RoofFunction roof)
    : base_(std::move(base)), roof_(std::move(roof)) {
    if (static_cast<int>(roof_.values().size()) != base_.num_states())
        throw std::domain_error("roof table size != number of states");
    varkappa_ = Rational{};
    for (int s = 0; s < base_.num_states(); ++s)
        varkappa_ += base_.stationary_exact()[s] * roof_.values()[s];
}

namespace {

// Dense distribution over (state, lattice z, height index). Heights are
// absolute integer multiples of 1/Q in [0, n * max_roof * Q].
template <class S>
class SuspBox {
public:
    SuspBox(int nstates, int kappa, int zradius, std::int64_t hmax)
        : nstates_(nstates), kappa_(kappa), R_(zradius), hmax_(hmax) {
        side_ = 2 * static_cast<std::int64_t>(R_) + 1;
        zcells_ = 1;
        for (int i = 0; i < kappa_; ++i) zcells_ *= side_;
        total_ = static_cast<std::int64_t>(nstates_) * zcells_ * (hmax_ + 1);
        if (total_ > detail::kMaxBoxCells)
            throw ResourceError("suspension window too large");
        mass_.assign(static_cast<std::size_t>(total_), S{});
    }

    std::int64_t zindex(const std::array<int, 3>& z) const {
        std::int64_t idx = 0;
        for (int i = 0; i < kappa_; ++i) idx = idx * side_ + (z[i] + R_);
        return idx;
    }
    S& at(int s, std::int64_t zi, std::int64_t h) {
        return mass_[(static_cast<std::size_t>(s) * zcells_ + zi) * (hmax_ + 1) +
                     h];
    }
    const S& at(int s, std::int64_t zi, std::int64_t h) const {
        return mass_[(static_cast<std::size_t>(s) * zcells_ + zi) * (hmax_ + 1) +
                     h];
    }

    int nstates_, kappa_, R_;
    std::int64_t side_, zcells_, hmax_, total_;
    std::vector<S> mass_;
    int zreach_ = 0;
    std::int64_t hreach_ = 0;

    template <class F>
    void for_each_z(F&& f) const {
        std::array<int, 3> z = {0, 0, 0};
        iterate(0, z, f);
    }

private:
    template <class F>
    void iterate(int dim, std::array<int, 3>& z, F& f) const {
        if (dim == kappa_) {
            f(zindex(z), z);
            return;
        }
        for (int v = -zreach_; v <= zreach_; ++v) {
            z[dim] = v;
            iterate(dim + 1, z, f);
        }
    }
};

// One suspension step: height grows by roof(state) before the transition.
template <class S>
void susp_step(SuspBox<S>& box, const detail::CompiledChain<S>& chain,
               const std::vector<std::int64_t>& hroof,
               std::int64_t max_hroof) {
    if (box.zreach_ + chain.max_step > box.R_ ||
        box.hreach_ + max_hroof > box.hmax_)
        throw ResourceError("suspension window overflow");
    SuspBox<S> out(box.nstates_, box.kappa_, box.R_, box.hmax_);
    out.zreach_ = box.zreach_ + chain.max_step;
    out.hreach_ = box.hreach_ + max_hroof;
    box.for_each_z([&](std::int64_t zi, const std::array<int, 3>& z) {
        for (int s = 0; s < box.nstates_; ++s) {
            for (std::int64_t h = 0; h <= box.hreach_; ++h) {
                const S& m = box.at(s, zi, h);
                if (!(m != S{})) continue;
                for (const auto& b : chain.br[s]) {
                    std::array<int, 3> nz = z;
                    for (int i = 0; i < box.kappa_; ++i) nz[i] += b.step[i];
                    out.at(b.to, out.zindex(nz), h + hroof[s]) += m * b.w;
                }
            }
        }
    });
    box.mass_.swap(out.mass_);
    box.zreach_ = out.zreach_;
    box.hreach_ = out.hreach_;
}

template <class S>
BasicJointDistribution<S> joint_distribution_impl(const SemiflowModel& model,
                                                  int n) {
    if (n < 0) throw std::domain_error("need n >= 0");
    const auto& base = model.base();
    auto chain = detail::CompiledChain<S>::compile(base);
    std::int64_t max_hroof = 0;
    std::vector<std::int64_t> hroof;
    for (int s = 0; s < base.num_states(); ++s) {
        hroof.push_back(model.roof().lattice_value(s));
        max_hroof = std::max(max_hroof, hroof.back());
    }
    const int R = n * base.max_step_norm();
    SuspBox<S> box(base.num_states(), base.kappa(), R, n * max_hroof);
    std::array<int, 3> origin = {0, 0, 0};
    for (int s = 0; s < base.num_states(); ++s)
        box.at(s, box.zindex(origin), 0) =
            detail::ScalarOps<S>::from(base.stationary_exact()[s]);
    for (int i = 0; i < n; ++i) susp_step(box, chain, hroof, max_hroof);

    BasicJointDistribution<S> out;
    out.kappa = base.kappa();
    out.Q = model.roof().common_denominator();
    box.for_each_z([&](std::int64_t zi, const std::array<int, 3>& z) {
        for (int s = 0; s < base.num_states(); ++s)
            for (std::int64_t h = 0; h <= box.hreach_; ++h) {
                const S& m = box.at(s, zi, h);
                if (m != S{}) {
                    std::vector<int> zv(z.begin(), z.begin() + base.kappa());
                    out.support[{s, zv, h}] = m;
                }
            }
    });
    return out;
}

}  // namespace

JointDistribution joint_distribution(const SemiflowModel& model, int n) {
    return joint_distribution_impl<double>(model, n);
}
JointDistributionExact joint_distribution_exact(const SemiflowModel& model,
                                                int n) {
    return joint_distribution_impl<Rational>(model, n);
}

namespace {

// Exact first and second moments of (phi_n, h_n) by per-state accumulators.
struct MomentState {
    std::vector<double> mass;           // per state
    std::vector<std::array<double, 2>> sphi;
    std::vector<double> sh;
    std::vector<std::array<std::array<double, 2>, 2>> sphiphi;
    std::vector<std::array<double, 2>> sphih;
    std::vector<double> shh;
};

MomentState moments_at(const SemiflowModel& model, std::int64_t n) {
    const auto& base = model.base();
    const int S = base.num_states();
    const int kappa = base.kappa();
    std::vector<double> hval;
    for (int s = 0; s < S; ++s)
        hval.push_back(to_double(model.roof().values()[s]));

    MomentState st;
    st.mass.assign(S, 0.0);
    st.sphi.assign(S, {0, 0});
    st.sh.assign(S, 0.0);
    st.sphiphi.assign(S, {{{0, 0}, {0, 0}}});
    st.sphih.assign(S, {0, 0});
    st.shh.assign(S, 0.0);
    for (int s = 0; s < S; ++s) st.mass[s] = base.stationary()[s];

    for (std::int64_t step = 0; step < n; ++step) {
        MomentState nx = st;
        for (int s = 0; s < S; ++s) {
            nx.mass[s] = 0;
            nx.sphi[s] = {0, 0};
            nx.sh[s] = 0;
            nx.sphiphi[s] = {{{0, 0}, {0, 0}}};
            nx.sphih[s] = {0, 0};
            nx.shh[s] = 0;
        }
        for (int s = 0; s < S; ++s) {
            if (st.mass[s] == 0.0 && st.shh[s] == 0.0 && st.sh[s] == 0.0)
                continue;
            const double hs = hval[s];
            for (const auto& b : base.branches()[s]) {
                const double w = to_double(b.weight);
                std::array<double, 2> stp = {0, 0};
                for (int i = 0; i < kappa; ++i) stp[i] = b.step[i];
                const int t = b.to;
                const double m = st.mass[s];
                nx.mass[t] += w * m;
                nx.sh[t] += w * (st.sh[s] + hs * m);
                nx.shh[t] += w * (st.shh[s] + 2 * hs * st.sh[s] + hs * hs * m);
                for (int i = 0; i < kappa; ++i) {
                    nx.sphi[t][i] += w * (st.sphi[s][i] + stp[i] * m);
                    nx.sphih[t][i] += w * (st.sphih[s][i] + hs * st.sphi[s][i] +
                                           stp[i] * st.sh[s] + stp[i] * hs * m);
                    for (int j = 0; j < kappa; ++j)
                        nx.sphiphi[t][i][j] +=
                            w * (st.sphiphi[s][i][j] + stp[i] * st.sphi[s][j] +
                                 stp[j] * st.sphi[s][i] + stp[i] * stp[j] * m);
                }
            }
        }
        st = std::move(nx);
    }
    return st;
}

struct RawCov {
    std::array<std::array<double, 2>, 2> xx{};
    std::array<double, 2> xy{};
    double yy = 0.0;
};

RawCov covariance_at(const SemiflowModel& model, std::int64_t n) {
    const auto& base = model.base();
    const int S = base.num_states();
    const int kappa = base.kappa();
    auto st = moments_at(model, n);
    double vk = to_double(model.mean_roof());
    RawCov c;
    double Eh = 0.0;
    std::array<double, 2> Ephi = {0, 0};
    for (int s = 0; s < S; ++s) {
        Eh += st.sh[s];
        for (int i = 0; i < kappa; ++i) Ephi[i] += st.sphi[s][i];
    }
    // phi is centered exactly; h_n has mean vk*n in stationarity
    for (int s = 0; s < S; ++s) {
        c.yy += st.shh[s];
        for (int i = 0; i < kappa; ++i) {
            c.xy[i] += st.sphih[s][i];
            for (int j = 0; j < kappa; ++j) c.xx[i][j] += st.sphiphi[s][i][j];
        }
    }
    double mean_h = vk * static_cast<double>(n);
    c.yy = c.yy - 2 * mean_h * Eh + mean_h * mean_h;
    for (int i = 0; i < kappa; ++i) {
        c.xy[i] -= mean_h * Ephi[i];
        for (int j = 0; j < kappa; ++j) c.xx[i][j] -= Ephi[i] * Ephi[j];
    }
    return c;
}

}  // namespace

double GaussianParams::fX(const std::array<double, 2>& x) const {
    if (kappa == 1) {
        double v = cov_x[0][0];
        return std::exp(-x[0] * x[0] / (2 * v)) / std::sqrt(2 * M_PI * v);
    }
    double det = cov_x[0][0] * cov_x[1][1] - cov_x[0][1] * cov_x[1][0];
    double inv00 = cov_x[1][1] / det, inv11 = cov_x[0][0] / det,
           inv01 = -cov_x[0][1] / det;
    double q = x[0] * x[0] * inv00 + 2 * x[0] * x[1] * inv01 +
               x[1] * x[1] * inv11;
    return std::exp(-0.5 * q) / (2 * M_PI * std::sqrt(det));
}

double GaussianParams::fZ0(double y) const {
    if (degenerate_y)
        throw AccuracyError("joint density degenerate: constant roof", 0.0);
    double detX, qc;  // qc = c^T SigmaX^{-1} c
    if (kappa == 1) {
        detX = cov_x[0][0];
        qc = cov_xy[0] * cov_xy[0] / cov_x[0][0];
    } else {
        detX = cov_x[0][0] * cov_x[1][1] - cov_x[0][1] * cov_x[1][0];
        double inv00 = cov_x[1][1] / detX, inv11 = cov_x[0][0] / detX,
               inv01 = -cov_x[0][1] / detX;
        qc = cov_xy[0] * cov_xy[0] * inv00 +
             2 * cov_xy[0] * cov_xy[1] * inv01 +
             cov_xy[1] * cov_xy[1] * inv11;
    }
    double schur = var_y - qc;  // conditional variance of Y given X = 0
    if (schur <= 0)
        throw AccuracyError("joint covariance not positive definite", schur);
    double detZ = detX * schur;
    double q = y * y * detX / detZ;
    return std::exp(-0.5 * q) /
           std::pow(2 * M_PI, 0.5 * (kappa + 1)) / std::sqrt(detZ);
}

GaussianParams gaussian_parameters(const SemiflowModel& model,
                                   std::int64_t n_fit) {
    if (n_fit < 16) throw std::domain_error("n_fit too small");
    const int kappa = model.base().kappa();
    if (kappa < 1 || kappa > 2)
        throw std::domain_error("gaussian parameters need kappa in {1,2}");
    auto c_full = covariance_at(model, n_fit);
    auto c_half = covariance_at(model, n_fit / 2);

    GaussianParams g;
    g.kappa = kappa;
    auto rich = [&](double full, double half) {
        return 2.0 * (full / n_fit) - half / (n_fit / 2);
    };
    for (int i = 0; i < kappa; ++i) {
        g.cov_xy[i] = rich(c_full.xy[i], c_half.xy[i]);
        for (int j = 0; j < kappa; ++j)
            g.cov_x[i][j] = rich(c_full.xx[i][j], c_half.xx[i][j]);
    }
    g.var_y = rich(c_full.yy, c_half.yy);
    if (g.var_y < 1e-10) {
        g.degenerate_y = true;
        g.var_y = 0.0;
        g.cov_xy = {0, 0};
    }

    double detX;
    if (kappa == 1) {
        detX = g.cov_x[0][0];
    } else {
        detX = g.cov_x[0][0] * g.cov_x[1][1] - g.cov_x[0][1] * g.cov_x[1][0];
    }
    if (detX <= 0)
        throw AccuracyError("fitted covariance not positive definite", detX);
    g.fX0 = 1.0 / (std::pow(2 * M_PI, 0.5 * kappa) * std::sqrt(detX));
    return g;
}

LltProbe llt_lattice_check(const SemiflowModel& model,
                           const FiberedCylinder& A,
                           const std::vector<std::int64_t>& t, std::int64_t n) {
    const auto& base = model.base();
    const int kappa = base.kappa();
    if (static_cast<int>(t.size()) != kappa)
        throw std::domain_error("lattice point dimension != kappa");
    if (n < 1) throw std::domain_error("need n >= 1");
    double muA = A.word.empty() ? 1.0 : cylinder_measure(base, A);
    if (!(muA > 0.0)) throw std::domain_error("mu(A) = 0");

    // mu(A cap [phi_n = t]) via two fiber anchors
    std::vector<FiberedCylinder> members;
    FiberedCylinder a0 = A;
    a0.position = 0;
    a0.fiber = std::vector<int>(kappa, 0);
    members.push_back(a0);
    FiberedCylinder target;
    target.word = {};
    target.fiber = std::vector<int>(t.begin(), t.end());
    members.push_back(target);
    auto chain = detail::CompiledChain<double>::compile(base);
    auto q = detail::build_query(base, members, {0, n});
    double mass = detail::anchored_measure<double>(base, chain, q);

    auto g = gaussian_parameters(model, std::min<std::int64_t>(1000, 4 * n));
    std::array<double, 2> x = {0, 0};
    double tnorm = 0;
    for (int i = 0; i < kappa; ++i) {
        x[i] = static_cast<double>(t[i]) / std::sqrt(static_cast<double>(n));
        tnorm = std::max(tnorm, std::abs(static_cast<double>(t[i])));
    }
    LltProbe probe;
    probe.measured = std::pow(static_cast<double>(n), 0.5 * kappa) * mass / muA;
    probe.predicted = g.fX(x);
    probe.rel_error = probe.predicted != 0.0
                          ? std::abs(probe.measured - probe.predicted) /
                                probe.predicted
                          : INFINITY;
    double sigma = std::sqrt(g.cov_x[0][0] * n);
    probe.out_of_regime = tnorm > 8.0 * sigma;
    return probe;
}

FlowReturn flow_return_sequence(const SemiflowModel& model, std::int64_t n) {
    FlowReturn out;
    const int kappa = model.base().kappa();
    if (kappa >= 3) {
        out.dissipative = true;
        return out;
    }
    auto u = return_sequence(model.base(), 0, n);
    auto a = partial_power_sum(u, 1);
    double vk = to_double(model.mean_roof());
    double factor = std::pow(vk, 0.5 * kappa - 1.0);
    std::vector<double> scaled;
    scaled.reserve(a.size());
    for (std::int64_t k = 1; k <= a.last_index(); ++k)
        scaled.push_back(factor * a.at(k));
    out.sequence = SeqPrefix(1, std::move(scaled), true);
    out.value = out.sequence.at(n);
    return out;
}

namespace {

struct HWindow {
    std::int64_t lo;  // inclusive, lattice units
    std::int64_t hi;  // exclusive
};

HWindow lattice_interval(const Rational& lo, const Rational& hi,
                         std::int64_t Q) {
    return {ceil_rational(lo * Q), ceil_rational(hi * Q)};
}

// Per-n masses mu(A cap [phi_n = 0, h_n in [lo, hi)]) for n = 1..n_hi.
std::vector<double> window_masses(const SemiflowModel& model,
                                  const FiberedCylinder& A, HWindow hw,
                                  std::int64_t n_hi) {
    const auto& base = model.base();
    auto chain = detail::CompiledChain<double>::compile(base);
    std::int64_t max_hroof = 0;
    std::vector<std::int64_t> hroof;
    for (int s = 0; s < base.num_states(); ++s) {
        hroof.push_back(model.roof().lattice_value(s));
        max_hroof = std::max(max_hroof, hroof.back());
    }
    if (A.position != 0)
        throw std::domain_error("cylinder must sit at position 0");
    const int R = static_cast<int>(n_hi) * base.max_step_norm();
    SuspBox<double> box(base.num_states(), base.kappa(), R,
                        std::min<std::int64_t>(n_hi * max_hroof, hw.hi));
    // heights beyond the target interval can never come back down: clamp
    const std::int64_t hcap = box.hmax_;
    std::array<int, 3> origin = {0, 0, 0};
    for (int s = 0; s < base.num_states(); ++s) {
        if (!A.word.empty() && A.word[0] != s) continue;
        box.at(s, box.zindex(origin), 0) = base.stationary()[s];
    }
    std::vector<double> out(static_cast<std::size_t>(n_hi) + 1, 0.0);
    for (std::int64_t n = 1; n <= n_hi; ++n) {
        // step with clamping: mass pushed above hcap is dropped (it can
        // never reenter [lo, hi))
        SuspBox<double> nx(box.nstates_, box.kappa_, box.R_, box.hmax_);
        nx.zreach_ = std::min(box.R_, box.zreach_ + chain.max_step);
        nx.hreach_ = std::min(hcap, box.hreach_ + max_hroof);
        std::int64_t wordpos = n - 1;
        box.for_each_z([&](std::int64_t zi, const std::array<int, 3>& z) {
            for (int s = 0; s < box.nstates_; ++s) {
                bool word_ok =
                    A.word.empty() ||
                    wordpos >= static_cast<std::int64_t>(A.word.size()) ||
                    A.word[wordpos] == s;
                if (!word_ok) continue;
                for (std::int64_t h = 0; h <= box.hreach_; ++h) {
                    const double m = box.at(s, zi, h);
                    if (m == 0.0) continue;
                    std::int64_t nh = h + hroof[s];
                    if (nh > hcap) continue;
                    for (const auto& b : chain.br[s]) {
                        std::array<int, 3> nz = z;
                        for (int i = 0; i < box.kappa_; ++i) nz[i] += b.step[i];
                        nx.at(b.to, nx.zindex(nz), nh) += m * b.w;
                    }
                }
            }
        });
        box.mass_.swap(nx.mass_);
        box.zreach_ = nx.zreach_;
        box.hreach_ = nx.hreach_;

        // symbol constraint at position n (inside the word)
        KahanSum hit;
        std::int64_t zi0 = box.zindex(origin);
        for (int s = 0; s < box.nstates_; ++s) {
            if (!A.word.empty() &&
                n < static_cast<std::int64_t>(A.word.size()) && A.word[n] != s) {
                // path not in A: exclude this state's mass from the reading,
                // and kill it entirely (the constraint applies to the set)
                for (std::int64_t zi = 0; zi < box.zcells_; ++zi)
                    for (std::int64_t h = 0; h <= box.hreach_; ++h)
                        box.at(s, zi, h) = 0.0;
                continue;
            }
            for (std::int64_t h = std::max<std::int64_t>(hw.lo, 0);
                 h < std::min<std::int64_t>(hw.hi, box.hreach_ + 1); ++h)
                hit.add(box.at(s, zi0, h));
        }
        out[static_cast<std::size_t>(n)] = hit.value();
    }
    return out;
}

}  // namespace

WindowSum lll_window_sum(const SemiflowModel& model, const FiberedCylinder& A,
                         const Rational& I_lo, const Rational& I_hi,
                         const Rational& t, double M, const Rational& y) {
    const auto& base = model.base();
    const int kappa = base.kappa();
    if (!(I_lo >= 0) || !(I_hi > I_lo) || I_hi > model.roof().min_value())
        throw std::domain_error("interval must satisfy 0 <= a < b <= min roof");
    if (y < I_lo || y >= I_hi)
        throw std::domain_error("y must lie in [a, b)");
    double td = to_double(t);
    double vk = to_double(model.mean_roof());
    std::int64_t n_center = static_cast<std::int64_t>(std::floor(td / vk));
    std::int64_t halfwidth =
        static_cast<std::int64_t>(std::floor(M * std::sqrt(td)));
    std::int64_t n_lo = std::max<std::int64_t>(1, n_center - halfwidth);
    std::int64_t n_hi = n_center + halfwidth;
    if (n_hi < n_lo) throw std::out_of_range("empty window");

    HWindow hw = lattice_interval(I_lo + t - y, I_hi + t - y,
                                  model.roof().common_denominator());
    auto masses = window_masses(model, A, hw, n_hi);

    WindowSum ws;
    ws.n_lo = n_lo;
    ws.n_hi = n_hi;
    KahanSum acc;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        ws.terms.push_back(masses[static_cast<std::size_t>(n)]);
        acc.add(masses[static_cast<std::size_t>(n)]);
    }
    ws.sum = std::pow(td, 0.5 * kappa) * acc.value();

    auto g = gaussian_parameters(model);
    double muA = A.word.empty() ? 1.0 : cylinder_measure(base, A);
    double ilen = to_double(I_hi - I_lo);
    ws.predicted_limit =
        std::pow(vk, 0.5 * kappa - 1.0) * g.fX0 * muA * ilen;

    for (std::int64_t n = n_lo; n < n_hi; ++n) {
        double xn = (td - vk * n) / std::sqrt(static_cast<double>(n));
        double xn1 = (td - vk * (n + 1)) / std::sqrt(static_cast<double>(n + 1));
        double dev =
            std::abs((xn - xn1) * std::sqrt(static_cast<double>(n)) / vk - 1.0);
        ws.max_spacing_dev = std::max(ws.max_spacing_dev, dev);
        if (dev >= 10.0 / std::sqrt(static_cast<double>(n)))
            ws.spacing_within_bound = false;
    }
    return ws;
}

BellTail bell_tail_sum(const SemiflowModel& model, const Rational& t,
                       double M) {
    const auto& base = model.base();
    const int kappa = base.kappa();
    const std::int64_t Q = model.roof().common_denominator();
    const Rational minh = model.roof().min_value();
    HWindow hw = lattice_interval(t, t + minh, Q);

    // h_n in [lo, hi) forces min_roof * n < hi and max_roof * n >= lo
    std::int64_t min_h_int = ceil_rational(minh * Q);  // exact lattice value
    std::int64_t max_h_int = ceil_rational(model.roof().max_value() * Q);
    BellTail bt;
    bt.feasible_hi = (hw.hi - 1) / min_h_int;
    bt.feasible_lo = std::max<std::int64_t>(
        1, (hw.lo + max_h_int - 1) / max_h_int);

    double td = to_double(t);
    double vk = to_double(model.mean_roof());
    std::int64_t n_center = static_cast<std::int64_t>(std::floor(td / vk));
    std::int64_t halfwidth =
        static_cast<std::int64_t>(std::floor(M * std::sqrt(td)));
    bt.window_lo = n_center - halfwidth;
    bt.window_hi = n_center + halfwidth;

    FiberedCylinder whole;  // full base
    auto masses = window_masses(model, whole, hw, bt.feasible_hi);
    KahanSum acc;
    for (std::int64_t n = bt.feasible_lo; n <= bt.feasible_hi; ++n) {
        if (n >= bt.window_lo && n <= bt.window_hi) continue;
        acc.add(masses[static_cast<std::size_t>(n)]);
    }
    bt.value = std::pow(td, 0.5 * kappa) * acc.value();
    return bt;
}

namespace {

// Integer lattice span by incremental triangular (Hermite-style) reduction.
// pivots_[col] is the stored basis row with leading column col; both rows in
// the gcd loop always vanish before their pivot column, so the final basis
// is triangular and its determinant decides fullness.
class IntLattice {
public:
    explicit IntLattice(int dim) : dim_(dim), pivots_(dim) {}

    void add(std::vector<std::int64_t> v) {
        for (int col = 0; col < dim_; ++col) {
            if (v[col] == 0) continue;
            auto& row = pivots_[col];
            if (row.empty()) {
                if (v[col] < 0)
                    for (auto& x : v) x = -x;
                row = std::move(v);
                return;
            }
            while (v[col] != 0) {
                std::int64_t q = v[col] / row[col];
                for (int i = 0; i < dim_; ++i) v[i] -= q * row[i];
                if (v[col] != 0) std::swap(row, v);
            }
        }
    }

    bool full_lattice() const {
        std::int64_t det = 1;
        for (int col = 0; col < dim_; ++col) {
            if (pivots_[col].empty()) return false;
            det *= pivots_[col][col];
        }
        return det == 1 || det == -1;
    }

    std::vector<std::vector<std::int64_t>> rows() const {
        std::vector<std::vector<std::int64_t>> out;
        for (const auto& r : pivots_)
            if (!r.empty()) out.push_back(r);
        return out;
    }

private:
    int dim_;
    std::vector<std::vector<std::int64_t>> pivots_;
};

}  // namespace

AperiodicityVerdict aperiodicity_check(const SemiflowModel& model,
                                       int max_cycle_len) {
    const auto& base = model.base();
    const int S = base.num_states();
    const int kappa = base.kappa();
    if (max_cycle_len <= 0) max_cycle_len = 2 * S;

    // distinct (h*Q, phi, len) over closed branch-walks up to the bound
    std::set<std::vector<std::int64_t>> cycles;  // [h, phi..., len]
    struct Frame {
        int state;
        std::vector<std::int64_t> acc;  // h, phi...
    };
    for (int start = 0; start < S; ++start) {
        std::vector<Frame> frontier{{start, std::vector<std::int64_t>(1 + kappa, 0)}};
        for (int len = 1; len <= max_cycle_len; ++len) {
            std::vector<Frame> next;
            for (const auto& f : frontier)
                for (const auto& b : base.branches()[f.state]) {
                    Frame nf;
                    nf.state = b.to;
                    nf.acc = f.acc;
                    nf.acc[0] += model.roof().lattice_value(f.state);
                    for (int i = 0; i < kappa; ++i) nf.acc[1 + i] += b.step[i];
                    if (nf.state == start) {
                        auto key = nf.acc;
                        key.push_back(len);
                        cycles.insert(key);
                    }
                    next.push_back(std::move(nf));
                }
            frontier = std::move(next);
            if (frontier.size() > 2'000'000)
                throw ResourceError("cycle enumeration too large");
        }
    }

    std::vector<std::vector<std::int64_t>> vecs(cycles.begin(), cycles.end());
    IntLattice lat(1 + kappa);
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = i + 1; j < vecs.size(); ++j) {
            std::int64_t li = vecs[i].back(), lj = vecs[j].back();
            std::vector<std::int64_t> w(1 + kappa);
            for (int c = 0; c < 1 + kappa; ++c)
                w[c] = lj * vecs[i][c] - li * vecs[j][c];
            lat.add(std::move(w));
        }

    AperiodicityVerdict v;
    v.cycle_length_bound = max_cycle_len;
    v.aperiodic = lat.full_lattice();
    if (!v.aperiodic) v.witness_basis = lat.rows();
    return v;
}

SemiflowModel two_roof_semiflow(Backend backend) {
    return SemiflowModel(builtin_model("two-roof-base", backend),
                         RoofFunction({Rational(1), Rational(3, 2)}));
}

}  // namespace erglab
