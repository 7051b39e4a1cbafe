#pragma once

#include "erglab/markov.hpp"
#include "erglab/rational.hpp"
#include "erglab/seq.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace erglab {

// Locally constant positive roof with a common denominator Q, so the height
// cocycle h_n lives on the exact lattice (1/Q) Z.
class RoofFunction {
public:
    explicit RoofFunction(std::vector<Rational> values_per_state);

    const std::vector<Rational>& values() const { return values_; }
    const Rational& min_value() const { return min_; }
    const Rational& max_value() const { return max_; }
    std::int64_t common_denominator() const { return Q_; }
    // roof value of state s as an integer multiple of 1/Q
    std::int64_t lattice_value(int s) const { return lattice_[s]; }

private:
    std::vector<Rational> values_;
    std::vector<std::int64_t> lattice_;
    Rational min_, max_;
    std::int64_t Q_ = 1;
};

// Unit-speed suspension over the lattice extension of the base chain.
class SemiflowModel {
public:
    SemiflowModel(MarkovModel base, RoofFunction roof);

    const MarkovModel& base() const { return base_; }
    const RoofFunction& roof() const { return roof_; }
    const Rational& mean_roof() const { return varkappa_; }  // stationary mean

private:
    MarkovModel base_;
    RoofFunction roof_;
    Rational varkappa_;
};

// Exact joint law of (state, phi_n, h_n); h recorded as an integer multiple
// of 1/Q.
template <class S>
struct BasicJointDistribution {
    int kappa = 0;
    std::int64_t Q = 1;
    std::map<std::tuple<int, std::vector<int>, std::int64_t>, S> support;

    S total_mass() const {
        S t{};
        for (const auto& kv : support) t += kv.second;
        return t;
    }
};
using JointDistribution = BasicJointDistribution<double>;
using JointDistributionExact = BasicJointDistribution<Rational>;

JointDistribution joint_distribution(const SemiflowModel& model, int n);
JointDistributionExact joint_distribution_exact(const SemiflowModel& model,
                                                int n);

// Limit covariance of (phi_n, h_n - mean_roof * n)/sqrt(n), estimated from
// exact finite-n moments with Richardson extrapolation from n_fit/2.
struct GaussianParams {
    int kappa = 1;
    std::array<std::array<double, 2>, 2> cov_x{};  // kappa x kappa
    std::array<double, 2> cov_xy{};
    double var_y = 0.0;
    bool degenerate_y = false;  // constant roof: arithmetic fiber
    double fX0 = 0.0;           // lattice-walk density at the origin

    double fX(const std::array<double, 2>& x) const;
    // joint density of (X, Y) at (0, y); throws when degenerate
    double fZ0(double y) const;
};

GaussianParams gaussian_parameters(const SemiflowModel& model,
                                   std::int64_t n_fit = 1000);

// Local-limit probe at one lattice point: measured n^{kappa/2} mu(A cap
// [phi_n = t]) / mu(A) against the Gaussian prediction f_X(t/sqrt n).
struct LltProbe {
    double measured = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
    bool out_of_regime = false;  // |t| not O(sqrt n) at this n
};
LltProbe llt_lattice_check(const SemiflowModel& model,
                           const FiberedCylinder& A,
                           const std::vector<std::int64_t>& t, std::int64_t n);

// Flow return sequence mean_roof^{kappa/2 - 1} * sum_{k<=n} u_k, or the
// dissipative verdict for kappa >= 3.
struct FlowReturn {
    bool dissipative = false;
    double value = 0.0;   // at n
    SeqPrefix sequence;   // all prefixes up to n
};
FlowReturn flow_return_sequence(const SemiflowModel& model, std::int64_t n);

// Window sum of the lower-local-limit argument:
//   t^{kappa/2} sum_{|n - t/vk| <= M sqrt t} mu(A cap [phi_n=0, h_n in I+t-y])
// with exact lattice membership. I = [a, b) inside [0, min roof).
struct WindowSum {
    double sum = 0.0;
    double predicted_limit = 0.0;
    std::int64_t n_lo = 0, n_hi = 0;
    // max over the window of |(x_{n,t} - x_{n+1,t}) sqrt(n)/vk - 1|
    double max_spacing_dev = 0.0;
    // whether the deviation stays below 10/sqrt(n) at every window point
    bool spacing_within_bound = true;
    std::vector<double> terms;  // per-n contributions, ascending n
};
WindowSum lll_window_sum(const SemiflowModel& model, const FiberedCylinder& A,
                         const Rational& I_lo, const Rational& I_hi,
                         const Rational& t, double M, const Rational& y);

// Complement-window tail of the same sum. The roof bounds make the h-window
// constraint finitely supported in n, so the truncation is exact.
struct BellTail {
    double value = 0.0;
    std::int64_t feasible_lo = 0, feasible_hi = 0;  // all contributing n
    std::int64_t window_lo = 0, window_hi = 0;      // excluded central window
};
BellTail bell_tail_sum(const SemiflowModel& model, const Rational& t, double M);

// Cycle-sum test for joint arithmetic obstructions of (h, phi): the pair is
// reported aperiodic when the closed subgroup generated by cycle combos is
// the full lattice (1/Q) Z x Z^kappa. Sound up to the cycle-length bound.
struct AperiodicityVerdict {
    bool aperiodic = false;
    int cycle_length_bound = 0;
    // rows of a basis of the generated sublattice of Z^{1+kappa}
    // (h scaled by Q); proper sublattice = arithmetic witness
    std::vector<std::vector<std::int64_t>> witness_basis;
};
AperiodicityVerdict aperiodicity_check(const SemiflowModel& model,
                                       int max_cycle_len = 0);

// Builtin suspension: uniform 2-state full shift with lazy steps and roof
// values (1, 3/2).
SemiflowModel two_roof_semiflow(Backend backend);

}  // namespace erglab
