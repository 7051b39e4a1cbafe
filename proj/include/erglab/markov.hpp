#pragma once

#include "erglab/rational.hpp"
#include "erglab/seq.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erglab {

enum class Backend { Float, Exact };

// One weighted transition branch. A pair of states may carry several
// branches with distinct lattice steps; the plain transition probability
// P[s][to] is the sum of the branch weights.
struct Branch {
    int to = 0;
    Rational weight;
    std::vector<int> step;  // element of Z^kappa
};

// Finite-state chain with stationary law and a lattice-valued edge cocycle.
// Immutable after construction; construction validates stochasticity,
// irreducibility, aperiodicity of the base graph, and centering of the
// cocycle. The arithmetic backend is fixed here and never mixed inside one
// computation.
class MarkovModel {
public:
    MarkovModel(int num_states, int kappa,
                std::vector<std::vector<Branch>> branches, Backend backend,
                std::vector<std::string> state_names = {});

    int num_states() const { return num_states_; }
    int kappa() const { return kappa_; }
    Backend backend() const { return backend_; }
    const std::vector<std::string>& state_names() const { return names_; }

    const std::vector<std::vector<Branch>>& branches() const {
        return branches_;
    }
    // Total one-step probability s -> t (all branches).
    Rational transition_exact(int s, int t) const;
    double transition(int s, int t) const;

    const std::vector<Rational>& stationary_exact() const { return mu_exact_; }
    const std::vector<double>& stationary() const { return mu_; }

    int max_step_norm() const { return max_step_norm_; }

private:
    int num_states_;
    int kappa_;
    std::vector<std::vector<Branch>> branches_;
    Backend backend_;
    std::vector<std::string> names_;
    std::vector<Rational> mu_exact_;
    std::vector<double> mu_;
    int max_step_norm_ = 0;
};

// Stationary law of an irreducible row-stochastic matrix, solved exactly.
// Throws StructuralError when the matrix is reducible.
std::vector<Rational> stationary_distribution(
    const std::vector<std::vector<Rational>>& P);

// Cylinder [word]_position, optionally pinned to one lattice copy.
struct FiberedCylinder {
    std::int64_t position = 0;
    std::vector<int> word;
    std::optional<std::vector<int>> fiber;
};

// Finite union of fibered cylinders.
using CylinderSet = std::vector<FiberedCylinder>;

// mu_{s0} p_{s0 s1} ... ; zero for inadmissible words, independent of the
// position. The fiber does not change the value (each copy carries the base
// measure).
double cylinder_measure(const MarkovModel& model, const FiberedCylinder& c);
Rational cylinder_measure_exact(const MarkovModel& model,
                                const FiberedCylinder& c);

double set_measure(const MarkovModel& model, const CylinderSet& set);
Rational set_measure_exact(const MarkovModel& model, const CylinderSet& set);

// Joint law of (state, accumulated lattice displacement).
template <class S>
struct BasicLatticeDistribution {
    int kappa = 0;
    std::map<std::pair<int, std::vector<int>>, S> support;

    S total_mass() const {
        S t{};
        for (const auto& kv : support) t += kv.second;
        return t;
    }
};
using LatticeDistribution = BasicLatticeDistribution<double>;
using LatticeDistributionExact = BasicLatticeDistribution<Rational>;

// Push the joint law forward n steps by exact convolution over the lattice
// window. Follows the model backend.
LatticeDistribution step_distribution(const MarkovModel& model,
                                      const LatticeDistribution& start, int n);
LatticeDistributionExact step_distribution_exact(
    const MarkovModel& model, const LatticeDistributionExact& start, int n);

// Normalized n-step return probability to (s, 0) of the extended chain:
// p^(n)_{(s,0),(s,0)} / mu_s.
double return_probability(const MarkovModel& model, int s, std::int64_t n);
Rational return_probability_exact(const MarkovModel& model, int s,
                                  std::int64_t n);

// u_1 .. u_N in one sweep.
SeqPrefix return_sequence(const MarkovModel& model, int s, std::int64_t N);

// Exact value of m(cap_j T^{-(j k + r_j)} B_j) on the lattice extension,
// where sets has d+1 entries and shifts r has d+1 entries.
double multi_correlation(const MarkovModel& model,
                         const std::vector<CylinderSet>& sets, std::int64_t k,
                         const std::vector<std::int64_t>& shifts);
Rational multi_correlation_exact(const MarkovModel& model,
                                 const std::vector<CylinderSet>& sets,
                                 std::int64_t k,
                                 const std::vector<std::int64_t>& shifts);

// Correlation sums m(cap_j T^{-(j k + r_j)} B_j) for k = 1..n, computed in
// deterministic order; `threads` only affects wall time.
std::vector<double> multi_correlation_sweep(
    const MarkovModel& model, const std::vector<CylinderSet>& sets,
    const std::vector<std::int64_t>& shifts, std::int64_t n, int threads = 1);

// Absolute weak-mixing defect
//   (1/a_d(n)) sum_{k<=n} | m(cap_j T^-(jk+r_j) B_j) - prod m(B_j) u_k^d |.
double rwm_defect(const MarkovModel& model,
                  const std::vector<CylinderSet>& sets, int d,
                  const std::vector<std::int64_t>& shifts, std::int64_t n,
                  int threads = 1);

enum class RecurrenceKind { Recurrent, Dissipative, Inconclusive };

struct RecurrenceVerdict {
    RecurrenceKind kind = RecurrenceKind::Inconclusive;
    double decay_exponent = 0.0;   // fitted p with u_n ~ n^-p
    double exponent_times_d = 0.0;
    bool boundary_case = false;    // p*d landed in the tolerance band
    double dyadic_increment_ratio = 0.0;  // a_d dyadic increments, boundary only
    std::int64_t prefix_length = 0;
    std::string note;
};

// Classifies divergence of sum u_k^d from a fitted decay exponent of u_n
// with a declared tolerance band, refining the boundary p*d ~ 1 by a
// harmonic-growth test on the dyadic increments of a_d.
RecurrenceVerdict recurrence_classify(const MarkovModel& model, int d,
                                      std::int64_t n_max = 0,
                                      double tol = 0.1);

// Smallest n <= n_max with m(A cap T^-n A cap ... cap T^-dn A) > 0.
std::optional<std::int64_t> recurrence_witness(const MarkovModel& model,
                                               const CylinderSet& A, int d,
                                               std::int64_t n_max);

struct AdmissibilityReport {
    BandVerdict band;
    std::vector<std::int64_t> skipped;  // parity obstructions: u(Omega,n) = 0
};

// Band of m(cap_{k<=d} T^-kn Omega) / u(Omega,n)^d over the window, with
// u(Omega,n) = m(Omega cap T^-n Omega)/m(Omega). Points with u = 0 are
// skipped and reported.
AdmissibilityReport admissibility_band(const MarkovModel& model,
                                       const CylinderSet& omega, int d,
                                       IndexRange window, int threads = 1);

// Law of the first return time to the zero fiber, exact taboo DP:
// entry k (1-based) is P(return time = k), k <= n_max. Requires kappa >= 1.
SeqPrefix induced_return_distribution(const MarkovModel& model,
                                      std::int64_t n_max);

}  // namespace erglab
