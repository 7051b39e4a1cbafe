#pragma once

#include "erglab/markov.hpp"
#include "erglab/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace erglab {

struct Fraction {
    std::int64_t p = 0;
    std::int64_t q = 1;  // reduced, q >= 1
};

// All reduced fractions in [0,1] with denominator <= d, increasing.
struct FareySeq {
    int d = 1;
    std::vector<Fraction> fractions;
};
FareySeq farey_sequence(int d);

// A bijection (1..2d) -> {1..d} x {0,1} that sorts the gap-count values
// N_{(k,l)}(kappa, eps) = (1-eps) kappa k + eps kappa l for every slope k/l
// in its half-open interval. Ties are broken (eps, kappa)-lexicographically;
// "orders" below always means this canonical tie-broken order.
struct OrderingBijection {
    int d = 1;
    std::vector<std::pair<int, int>> pairs;  // (kappa_j, eps_j)
    Fraction slope_lo, slope_hi;             // interval (lo, hi]
};

// Ordering for the j-th Farey interval (r_j, r_{j+1}], 0 <= j < N_d,
// constructed by sorting at the right-endpoint representative.
OrderingBijection build_ordering(int d, int j);

// Whether pi equals the canonical order at the concrete pair (k, l).
bool orders_pair(const OrderingBijection& pi, std::int64_t k, std::int64_t l);

struct OrderingCheck {
    bool ok = false;
    // first (k, l) violating the iff, when not ok
    std::optional<std::pair<std::int64_t, std::int64_t>> counterexample;
};

// Brute-force check over 1 <= k <= l <= bound that pi orders the pair iff
// k/l lies in pi's slope interval.
OrderingCheck verify_ordering_domain(const OrderingBijection& pi,
                                     std::int64_t bound);

// Consecutive differences of the sorted gap-count values, as vectors acting
// on (k, l), together with a perfect matching into linearly independent
// pairs.
struct StepVectors {
    std::vector<std::array<std::int64_t, 2>> vectors;    // a_1 .. a_{2d}
    std::vector<std::pair<int, int>> pairing;            // indices into vectors
};
StepVectors step_vectors(const OrderingBijection& pi);

// Moments of the multiple-return counting function
//   psi_n = sum_{k<=n} prod_{i<=nu} 1_Omega o T^{-ik} *
//                      prod_{j<=d-nu} 1_Omega o T^{jk}
// over Omega, by exact DP with return kernels between time anchors.
// Omega members must be fibered cylinders with words of length <= 1.
struct PsiMoments {
    double first_moment = 0.0;
    double second_moment = 0.0;
    double a_d_n = 0.0;  // sum_{k<=n} u(Omega,k)^d
};
PsiMoments psi_moments(const MarkovModel& model, const CylinderSet& omega,
                       int d, int nu, std::int64_t n);

struct PsiMomentsExact {
    Rational first_moment;
    Rational second_moment;
    Rational a_d_n;
};
PsiMomentsExact psi_moments_exact(const MarkovModel& model,
                                  const CylinderSet& omega, int d, int nu,
                                  std::int64_t n);

}  // namespace erglab
