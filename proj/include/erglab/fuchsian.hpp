#pragma once

// Fuchsian group word enumeration with canonical-matrix deduplication,
// certified annulus sums, and the ball-correlation integrals of the
// geodesic-flow correlation estimates.

#include "erglab/hyperbolic.hpp"
#include "erglab/seq.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace erglab {

// Generators come in inverse-closed pairs: index 2k is the k-th generator,
// index 2k+1 its inverse. The abelianization image counts signed letters
// per pair.
class FuchsianGroup {
public:
    FuchsianGroup(std::vector<MobiusMap> generator_pairs,
                  std::optional<std::vector<int>> relator, std::string name);

    int num_pairs() const { return static_cast<int>(pairs_.size()); }
    int num_letters() const { return static_cast<int>(letters_.size()); }
    // even index 2k: k-th generator; odd 2k+1: its inverse
    const MobiusMap& letter(int i) const { return letters_.at(i); }
    static int inverse_letter(int i) { return i ^ 1; }
    const std::optional<std::vector<int>>& relator() const { return relator_; }
    const std::string& name() const { return name_; }
    double relator_residual() const;  // distance of relator product to +-id

    // rank-2 free group acting by two orthogonal axis translations
    static FuchsianGroup schottky();
    // genus-2 surface group from the regular octagon (vertex angle pi/4),
    // opposite sides paired by rotated copies of one axis translation
    static FuchsianGroup octagon();

private:
    std::vector<MobiusMap> pairs_;
    std::vector<MobiusMap> letters_;
    std::optional<std::vector<int>> relator_;
    std::string name_;
};

struct GroupElement {
    MobiusMap map;
    std::vector<int> word;             // letters, minimal length (BFS)
    int length = 0;
    std::vector<std::int64_t> theta;   // signed letter counts per pair
};

// All distinct elements of word length <= max_len, BFS order with rounded
// canonical-matrix dedup and a near-collision audit.
struct Enumeration {
    std::vector<GroupElement> elements;  // sorted by (length, word)
    int max_len = 0;
    std::vector<double> orbit_dist;      // rho(0, gamma(0)) per element
    // empirical two-sided band of rho(0, gamma 0)/length over nontrivial
    // elements; the lower edge certifies annulus completeness
    double ratio_low = 0.0, ratio_high = 0.0;

    // largest distance t for which every group element with
    // rho(0,gamma 0) <= t is guaranteed enumerated
    double certified_distance() const {
        return ratio_low * (max_len + 1);
    }
};

Enumeration enumerate_group(const FuchsianGroup& G, int max_len);

BandVerdict word_metric_band(const Enumeration& E);

// Surjection onto Z^kappa given by integer rows applied to the
// abelianization vector.
struct ThetaMap {
    std::vector<std::vector<std::int64_t>> rows;  // kappa rows
    int kappa() const { return static_cast<int>(rows.size()); }
    bool in_kernel(const std::vector<std::int64_t>& v) const;
};

// sum of e^{-rho(x, gamma x)} over enumerated gamma with
// rho(x, gamma x) in [t - eps, t + eps], optionally restricted to Ker Theta.
// Throws CoverageError when the annulus is not certified complete.
double orbital_sum(const Enumeration& E, DiskPoint x, double t, double eps,
                   const std::optional<ThetaMap>& kernel_constraint);

// m(Delta(x,eps) cap flow^{-s} Delta(x,eps)) by tensor Gauss quadrature of
// the angle-window sum over the ball, refined until `rel_tol`.
double correlation_integral(const Enumeration& E, DiskPoint x, double eps,
                            double s, double rel_tol = 1e-6);

struct GeodesicCorrelation {
    double lhs = 0.0;          // p-fold intersection measure
    double rhs_product = 1.0;  // product of pair correlations at 4 eps
    double ratio = 0.0;
};

// p-fold correlation m(cap_j flow^{-t_j} Delta(x,eps)) with t_j the prefix
// sums of `gaps`, against the product bound at radius 4 eps.
GeodesicCorrelation multi_correlation_geodesic(const Enumeration& E,
                                               DiskPoint x, double eps,
                                               const std::vector<double>& gaps,
                                               double rel_tol = 1e-6);

struct CoverCount {
    std::vector<double> t;
    std::vector<double> value;  // t^{kappa/2} * kernel-restricted annulus sum
};

CoverCount cover_counting(const Enumeration& E, const ThetaMap& theta,
                          const std::vector<double>& t_grid, double eps);

}  // namespace erglab
