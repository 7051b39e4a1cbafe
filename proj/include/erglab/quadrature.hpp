#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace erglab {

// Recursive adaptive Simpson on [a, b]. Throws AccuracyError when the
// refinement depth is exhausted before reaching tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 60);

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int order);

}  // namespace erglab
