#include "erglab/stable.hpp"

#include "erglab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace erglab {

double stable_half_density(double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(-1.0 / (M_PI * x)) / (M_PI * std::pow(x, 1.5));
}

double stable_density_check(double c, double d, double tol) {
    if (!(c > 0.0) || d < c)
        throw std::domain_error("need 0 < c <= d");
    if (c == d) return 0.0;
    // log substitution x = e^y tames both endpoints; the transformed
    // integrand (1/pi) e^{-y} exp(-e^{-y}/pi) is smooth and integrable
    auto g = [](double y) {
        double e = std::exp(-y);
        return e * std::exp(-e / M_PI) / M_PI;
    };
    return adaptive_simpson(g, std::log(c), std::log(d), tol);
}

}  // namespace erglab
