#pragma once

namespace erglab {

// Density of the one-sided 1/2-stable law, normalized so that
// E(Z^{-1/2}) = 1 (equivalently, Laplace exponent s^{1/2} / Gamma(3/2)):
//   f(x) = (1/pi) x^{-3/2} exp(-1/(pi x)),  x > 0.
double stable_half_density(double x);

// Quadrature of the weighted mass integral over [c, d] of f(x) x^{-1/2} dx.
// Tends to 1 as c -> 0 and d -> infinity.
double stable_density_check(double c, double d, double tol = 1e-9);

}  // namespace erglab
