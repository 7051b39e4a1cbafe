#pragma once

// Disk-model hyperbolic plane: points, line elements, unit-determinant
// Mobius maps, the geodesic flow, and the exact ball / angle-window
// formulas used by the orbital sums. Angles are radians throughout; the
// fiber measure on the circle is d(theta) over [0, 2*pi).

#include <complex>

namespace erglab {

using Complex = std::complex<double>;

struct DiskPoint {
    Complex z;
};
// throws std::domain_error when |z| >= 1 - 1e-12
DiskPoint disk_point(Complex z);

struct LineElement {
    Complex base;
    double angle = 0.0;  // [0, 2*pi)
};
double normalize_angle(double a);

// rho(x, y) = 2 atanh( |x-y| / |1 - conj(x) y| )
double hyp_dist(DiskPoint x, DiskPoint y);

// Matrix (a, b; conj b, conj a) with |a|^2 - |b|^2 = 1, acting by
// z -> (a z + b) / (conj(b) z + conj(a)).
class MobiusMap {
public:
    MobiusMap() : a_(1.0), b_(0.0) {}
    MobiusMap(Complex a, Complex b);

    static MobiusMap identity() { return MobiusMap(); }
    // phi_z: the translation taking 0 to z along their common geodesic
    static MobiusMap translation_to(Complex z);
    static MobiusMap rotation(double alpha);
    // hyperbolic translation through 0 along direction `axis_angle` with
    // translation length `length`
    static MobiusMap axis_translation(double length, double axis_angle);

    Complex a() const { return a_; }
    Complex b() const { return b_; }

    Complex apply(Complex z) const;
    DiskPoint apply(DiskPoint p) const { return DiskPoint{apply(p.z)}; }
    LineElement apply(LineElement w) const;

    MobiusMap compose(const MobiusMap& rhs) const;  // this after rhs
    MobiusMap inverse() const { return MobiusMap(std::conj(a_), -b_); }

    double det_error() const;
    void renormalize();

private:
    Complex a_, b_;
};

// Flow the line element distance t along its directed geodesic.
LineElement geodesic_flow(LineElement w, double t);

// Direction reversal: angle + pi.
LineElement direction_reverse(LineElement w);

struct EuclidBall {
    Complex center;
    double radius = 0.0;
};

// Euclidean center/radius of the hyperbolic ball around w of radius eta.
// Throws when the ball touches the unit circle.
EuclidBall ball_euclid(DiskPoint w, double eta);

// Hyperbolic area of a ball of radius eta: 4 pi sinh^2(eta/2).
double ball_area(double eta);

// Length of the angle interval subtended at 0 by the ball around w;
// requires 0 outside the ball.
double lambda_len(DiskPoint w, double eta);

// Length of { theta : tanh(s/2) e^{i theta} inside the ball around w }.
double j_len(DiskPoint w, double eta, double s);

}  // namespace erglab
