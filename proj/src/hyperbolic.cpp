#include "erglab/hyperbolic.hpp"

#include <cmath>
#include <stdexcept>

namespace erglab {

namespace {
constexpr double kBoundaryGuard = 1e-12;
}

DiskPoint disk_point(Complex z) {
    if (std::abs(z) >= 1.0 - kBoundaryGuard)
        throw std::domain_error("point not inside the disk");
    return DiskPoint{z};
}

double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0) a += 2.0 * M_PI;
    if (a >= 2.0 * M_PI) a = 0.0;
    return a;
}

double hyp_dist(DiskPoint x, DiskPoint y) {
    if (std::abs(x.z) >= 1.0 - kBoundaryGuard ||
        std::abs(y.z) >= 1.0 - kBoundaryGuard)
        throw std::domain_error("distance undefined on the boundary");
    double num = std::abs(x.z - y.z);
    double den = std::abs(1.0 - std::conj(x.z) * y.z);
    return 2.0 * std::atanh(num / den);
}

MobiusMap::MobiusMap(Complex a, Complex b) : a_(a), b_(b) {
    if (std::abs(std::norm(a_) - std::norm(b_) - 1.0) > 1e-8)
        throw std::domain_error("matrix not unit determinant");
}

MobiusMap MobiusMap::translation_to(Complex z) {
    double n = std::norm(z);
    if (n >= 1.0) throw std::domain_error("translation target outside disk");
    double s = 1.0 / std::sqrt(1.0 - n);
    return MobiusMap(Complex(s, 0.0), z * s);
}

MobiusMap MobiusMap::rotation(double alpha) {
    return MobiusMap(std::polar(1.0, alpha / 2.0), Complex(0.0, 0.0));
}

MobiusMap MobiusMap::axis_translation(double length, double axis_angle) {
    double c = std::cosh(length / 2.0), s = std::sinh(length / 2.0);
    return MobiusMap(Complex(c, 0.0), std::polar(s, axis_angle));
}

Complex MobiusMap::apply(Complex z) const {
    return (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_));
}

LineElement MobiusMap::apply(LineElement w) const {
    // derivative 1/(conj(b) z + conj(a))^2 rotates the tangent
    Complex denom = std::conj(b_) * w.base + std::conj(a_);
    LineElement out;
    out.base = (a_ * w.base + b_) / denom;
    out.angle = normalize_angle(w.angle - 2.0 * std::arg(denom));
    return out;
}

MobiusMap MobiusMap::compose(const MobiusMap& rhs) const {
    Complex a = a_ * rhs.a_ + b_ * std::conj(rhs.b_);
    Complex b = a_ * rhs.b_ + b_ * std::conj(rhs.a_);
    MobiusMap out;
    out.a_ = a;
    out.b_ = b;
    return out;
}

double MobiusMap::det_error() const {
    return std::abs(std::norm(a_) - std::norm(b_) - 1.0);
}

void MobiusMap::renormalize() {
    double d = std::sqrt(std::norm(a_) - std::norm(b_));
    a_ /= d;
    b_ /= d;
}

LineElement geodesic_flow(LineElement w, double t) {
    Complex step = std::polar(std::tanh(t / 2.0), w.angle);
    Complex denom = 1.0 + std::conj(w.base) * step;
    LineElement out;
    out.base = (w.base + step) / denom;
    out.angle = normalize_angle(w.angle - 2.0 * std::arg(denom));
    return out;
}

LineElement direction_reverse(LineElement w) {
    return LineElement{w.base, normalize_angle(w.angle + M_PI)};
}

EuclidBall ball_euclid(DiskPoint w, double eta) {
    if (!(eta > 0)) throw std::domain_error("need eta > 0");
    double delta = std::tanh(eta / 2.0);
    double n = std::norm(w.z);
    double denom = 1.0 - delta * delta * n;
    EuclidBall ball;
    ball.center = (1.0 - delta * delta) * w.z / denom;
    ball.radius = delta * (1.0 - n) / denom;
    if (std::abs(ball.center) + ball.radius >= 1.0 - kBoundaryGuard)
        throw std::domain_error("ball touches the boundary");
    return ball;
}

double ball_area(double eta) {
    double s = std::sinh(eta / 2.0);
    return 4.0 * M_PI * s * s;
}

double lambda_len(DiskPoint w, double eta) {
    if (hyp_dist(DiskPoint{Complex(0, 0)}, w) <= eta)
        throw std::domain_error("origin inside the ball");
    double delta = std::tanh(eta / 2.0);
    double arg = (1.0 - std::norm(w.z)) * delta /
                 (std::abs(w.z) * (1.0 - delta * delta));
    if (arg > 1.0) arg = 1.0;
    return 2.0 * std::asin(arg);
}

double j_len(DiskPoint w, double eta, double s) {
    if (!(s > 0)) throw std::domain_error("need s > 0");
    EuclidBall ball = ball_euclid(w, eta);
    double R = std::tanh(s / 2.0);
    double C = std::abs(ball.center);
    if (C == 0.0) return R < ball.radius ? 2.0 * M_PI : 0.0;
    double cosv =
        (R * R + C * C - ball.radius * ball.radius) / (2.0 * R * C);
    if (cosv >= 1.0) return 0.0;
    if (cosv <= -1.0) return 2.0 * M_PI;
    return 2.0 * std::acos(cosv);
}

}  // namespace erglab
