#include "magtrace/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "magtrace/util.hpp"

namespace magtrace {

HPoint::HPoint(double x_, double y_) : x(x_), y(y_) {
    if (!(y > 0.0))
        throw std::invalid_argument("HPoint: y must be positive, got " + format_double(y));
}

PseudospherePoint::PseudospherePoint(double r_, double phi_)
    : r(r_), phi(normalize_angle(phi_)) {
    if (!(r >= 0.0))
        throw std::invalid_argument("PseudospherePoint: r must be >= 0, got " + format_double(r));
}

HPoint pseudosphere_to_halfplane(const PseudospherePoint& p) {
    // w = tanh(r/2) e^{i phi} is the Poincare-disk coordinate; z = i(1-w)/(1+w).
    const std::complex<double> w = std::tanh(p.r / 2) * std::polar(1.0, p.phi);
    const std::complex<double> z = std::complex<double>(0, 1) * (1.0 - w) / (1.0 + w);
    return HPoint(z.real(), z.imag());
}

PseudospherePoint halfplane_to_pseudosphere(const HPoint& zp) {
    const std::complex<double> i(0, 1);
    const std::complex<double> w = (i - zp.z()) / (i + zp.z());
    const double aw = std::abs(w);
    if (aw < 1e-300) return PseudospherePoint(0.0, 0.0);
    return PseudospherePoint(2.0 * artanh_checked(aw), std::arg(w));
}

HPoint apply_isometry(const MoebiusElement& h, const HPoint& z) {
    const std::complex<double> im = h.apply(z.z());
    return HPoint(im.real(), im.imag());
}

double hyperbolic_distance(const HPoint& z1, const HPoint& z2) {
    const double dx = z1.x - z2.x, dy = z1.y - z2.y;
    const double q = std::sqrt(dx * dx + dy * dy) / (2.0 * std::sqrt(z1.y * z2.y));
    return 2.0 * std::asinh(q);
}

double pseudosphere_distance(const PseudospherePoint& p1, const PseudospherePoint& p2) {
    const double ch = std::cosh(p1.r) * std::cosh(p2.r) -
                      std::sinh(p1.r) * std::sinh(p2.r) * std::cos(p1.phi - p2.phi);
    return std::acosh(std::max(ch, 1.0));
}

HPoint geodesic_point(const HPoint& p, double xi, double s) {
    // Move p to i and xi to "straight up", ride the imaginary axis, move back.
    // N(x) A(y) carries i to p; a rotation about i by (xi - pi/2) then aligns
    // the direction.  The vertical geodesic through i is t -> i e^t.
    const double sy = std::sqrt(p.y);
    const MoebiusElement to_p(sy, p.x / sy, 0.0, 1.0 / sy);  // z -> y*z + x
    const MoebiusElement g = to_p * rotation_about_i(xi - M_PI / 2);
    return apply_isometry(g, HPoint(0.0, std::exp(s)));
}

double magnetic_circle_radius(double E0, double B) {
    if (!(E0 > 0.0) || !(B > 0.0))
        throw std::invalid_argument("magnetic_circle_radius: need E0 > 0 and B > 0");
    if (E0 >= B * B)
        throw std::invalid_argument("no circular trajectories above critical ratio");
    return artanh_checked(std::sqrt(E0) / B);
}

CircleRealization circle_realization(double R, double lambda, double a) {
    if (!(R > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("circle_realization: need R > 0 and lambda > 0");
    return {HPoint(a, lambda * std::cosh(R)), lambda * std::sinh(R)};
}

RegimeClassification classify_regime(double E0, double B) {
    if (!(E0 > 0.0) || !(B > 0.0))
        throw std::invalid_argument("classify_regime: need E0 > 0 and B > 0");
    RegimeClassification out;
    out.kappa_sq = B * B / E0;
    const double dev = out.kappa_sq - 1.0;
    out.near_critical = std::fabs(dev) <= 1e-8;
    if (std::fabs(dev) <= 1e-12)
        out.regime = MagneticRegime::Horocycle;
    else
        out.regime = dev > 0 ? MagneticRegime::Circle : MagneticRegime::Hypercycle;
    return out;
}

const char* regime_name(MagneticRegime r) {
    switch (r) {
        case MagneticRegime::Circle: return "circle";
        case MagneticRegime::Horocycle: return "horocycle";
        case MagneticRegime::Hypercycle: return "hypercycle";
    }
    return "?";
}

}  // namespace magtrace
