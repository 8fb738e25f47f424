#pragma once

#include <complex>

#include "magtrace/moebius.hpp"

namespace magtrace {

// Point of the upper half plane {y > 0} with metric (dx^2 + dy^2) / y^2.
struct HPoint {
    double x{0.0}, y{1.0};
    HPoint() = default;
    HPoint(double x_, double y_);  // throws std::invalid_argument unless y > 0
    std::complex<double> z() const { return {x, y}; }
};

// Geodesic polar coordinates about a base point: metric dr^2 + sinh^2 r dphi^2,
// r >= 0, phi normalized to (-pi, pi].
struct PseudospherePoint {
    double r{0.0}, phi{0.0};
    PseudospherePoint() = default;
    PseudospherePoint(double r_, double phi_);  // throws unless r >= 0
};

// Isometry onto the half plane: z = i(1-w)/(1+w), w = tanh(r/2) e^{i phi}.
HPoint pseudosphere_to_halfplane(const PseudospherePoint& p);
// Inverse map (polar coordinates about i); phi of the origin is 0 by convention.
PseudospherePoint halfplane_to_pseudosphere(const HPoint& z);

HPoint apply_isometry(const MoebiusElement& h, const HPoint& z);

// d(z1, z2) = 2 arsinh( |z1 - z2| / (2 sqrt(y1 y2)) ).
double hyperbolic_distance(const HPoint& z1, const HPoint& z2);

// Law of cosines on the pseudosphere:
// cosh d = cosh r1 cosh r2 - sinh r1 sinh r2 cos(phi1 - phi2).
double pseudosphere_distance(const PseudospherePoint& p1, const PseudospherePoint& p2);

// Point at arclength s along the unit-speed geodesic from p with initial
// direction xi (angle from the positive x axis in the tangent plane).
HPoint geodesic_point(const HPoint& p, double xi, double s);

// Hyperbolic radius R of the circular trajectories in the strong-field
// regime: tanh R = sqrt(E0)/B.  Requires 0 < E0 < B^2.
double magnetic_circle_radius(double E0, double B);

// Euclidean realization of the hyperbolic circle of radius R about the
// point (a, lambda): center (a, lambda cosh R), radius lambda sinh R.
struct CircleRealization {
    HPoint center;
    double euclidean_radius{};
};
CircleRealization circle_realization(double R, double lambda, double a);

enum class MagneticRegime { Circle, Horocycle, Hypercycle };

struct RegimeClassification {
    MagneticRegime regime{};
    double kappa_sq{};      // B^2 / E0
    bool near_critical{};   // |kappa_sq - 1| <= 1e-8
};

// Trichotomy by kappa^2 = B^2/E0: >1 circles, =1 horocycles, <1 hypercycles.
// Equality is decided with relative tolerance 1e-12.
RegimeClassification classify_regime(double E0, double B);

const char* regime_name(MagneticRegime r);

}  // namespace magtrace
