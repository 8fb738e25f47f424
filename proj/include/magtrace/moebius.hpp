#pragma once

#include <complex>
#include <string>

namespace magtrace {

// Element of PSL(2, R): a real 2x2 matrix of determinant one, taken modulo
// overall sign.  The stored representative is canonicalized so that the
// first nonzero entry of (a, b, c, d) is positive.
struct MoebiusElement {
    double a{1.0}, b{0.0}, c{0.0}, d{1.0};

    MoebiusElement() = default;
    // Accepts any matrix with positive determinant; rescales to det = 1 and
    // canonicalizes the sign.  Throws std::invalid_argument if det <= 0 or
    // wildly far from 1 (which indicates a logic error upstream).
    MoebiusElement(double a, double b, double c, double d);

    static MoebiusElement identity() { return {}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    MoebiusElement inverse() const;

    // Fractional-linear action on the upper half plane.
    std::complex<double> apply(std::complex<double> z) const;

    // Hyperbolic displacement of the base point i:  cosh d(i, g i) =
    // (a^2 + b^2 + c^2 + d^2) / 2.
    double displacement() const;

    // Max-norm distance between representatives, minimized over sign.
    double dist(const MoebiusElement& o) const;
    bool approx_equal(const MoebiusElement& o, double tol = 1e-9) const {
        return dist(o) <= tol;
    }

    std::string str() const;
};

MoebiusElement operator*(const MoebiusElement& g, const MoebiusElement& h);

// Hyperbolic translation by t along the geodesic through i that meets the
// real axis at -1 and +1 (the matrix [[cosh t/2, sinh t/2], [sinh t/2, cosh t/2]]).
MoebiusElement axis_translation(double t);

// Rotation by angle psi about the point i (elliptic element K(psi)).
MoebiusElement rotation_about_i(double psi);

}  // namespace magtrace
