#include "magtrace/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magtrace/util.hpp"

namespace magtrace {

namespace {

// Canonical sign: first entry of (a, b, c, d) that is nonzero must be positive.
void canonicalize(double& a, double& b, double& c, double& d) {
    double lead = a;
    if (lead == 0.0) lead = b;
    if (lead == 0.0) lead = c;
    if (lead == 0.0) lead = d;
    if (lead < 0.0) { a = -a; b = -b; c = -c; d = -d; }
}

}  // namespace

MoebiusElement::MoebiusElement(double a_, double b_, double c_, double d_)
    : a(a_), b(b_), c(c_), d(d_) {
    const double dt = det();
    if (!(dt > 0.0) || dt < 0.25 || dt > 4.0)
        throw std::invalid_argument("MoebiusElement: determinant " + format_double(dt) +
                                    " not a small perturbation of 1");
    if (std::fabs(dt - 1.0) > 1e-15) {
        const double s = 1.0 / std::sqrt(dt);
        a *= s; b *= s; c *= s; d *= s;
    }
    canonicalize(a, b, c, d);
}

MoebiusElement MoebiusElement::inverse() const {
    return MoebiusElement(d, -b, -c, a);
}

std::complex<double> MoebiusElement::apply(std::complex<double> z) const {
    return (a * z + b) / (c * z + d);
}

double MoebiusElement::displacement() const {
    const double q = 0.5 * (a * a + b * b + c * c + d * d);
    return std::acosh(std::max(q, 1.0));
}

double MoebiusElement::dist(const MoebiusElement& o) const {
    const double plus = std::max({std::fabs(a - o.a), std::fabs(b - o.b),
                                  std::fabs(c - o.c), std::fabs(d - o.d)});
    const double minus = std::max({std::fabs(a + o.a), std::fabs(b + o.b),
                                   std::fabs(c + o.c), std::fabs(d + o.d)});
    return std::min(plus, minus);
}

std::string MoebiusElement::str() const {
    return "[" + format_double(a) + " " + format_double(b) + "; " +
           format_double(c) + " " + format_double(d) + "]";
}

MoebiusElement operator*(const MoebiusElement& g, const MoebiusElement& h) {
    return MoebiusElement(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
                          g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d);
}

MoebiusElement axis_translation(double t) {
    return MoebiusElement(std::cosh(t / 2), std::sinh(t / 2),
                          std::sinh(t / 2), std::cosh(t / 2));
}

MoebiusElement rotation_about_i(double psi) {
    return MoebiusElement(std::cos(psi / 2), std::sin(psi / 2),
                          -std::sin(psi / 2), std::cos(psi / 2));
}

}  // namespace magtrace
