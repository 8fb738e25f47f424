#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace magtrace {

// A Schwartz-class test function phi together with its Fourier transform
// under the fixed convention  phi_hat(xi) = integral phi(t) e^{-i xi t} dt.
// Both directions are evaluable; the first two derivatives of phi_hat are
// supplied because the subcritical coefficient formulas consume them.
struct TestFunctionPair {
    std::function<std::complex<double>(double)> phi;
    std::function<std::complex<double>(double)> phi_hat;
    std::function<std::complex<double>(double)> phi_hat_d1;
    std::function<std::complex<double>(double)> phi_hat_d2;
    std::optional<std::array<double, 2>> support_hat;  // compact support of phi_hat
    double hat_gap{0.0};  // phi_hat vanishes identically on (-hat_gap, hat_gap)
    bool real_valued{true};                            // phi real on the real line
    std::string kind;

    // Decay certificate |phi(t)| <= C_m (1+|t|)^{-m}, estimated numerically
    // at construction for m = 0..4.
    std::array<double, 5> decay_c{};

    // Optional sharper majorant: sup_tail(x) >= sup_{|t| >= x} |phi(t)|,
    // nonincreasing.  Present on pairs with closed-form decay (Gaussians);
    // consumers fall back to decay_c when absent.
    std::function<double(double)> sup_tail;

    std::complex<double> operator()(double t) const { return phi(t); }
};

// phi(t) = exp(-t^2/(2 sigma^2)),  phi_hat(xi) = sigma sqrt(2 pi) exp(-sigma^2 xi^2/2).
TestFunctionPair gaussian_pair(double sigma);

// phi_hat = mollifier bump exp(-1/(1-u^2)) rescaled to [center +- half_width],
// mirrored to negative frequencies when symmetrize is set (making phi real).
// phi is evaluated by adaptive quadrature of the inverse transform with a
// build-then-freeze interpolation cache (absolute error budget 1e-9).
TestFunctionPair bump_hat_pair(double center, double half_width, bool symmetrize = true);

// psi(t) = phi(s t), psi_hat(xi) = (1/s) phi_hat(xi/s).
TestFunctionPair scale_pair(const TestFunctionPair& p, double s);

// Spot-check the convention: (1/2pi) integral phi_hat(xi) e^{+i xi t} dxi
// must reproduce phi(t) at `npoints` sample points to tolerance `tol`.
// Throws NumericalError on failure.
void verify_fourier_convention(const TestFunctionPair& p, int npoints = 20,
                               double tol = 1e-8);

// Adaptive Gauss-Kronrod 7-15 quadrature on [a, b] (absolute tolerance).
std::complex<double> integrate_gk(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth = 28);

}  // namespace magtrace
