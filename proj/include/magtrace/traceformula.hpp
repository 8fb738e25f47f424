#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "magtrace/fuchsian.hpp"
#include "magtrace/spectrum.hpp"
#include "magtrace/testfn.hpp"
#include "magtrace/util.hpp"

// Semiclassical side of the laboratory: the spectral sum
//   Y_N(phi) = sum_j m_j phi(sqrt(nu_j + N^2) - E N)
// and the closed-form coefficients of its large-N expansion
//   Y_N(phi) ~ sum_j c_j(N, phi) N^{1-j}
// in the three dynamical regimes of the energy parameter E:
// 1 < E < sqrt(2) (closed circle orbits), E = sqrt(2) (horocyclic, no closed
// orbits), E > sqrt(2) (hypercycles shadowing closed geodesics).

namespace magtrace {

enum class Regime { Subcritical, Critical, Supercritical };

struct EnergyRegime {
    double E;
    Regime regime;
    bool near_critical;  // within 1e-8 of the threshold but not classified critical

    static EnergyRegime classify(double E);  // threshold band 1e-12
};

const char* regime_label(Regime r);

// Geometric data of the k-th iterate of a closed orbit lying over a
// primitive conjugacy class (E > sqrt(2) regime).
struct OrbitContribution {
    ConjugacyClassRecord class_ref;
    int k = 1;                 // iterate, nonzero
    double T_primitive = 0.0;  // E/sqrt(E^2-2) * length
    double det_factor = 0.0;   // |N(h)^{k/2} - N(h)^{-k/2}|
    int maslov = 0;
    double action = 0.0;       // k * length * sqrt(E^2-2)
    double holonomy = 0.0;     // -T/E with T = k * T_primitive
};

OrbitContribution orbit_contribution(const ConjugacyClassRecord& rec, int k, double E);

struct CoefficientReport {
    std::complex<double> c0{0.0, 0.0};
    std::complex<double> c1{0.0, 0.0};
    // supercritical: per-(orbit, iterate) term values
    std::vector<std::pair<OrbitContribution, std::complex<double>>> orbit_breakdown;
    // subcritical: per-k term values of the c1 sum
    std::vector<std::pair<int, std::complex<double>>> k_breakdown;
    int k_max_used = 0;
    double tail_bound = 0.0;  // magnitude estimate of the first omitted term
};

// ---- exact spectral sum ---------------------------------------------------

// Deterministic (pairwise-summed) evaluation of Y_N over the given data.
// The continuous series beyond its largest ingested nu is bounded through
// the eigenvalue-counting law and the decay certificate of phi; if that
// bound exceeds tail_tol the sum is refused.
double Y_N_exact(const std::vector<SpectralDatum>& interior,
                 const std::vector<SpectralDatum>& continuous, double E, int N,
                 const TestFunctionPair& phi, double tail_tol);

// ---- coefficients ---------------------------------------------------------

// Zero-period (Weyl) term (2g-2) E phi_hat(0); the underlying phase-space
// volume Vol(X_E) = (2pi)^2 (2g-2) E is exposed for diagnostics.
double weyl_term(double E, int g, double phi_hat_at_0);
double energy_shell_volume(double E, int g);

// 1 < E < sqrt(2).  c0 and c1 as oscillatory k-sums with frequencies
// omega_k = 2 pi k E / sqrt(2-E^2) and phases exp(ik pi + 2 pi i k
// sqrt(2-E^2) N).  This is the half-integer Poisson form whose residuals
// Y_N - c0 N - c1 decay at order N^{-1} (see tests):
//   c1 = (2g-2) i phi_hat'(0)
//      + sum_{k != 0} (2g-2) [ i phi_hat'(omega_k)
//                              + (pi i k E / (4 sqrt(2-E^2))) phi_hat(omega_k)
//                              + (2 pi i k E / (2-E^2)^{3/2}) phi_hat''(omega_k) ]
//        * exp(ik pi) exp(2 pi i k sqrt(2-E^2) N).
std::complex<double> c0_subcritical(int N, double E, int g, const TestFunctionPair& phi,
                                    int k_max);
CoefficientReport coefficients_subcritical(int N, double E, int g,
                                           const TestFunctionPair& phi, int k_max = 64);

// Alternative closed form of c1 that circulates for this expansion: doubled
// first-derivative weight and an extra factor i on the second-derivative
// term.  Kept for comparison; its residual stalls at order N^0 whenever
// phi_hat'(0) != 0 (demonstrated in the tests).  c0 is identical.
CoefficientReport coefficients_subcritical_alt(int N, double E, int g,
                                               const TestFunctionPair& phi, int k_max = 64);

// E > sqrt(2), supp phi_hat compact with 0 excluded (hat_gap > 0): the pure
// orbit sum.  c0 = 0 on this side; c1 sums (T#/(2 pi det_factor))
// exp(-i N action) phi_hat(k T#) over primitive classes and iterates.
// The class list must be certified exhaustive up to the norm window implied
// by the support of phi_hat.
CoefficientReport c1_supercritical(int N, double E, const ClassList& classes,
                                   const TestFunctionPair& phi);

// E = sqrt(2): c0 = (2g-2) sqrt(2) phi_hat(0) and every higher coefficient
// vanishes (the horocyclic flow has no closed trajectories).
CoefficientReport coefficients_critical(int g, const TestFunctionPair& phi);

// E > sqrt(2) -> (E/sqrt(2), psi) with psi(t) = phi(sqrt(2) t): maps the
// continuous-series sum onto the spectral sum of the scaled base Laplacian,
// through the exact identity
//   phi(sqrt(lambda + 2N^2) - E N) = psi(sqrt(lambda/2 + N^2) - (E/sqrt(2)) N).
std::pair<double, TestFunctionPair> reduction_map(double E, const TestFunctionPair& phi);

// ---- residual order fits --------------------------------------------------

struct ResidualFit {
    std::vector<int> Ns;
    std::vector<double> Y;
    std::vector<double> r0, r1;     // Y - c0 N   and   Y - c0 N - c1
    LineFit fit0{}, fit1{};         // log|r_j| vs log N
    bool exact0 = false, exact1 = false;  // residual identically ~ 0
};

// c0_of_N / c1_of_N absorb the oscillatory N-dependence of the coefficients.
ResidualFit residual_analysis(const std::function<double(int)>& Y_of_N,
                              const std::function<std::complex<double>(int)>& c0_of_N,
                              const std::function<std::complex<double>(int)>& c1_of_N,
                              const std::vector<int>& N_list);

// Startup lock of the Fourier convention: checks on a Gaussian that
// (2pi)^{-2} phi_hat(0) Vol(X_E) == (2g-2) E phi_hat(0) and that the pair
// reproduces phi from phi_hat.  Throws NumericalError on mismatch.
void assert_weyl_convention();

}  // namespace magtrace
