#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

// Quantum side: the exact point spectrum of the magnetic Laplacian on a
// genus-g surface at integer field strength N splits into
//   interior:   nu = (2k+1)N - k(k+1), k = 0..N-1, multiplicity (g-1)(2N-2k-1)
//   continuous: nu = lambda_l + N^2, lambda_l the base Laplace eigenvalues.
// Both live on one nu-axis (nu = -d + N^2 where d is the eigenvalue of the
// lowered operator D_N below); the scaled variable is sqrt(nu + N^2).

namespace magtrace {

enum class SpectralOrigin { Interior, Continuous };

struct SpectralDatum {
    double nu = 0.0;        // eigenvalue of the magnetic Laplacian
    long long multiplicity = 1;
    SpectralOrigin origin = SpectralOrigin::Interior;
    int index = 0;          // Landau index k, or base-eigenvalue index l
};

struct LaplaceSpectrum {
    std::string surface_id;
    double area = 0.0;                            // = 4*pi*(g-1)
    std::string provenance;                       // preserved "provenance:" lines
    double lambda_max = 0.0;                      // completeness cutoff
    std::vector<std::pair<double, long long>> lambdas;  // sorted (lambda, mult)

    int genus() const;                            // from area = 4*pi*(g-1)
    long long count_upto(double lam) const;       // sum of multiplicities <= lam
};

// Landau levels; exactly N data, nu in [N, N^2], total multiplicity (g-1)N^2.
std::vector<SpectralDatum> interior_eigenvalues(int N, int g);

// nu = lambda_l + N^2 with multiplicities carried over, tagged Continuous(l).
std::vector<SpectralDatum> continuous_eigenvalues(const LaplaceSpectrum& L, int N);

// scaled eigenvalue sqrt(nu + N^2) >= N
double lambda_scaled(double nu, int N);

// Text format: `surface <id>`, `area <value>`, then `lambda multiplicity`
// lines; '#' comments; '# provenance:' lines are preserved. Requires
// lambda_0 = 0 (multiplicity 1) and a counting function within 25% of the
// Weyl prediction Area/(4pi) * Lambda_max.
LaplaceSpectrum load_laplace_spectrum(const std::string& path);

// Finite-difference residual of the raising/lowering factorization of
//   D_N = y^2(d^2_x + d^2_y) - 2iNy d_x
// against L_{N+1}K_N + N(N+1) (alt = false) or K_{N-1}L_N + N(N-1)
// (alt = true), where K_N = (z - conj z) d_z + N and L_N = (conj z - z)
// d_conj(z) + N. Central differences of step h; residual is O(h^2).
double maass_identity_residual(int N,
                               const std::function<std::complex<double>(double, double)>& u,
                               double x, double y, double h, bool alt = false);

}  // namespace magtrace
