#include "magtrace/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "magtrace/util.hpp"

namespace magtrace {

int LaplaceSpectrum::genus() const {
    const double g = area / (4.0 * M_PI) + 1.0;
    const int gi = static_cast<int>(std::lround(g));
    if (std::fabs(g - gi) > 1e-9 || gi < 2)
        throw std::runtime_error("surface area " + format_double(area) +
                                 " is not 4*pi*(g-1) for integer genus g >= 2");
    return gi;
}

long long LaplaceSpectrum::count_upto(double lam) const {
    long long n = 0;
    for (const auto& [l, m] : lambdas)
        if (l <= lam) n += m;
    return n;
}

std::vector<SpectralDatum> interior_eigenvalues(int N, int g) {
    if (N < 1) throw std::invalid_argument("interior_eigenvalues: N < 1");
    if (g < 2) throw std::invalid_argument("interior_eigenvalues: genus < 2");
    std::vector<SpectralDatum> out;
    out.reserve(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        const double nu = (2.0 * k + 1.0) * N - static_cast<double>(k) * (k + 1);
        const long long m = static_cast<long long>(g - 1) * (2LL * N - 2 * k - 1);
        out.push_back({nu, m, SpectralOrigin::Interior, k});
    }
    return out;
}

std::vector<SpectralDatum> continuous_eigenvalues(const LaplaceSpectrum& L, int N) {
    std::vector<SpectralDatum> out;
    out.reserve(L.lambdas.size());
    const double n2 = static_cast<double>(N) * N;
    int l = 0;
    for (const auto& [lam, m] : L.lambdas)
        out.push_back({lam + n2, m, SpectralOrigin::Continuous, l++});
    return out;
}

double lambda_scaled(double nu, int N) {
    if (nu < 0) throw std::invalid_argument("lambda_scaled: nu < 0");
    return std::sqrt(nu + static_cast<double>(N) * N);
}

LaplaceSpectrum load_laplace_spectrum(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spectrum file: " + path);
    LaplaceSpectrum L;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("# provenance:", 0) == 0) {
            L.provenance += line.substr(13) + "\n";
            continue;
        }
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        if (tok == "surface") {
            ss >> L.surface_id;
        } else if (tok == "area") {
            if (!(ss >> L.area))
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": bad area line");
        } else {
            double lam;
            long long mult;
            std::istringstream vs(line);
            if (!(vs >> lam >> mult) || mult < 1 || lam < 0)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected `lambda multiplicity`");
            L.lambdas.emplace_back(lam, mult);
        }
    }
    if (L.lambdas.empty()) throw std::runtime_error(path + ": no eigenvalues");
    if (!std::is_sorted(L.lambdas.begin(), L.lambdas.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw std::runtime_error(path + ": eigenvalues not sorted");
    if (L.lambdas.front().first != 0.0 || L.lambdas.front().second != 1)
        throw std::runtime_error(path + ": missing zero mode lambda_0 = 0 (multiplicity 1)");
    if (!(L.area > 0)) throw std::runtime_error(path + ": missing or non-positive area");
    L.genus();  // validates area quantization
    L.lambda_max = L.lambdas.back().first;

    // Weyl sanity: N(Lambda_max) within 25% of Area/(4 pi) * Lambda_max
    const double predicted = L.area / (4.0 * M_PI) * L.lambda_max;
    const auto counted = static_cast<double>(L.count_upto(L.lambda_max));
    if (predicted > 4.0 && std::fabs(counted - predicted) > 0.25 * predicted)
        throw std::runtime_error(path + ": Weyl-law violation: counted " +
                                 format_double(counted) + " eigenvalues up to " +
                                 format_double(L.lambda_max) + ", predicted " +
                                 format_double(predicted));
    return L;
}

namespace {

using CF = std::function<std::complex<double>(double, double)>;
using C = std::complex<double>;

C dx(const CF& u, double x, double y, double h) {
    return (u(x + h, y) - u(x - h, y)) / (2 * h);
}
C dy(const CF& u, double x, double y, double h) {
    return (u(x, y + h) - u(x, y - h)) / (2 * h);
}

// D_N u = y^2 (u_xx + u_yy) - 2 i N y u_x
C apply_dn(int N, const CF& u, double x, double y, double h) {
    const C uxx = (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h);
    const C uyy = (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h);
    return y * y * (uxx + uyy) - C(0, 2.0 * N * y) * dx(u, x, y, h);
}

// K_N u = (z - conj z) d_z u + N u = 2iy * (u_x - i u_y)/2 + N u
CF apply_kn(int N, const CF& u, double h) {
    return [N, u, h](double x, double y) {
        const C dz = (dx(u, x, y, h) - C(0, 1) * dy(u, x, y, h)) / 2.0;
        return C(0, 2 * y) * dz + static_cast<double>(N) * u(x, y);
    };
}

// L_N u = (conj z - z) d_conj(z) u + N u = -2iy * (u_x + i u_y)/2 + N u
CF apply_ln(int N, const CF& u, double h) {
    return [N, u, h](double x, double y) {
        const C dzb = (dx(u, x, y, h) + C(0, 1) * dy(u, x, y, h)) / 2.0;
        return C(0, -2 * y) * dzb + static_cast<double>(N) * u(x, y);
    };
}

}  // namespace

double maass_identity_residual(int N, const CF& u, double x, double y, double h,
                               bool alt) {
    if (!(h >= 1e-4 && h <= 1e-1))
        throw std::invalid_argument("maass_identity_residual: h outside [1e-4, 1e-1]");
    if (!(y > 0)) throw std::invalid_argument("maass_identity_residual: y <= 0");
    const C lhs = apply_dn(N, u, x, y, h);
    C rhs;
    if (!alt) {
        const CF knu = apply_kn(N, u, h);
        rhs = apply_ln(N + 1, knu, h)(x, y) +
              static_cast<double>(N) * (N + 1) * u(x, y);
    } else {
        const CF lnu = apply_ln(N, u, h);
        rhs = apply_kn(N - 1, lnu, h)(x, y) +
              static_cast<double>(N) * (N - 1) * u(x, y);
    }
    return std::abs(lhs - rhs);
}

}  // namespace magtrace
