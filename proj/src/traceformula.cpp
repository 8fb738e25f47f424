#include "magtrace/traceformula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace magtrace {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
using C = std::complex<double>;
}  // namespace

EnergyRegime EnergyRegime::classify(double E) {
    if (!(E > 1.0)) throw std::invalid_argument("energy parameter must exceed 1");
    EnergyRegime r{E, Regime::Critical, false};
    if (std::fabs(E - kSqrt2) <= 1e-12)
        r.regime = Regime::Critical;
    else if (E < kSqrt2)
        r.regime = Regime::Subcritical;
    else
        r.regime = Regime::Supercritical;
    r.near_critical =
        r.regime != Regime::Critical && std::fabs(E - kSqrt2) < 1e-8;
    return r;
}

const char* regime_label(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

OrbitContribution orbit_contribution(const ConjugacyClassRecord& rec, int k, double E) {
    if (!(E > kSqrt2))
        throw std::invalid_argument("orbit contributions exist only above the critical level");
    if (k == 0) throw std::invalid_argument("iterate k must be nonzero");
    OrbitContribution o;
    o.class_ref = rec;
    o.k = k;
    const double root = std::sqrt(E * E - 2.0);
    o.T_primitive = E / root * rec.length;
    o.det_factor = std::fabs(std::exp(0.5 * k * rec.length) - std::exp(-0.5 * k * rec.length));
    o.maslov = 0;
    o.action = k * rec.length * root;
    o.holonomy = -(k * o.T_primitive) / E;
    return o;
}

double Y_N_exact(const std::vector<SpectralDatum>& interior,
                 const std::vector<SpectralDatum>& continuous, double E, int N,
                 const TestFunctionPair& phi, double tail_tol) {
    if (N < 1) throw std::invalid_argument("Y_N_exact: N < 1");
    if (!(E > 1.0)) throw std::invalid_argument("Y_N_exact: E <= 1");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("Y_N_exact: tail_tol <= 0");
    if (interior.empty()) throw std::invalid_argument("Y_N_exact: empty interior data");

    // genus inferred from the exact total interior multiplicity (g-1) N^2
    double mult_total = 0.0;
    for (const auto& d : interior) mult_total += static_cast<double>(d.multiplicity);
    const double gm1 = mult_total / (static_cast<double>(N) * N);

    // certified tail bound for the continuous series above the ingested window:
    // counting density (g-1) per unit lambda with 25% headroom, the change of
    // variable lambda -> x = sqrt(lambda + 2N^2) - EN (d lambda = 2(x+EN) dx),
    // and the decay majorant of phi: the sharp sup_tail where available,
    // integrated numerically out to X, closed by the polynomial certificate
    // C4 (1+x)^{-4} beyond X.
    double lambda_max = 0.0;
    for (const auto& d : continuous)
        lambda_max = std::max(lambda_max, d.nu - static_cast<double>(N) * N);
    const double c4 = phi.decay_c[4];
    if (!(c4 > 0.0))
        throw std::invalid_argument("test function carries no decay certificate");
    const double x0 = std::sqrt(lambda_max + 2.0 * static_cast<double>(N) * N) - E * N;
    double tail = std::numeric_limits<double>::infinity();
    if (x0 > 0.0) {
        const double en = E * N;
        auto poly_beyond = [&](double X) {
            return 2.5 * gm1 * c4 *
                   (0.5 / ((1 + X) * (1 + X)) +
                    (en - 1.0) / (3.0 * (1 + X) * (1 + X) * (1 + X)));
        };
        tail = poly_beyond(x0);
        if (phi.sup_tail && tail > tail_tol) {
            // choose X so the polynomial closure is negligible, then integrate
            // the sharp majorant on geometric panels up to X
            const double X =
                std::max(x0 * 2, std::cbrt(2.5 * gm1 * c4 * std::max(en, 1.0) /
                                           (0.03 * tail_tol)));
            double acc = 0.0, a = x0;
            while (a < X) {
                const double b = std::min(X, a < 1.0 ? a + 1.0 : 2.0 * a);
                acc += integrate_gk(
                           [&](double x) {
                               return std::complex<double>(
                                   phi.sup_tail(x) * 2.0 * (x + en), 0.0);
                           },
                           a, b, 1e-3 * tail_tol)
                           .real();
                a = b;
            }
            tail = std::min(tail, 1.25 * gm1 * acc + poly_beyond(X));
        }
    }
    if (!(tail <= tail_tol))
        throw NumericalError("spectrum window insufficient for this (E, N): N = " +
                             std::to_string(N) + ", E = " + format_double(E) +
                             ", tail bound " + format_double(tail) + " > " +
                             format_double(tail_tol));

    std::vector<double> terms;
    terms.reserve(interior.size() + continuous.size());
    double imag_acc = 0.0;
    for (const auto* list : {&interior, &continuous})
        for (const auto& d : *list) {
            const C v = phi(lambda_scaled(d.nu, N) - E * N);
            terms.push_back(static_cast<double>(d.multiplicity) * v.real());
            imag_acc += std::fabs(static_cast<double>(d.multiplicity) * v.imag());
        }
    if (phi.real_valued && imag_acc > 1e-9 * (1.0 + mult_total))
        throw NumericalError("real-valued test function produced imaginary mass " +
                             format_double(imag_acc));
    return pairwise_sum(terms);
}

double weyl_term(double E, int g, double phi_hat_at_0) {
    if (!(E > 1.0)) throw std::invalid_argument("weyl_term: E <= 1");
    return (2.0 * g - 2.0) * E * phi_hat_at_0;
}

double energy_shell_volume(double E, int g) {
    return (2.0 * M_PI) * (2.0 * M_PI) * (2.0 * g - 2.0) * E;
}

namespace {

struct SubcriticalSums {
    C c0;
    C c1;
    std::vector<std::pair<int, C>> k_breakdown;
    int k_max_used = 0;
    double tail = 0.0;
};

// shared oscillatory-sum core; alt_weights selects the alternative c1 display
SubcriticalSums subcritical_core(int N, double E, int g, const TestFunctionPair& phi,
                                 int k_max, bool alt_weights) {
    if (!(E > 1.0 && E < kSqrt2))
        throw std::invalid_argument("subcritical coefficients need 1 < E < sqrt(2)");
    if (k_max < 1) throw std::invalid_argument("k_max < 1");
    const double root = std::sqrt(2.0 - E * E);
    const double gg = 2.0 * g - 2.0;
    const C i(0.0, 1.0);

    SubcriticalSums s;
    s.c0 = gg * E * phi.phi_hat(0.0);
    s.c1 = gg * (alt_weights ? 2.0 : 1.0) * i * phi.phi_hat_d1(0.0);
    s.k_breakdown.emplace_back(0, s.c1);

    const double hull =
        phi.support_hat ? std::max(std::fabs((*phi.support_hat)[0]),
                                   std::fabs((*phi.support_hat)[1]))
                        : std::numeric_limits<double>::infinity();
    double last_mag = 0.0;
    for (int k = -k_max; k <= k_max; ++k) {
        if (k == 0) continue;
        const double omega = 2.0 * M_PI * k * E / root;
        if (std::fabs(omega) > hull) continue;  // exact support exclusion
        const C phase = std::polar(1.0, k * M_PI + 2.0 * M_PI * k * root * N);
        const C t0 = gg * phi.phi_hat(omega) * phase;
        s.c0 += E * t0;
        C t1 = (alt_weights ? 2.0 : 1.0) * i * phi.phi_hat_d1(omega) +
               (M_PI * i * static_cast<double>(k) * E / (4.0 * root)) * phi.phi_hat(omega) +
               (alt_weights ? i : C(1.0)) * (2.0 * M_PI * i * static_cast<double>(k) * E /
                                             (root * root * root)) *
                   phi.phi_hat_d2(omega);
        t1 *= gg * phase;
        s.c1 += t1;
        s.k_breakdown.emplace_back(k, t1);
        s.k_max_used = std::max(s.k_max_used, std::abs(k));
        if (std::abs(k) == k_max) last_mag = std::max(last_mag, std::abs(t1) + std::abs(t0));
    }
    s.tail = last_mag;  // magnitude at the truncation edge (0 when support-excluded)
    return s;
}

CoefficientReport pack_subcritical(const SubcriticalSums& s) {
    CoefficientReport r;
    r.c0 = s.c0;
    r.c1 = s.c1;
    r.k_breakdown = s.k_breakdown;
    r.k_max_used = s.k_max_used;
    r.tail_bound = s.tail;
    return r;
}

}  // namespace

std::complex<double> c0_subcritical(int N, double E, int g, const TestFunctionPair& phi,
                                    int k_max) {
    return subcritical_core(N, E, g, phi, k_max, false).c0;
}

CoefficientReport coefficients_subcritical(int N, double E, int g,
                                           const TestFunctionPair& phi, int k_max) {
    return pack_subcritical(subcritical_core(N, E, g, phi, k_max, false));
}

CoefficientReport coefficients_subcritical_alt(int N, double E, int g,
                                               const TestFunctionPair& phi, int k_max) {
    return pack_subcritical(subcritical_core(N, E, g, phi, k_max, true));
}

CoefficientReport c1_supercritical(int N, double E, const ClassList& classes,
                                   const TestFunctionPair& phi) {
    if (!(E > kSqrt2))
        throw std::invalid_argument("orbit sum needs E > sqrt(2)");
    if (!phi.support_hat)
        throw std::invalid_argument("orbit sum needs compactly supported phi_hat");
    if (!(phi.hat_gap > 0.0))
        throw std::invalid_argument(
            "orbit sum needs phi_hat vanishing near 0 (hat_gap > 0)");
    const double root = std::sqrt(E * E - 2.0);
    const double hull = std::max(std::fabs((*phi.support_hat)[0]),
                                 std::fabs((*phi.support_hat)[1]));

    // every primitive class with E/root * length <= hull can contribute at k = 1;
    // the list must be certified complete up to that norm.
    const double required_length = hull * root / E;
    const double required_norm = std::exp(required_length);
    if (!classes.exhaustive || classes.norm_bound < required_norm)
        throw CertificateError(
            "class list not exhaustive for the required norm window: need norms up to " +
            format_double(required_norm) + ", certified up to " +
            (classes.exhaustive ? format_double(classes.norm_bound) : "nothing") +
            " (missing (" +
            format_double(classes.exhaustive ? classes.norm_bound : 1.0) + ", " +
            format_double(required_norm) + "])");

    CoefficientReport r;
    r.c0 = 0.0;
    std::vector<double> re_terms, im_terms;
    for (const auto& rec : classes.classes) {
        const double t_sharp = E / root * rec.length;
        if (t_sharp > hull) continue;  // even |k| = 1 falls outside the hull
        const int k_lim = static_cast<int>(std::floor(hull / t_sharp));
        for (int k = -k_lim; k <= k_lim; ++k) {
            if (k == 0) continue;
            const C hat = phi.phi_hat(k * t_sharp);
            if (hat == 0.0) continue;  // outside the true support
            OrbitContribution o = orbit_contribution(rec, k, E);
            const C val = (o.T_primitive / (2.0 * M_PI * o.det_factor)) *
                          std::polar(1.0, -N * o.action) * hat;
            r.orbit_breakdown.emplace_back(o, val);
            re_terms.push_back(val.real());
            im_terms.push_back(val.imag());
            r.k_max_used = std::max(r.k_max_used, std::abs(k));
        }
    }
    r.c1 = C(pairwise_sum(re_terms), pairwise_sum(im_terms));
    r.tail_bound = 0.0;  // finite sum, support-complete
    return r;
}

CoefficientReport coefficients_critical(int g, const TestFunctionPair& phi) {
    CoefficientReport r;
    r.c0 = (2.0 * g - 2.0) * kSqrt2 * phi.phi_hat(0.0);
    r.c1 = 0.0;
    return r;
}

std::pair<double, TestFunctionPair> reduction_map(double E, const TestFunctionPair& phi) {
    if (!(E > kSqrt2)) throw std::invalid_argument("reduction_map: E <= sqrt(2)");
    return {E / kSqrt2, scale_pair(phi, kSqrt2)};
}

ResidualFit residual_analysis(const std::function<double(int)>& Y_of_N,
                              const std::function<std::complex<double>(int)>& c0_of_N,
                              const std::function<std::complex<double>(int)>& c1_of_N,
                              const std::vector<int>& N_list) {
    if (N_list.size() < 4)
        throw std::invalid_argument("residual_analysis: need at least 4 values of N");
    if (!std::is_sorted(N_list.begin(), N_list.end()))
        throw std::invalid_argument("residual_analysis: N_list must be ascending");
    ResidualFit f;
    f.Ns = N_list;
    double scale = 0.0;
    for (int N : N_list) {
        const double y = Y_of_N(N);
        const C c0 = c0_of_N(N), c1 = c1_of_N(N);
        f.Y.push_back(y);
        f.r0.push_back(y - (c0 * static_cast<double>(N)).real());
        f.r1.push_back(y - (c0 * static_cast<double>(N) + c1).real());
        scale = std::max({scale, std::fabs(y), 1.0});
    }
    auto fit_of = [&](const std::vector<double>& r, bool& exact) -> LineFit {
        exact = std::all_of(r.begin(), r.end(),
                            [&](double v) { return std::fabs(v) < 1e-14 * scale; });
        if (exact) return LineFit{};
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (std::fabs(r[i]) < 1e-300) continue;
            xs.push_back(std::log(static_cast<double>(f.Ns[i])));
            ys.push_back(std::log(std::fabs(r[i])));
        }
        return fit_line(xs, ys);
    };
    f.fit0 = fit_of(f.r0, f.exact0);
    f.fit1 = fit_of(f.r1, f.exact1);
    return f;
}

void assert_weyl_convention() {
    const TestFunctionPair p = gaussian_pair(0.8);
    verify_fourier_convention(p, 9, 1e-8);
    for (double E : {1.2, kSqrt2, 2.0}) {
        const double direct = weyl_term(E, 2, p.phi_hat(0.0).real());
        const double via_volume = energy_shell_volume(E, 2) /
                                  ((2.0 * M_PI) * (2.0 * M_PI)) * p.phi_hat(0.0).real();
        if (std::fabs(direct - via_volume) > 1e-12 * std::fabs(direct))
            throw NumericalError("Weyl-term convention mismatch at E = " + format_double(E));
    }
}

}  // namespace magtrace
