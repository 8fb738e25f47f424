#include "magtrace/testfn.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "magtrace/util.hpp"

namespace magtrace {

namespace {

// Gauss-Kronrod 7-15 on [-1, 1]
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkEval {
    std::complex<double> k15;
    double err;
};

GkEval gk15(const std::function<std::complex<double>(double)>& f, double a, double b) {
    const double h = (b - a) / 2, c = (a + b) / 2;
    std::complex<double> k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 8; ++i) {
        const std::complex<double> fp = f(c + h * kXgk[i]);
        const std::complex<double> s = (i < 7) ? fp + f(c - h * kXgk[i]) : fp;
        k15 += kWgk[i] * s;
        if (i % 2 == 1) g7 += kWg[i / 2] * s;  // odd indices are the Gauss-7 nodes
    }
    k15 *= h;
    g7 *= h;
    return {k15, std::abs(k15 - g7)};
}

std::complex<double> gk_adaptive(const std::function<std::complex<double>(double)>& f,
                                 double a, double b, double tol, int depth) {
    const GkEval e = gk15(f, a, b);
    if (e.err <= tol || depth <= 0) {
        if (e.err > tol)
            throw NumericalError("Gauss-Kronrod quadrature did not converge (err " +
                                 format_double(e.err) + " > " + format_double(tol) + ")");
        return e.k15;
    }
    const double c = (a + b) / 2;
    return gk_adaptive(f, a, c, tol / 2, depth - 1) +
           gk_adaptive(f, c, b, tol / 2, depth - 1);
}

}  // namespace

std::complex<double> integrate_gk(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return gk_adaptive(f, a, b, abs_tol, max_depth);
}

namespace {

// Inverse transform (1/2pi) int_lo^hi hat(xi) e^{i xi t} dxi with the
// oscillation split at the local period of the phase.
std::complex<double> inv_transform(const std::function<std::complex<double>(double)>& hat,
                                   double lo, double hi, double t, double tol) {
    const int panels =
        std::max(1, static_cast<int>(std::ceil((hi - lo) * std::max(std::fabs(t), 1.0) /
                                               (2.0 * M_PI))));
    std::complex<double> sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + (hi - lo) * p / panels;
        const double b = lo + (hi - lo) * (p + 1) / panels;
        auto f = [&](double xi) { return hat(xi) * std::polar(1.0, xi * t); };
        sum += integrate_gk(f, a, b, tol / panels);
    }
    return sum / (2.0 * M_PI);
}

// mollifier bump on [c-h, c+h]: B(xi) = exp(-1/(1-u^2)), u = (xi-c)/h
double bump0(double u) {
    const double w = 1.0 - u * u;
    return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}
double bump1(double u) {  // dB/du
    const double w = 1.0 - u * u;
    return w > 0.0 ? bump0(u) * (-2.0 * u / (w * w)) : 0.0;
}
double bump2(double u) {  // d2B/du2
    const double w = 1.0 - u * u;
    if (w <= 0.0) return 0.0;
    const double g = -2.0 * u / (w * w);
    const double gp = -2.0 / (w * w) - 8.0 * u * u / (w * w * w);
    return bump0(u) * (g * g + gp);
}

struct BumpCache {
    double center, hw;
    bool symmetric;
    // interpolation grid for phi
    double t_max, step;
    std::vector<std::complex<double>> vals;
    std::array<double, 5> hat_deriv_l1{};  // (1/2pi) ||hat^(m)||_1, m = 0..4
};

double cache_hat(const BumpCache& c, double xi) {
    double v = bump0((xi - c.center) / c.hw);
    if (c.symmetric) v += bump0((xi + c.center) / c.hw);
    return v;
}

std::complex<double> cache_phi_direct(const std::shared_ptr<BumpCache>& c, double t) {
    // each bump integrated on its own support
    std::complex<double> v =
        inv_transform([&](double xi) { return bump0((xi - c->center) / c->hw); },
                      c->center - c->hw, c->center + c->hw, t, 1e-11);
    if (c->symmetric)
        v += inv_transform([&](double xi) { return bump0((xi + c->center) / c->hw); },
                           -c->center - c->hw, -c->center + c->hw, t, 1e-11);
    return v;
}

std::complex<double> cache_phi(const std::shared_ptr<BumpCache>& c, double t) {
    if (std::fabs(t) > c->t_max) return cache_phi_direct(c, t);
    // 4-point Lagrange interpolation on the uniform grid
    const double x = (t + c->t_max) / c->step;
    const auto n = static_cast<std::ptrdiff_t>(c->vals.size());
    std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::floor(x));
    i1 = std::max<std::ptrdiff_t>(1, std::min(n - 3, i1));
    const double u = x - static_cast<double>(i1);
    const std::complex<double> f0 = c->vals[i1 - 1], f1 = c->vals[i1],
                               f2 = c->vals[i1 + 1], f3 = c->vals[i1 + 2];
    const double c0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double c1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double c2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double c3 = (u + 1.0) * u * (u - 1.0) / 6.0;
    return c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3;
}

std::array<double, 5> estimate_decay(const std::function<std::complex<double>(double)>& phi,
                                     double scan_to, const std::array<double, 5>& tail_c) {
    // C_m = sup |phi(t)| (1+|t|)^m: grid maximum combined with the
    // integration-by-parts tail bound (1/2pi)||hat^(m)||_1 |t|^{-m}.
    std::array<double, 5> out{};
    const int n = 4096;
    for (int i = 0; i <= n; ++i) {
        const double t = scan_to * i / n;
        const double a = std::abs(phi(t));  // real phi assumed even; scan t >= 0
        for (int m = 0; m <= 4; ++m)
            out[m] = std::max(out[m], a * std::pow(1.0 + t, m));
    }
    for (int m = 0; m <= 4; ++m) {
        const double tail =
            tail_c[m] * std::pow((1.0 + scan_to) / scan_to, m);  // sup beyond scan_to
        out[m] = std::max(out[m], tail) * 1.01;
    }
    return out;
}

}  // namespace

TestFunctionPair gaussian_pair(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_pair: sigma <= 0");
    TestFunctionPair p;
    p.kind = "gaussian(sigma=" + format_double(sigma) + ")";
    p.real_valued = true;
    const double s2 = sigma * sigma;
    const double amp = sigma * std::sqrt(2.0 * M_PI);
    p.phi = [s2](double t) { return std::complex<double>(std::exp(-t * t / (2 * s2)), 0); };
    p.phi_hat = [s2, amp](double xi) {
        return std::complex<double>(amp * std::exp(-s2 * xi * xi / 2), 0);
    };
    p.phi_hat_d1 = [s2, amp](double xi) {
        return std::complex<double>(-amp * s2 * xi * std::exp(-s2 * xi * xi / 2), 0);
    };
    p.phi_hat_d2 = [s2, amp](double xi) {
        return std::complex<double>(amp * s2 * (s2 * xi * xi - 1) * std::exp(-s2 * xi * xi / 2),
                                    0);
    };
    p.support_hat = std::nullopt;
    p.sup_tail = [s2](double x) {
        return x <= 0.0 ? 1.0 : std::exp(-x * x / (2 * s2));
    };
    for (int m = 0; m <= 4; ++m) {
        // maximize e^{-t^2/2s^2}(1+t)^m on a fine grid (true max; unimodal tail)
        double best = 0.0;
        const double hi = 10.0 * sigma + 4.0 * m * std::max(sigma * sigma, 1.0);
        for (int i = 0; i <= 8192; ++i) {
            const double t = hi * i / 8192.0;
            best = std::max(best, std::exp(-t * t / (2 * s2)) * std::pow(1 + t, m));
        }
        p.decay_c[m] = best * 1.01;
    }
    return p;
}

TestFunctionPair bump_hat_pair(double center, double half_width, bool symmetrize) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("bump_hat_pair: degenerate width");
    auto cache = std::make_shared<BumpCache>();
    cache->center = center;
    cache->hw = half_width;
    cache->symmetric = symmetrize;

    // (1/2pi) ||hat^(m)||_1 for the tail bounds: derivatives in xi pick up
    // h^{-m}; the m = 3, 4 derivatives are finite-differenced from bump2.
    {
        const int n = 20000;
        const double du = 2.0 / n;
        double l1[5] = {0, 0, 0, 0, 0};
        const double fd = 1e-4;
        for (int i = 0; i < n; ++i) {
            const double u = -1.0 + (i + 0.5) * du;
            const double b3 = (bump2(u + fd) - bump2(u - fd)) / (2 * fd);
            const double b4 = (bump2(u + fd) - 2 * bump2(u) + bump2(u - fd)) / (fd * fd);
            l1[0] += std::fabs(bump0(u)) * du;
            l1[1] += std::fabs(bump1(u)) * du;
            l1[2] += std::fabs(bump2(u)) * du;
            l1[3] += std::fabs(b3) * du;
            l1[4] += std::fabs(b4) * du;
        }
        const int nb = symmetrize ? 2 : 1;
        for (int m = 0; m <= 4; ++m)
            cache->hat_deriv_l1[m] =
                nb * l1[m] * std::pow(half_width, 1 - m) / (2.0 * M_PI);
    }

    // interpolation grid: quartic-interpolant error (step^4/24) M4 <= 1e-9
    // with M4 = (1/2pi) int xi^4 |hat| <= (max|xi|)^4 * (1/2pi)||hat||_1
    const double xi_max = std::fabs(center) + half_width;
    const double m4 = std::pow(xi_max, 4) * cache->hat_deriv_l1[0];
    cache->t_max = 128.0;
    cache->step = std::min(0.25, std::pow(24.0 * 1e-9 / std::max(m4, 1e-30), 0.25));
    const auto npts = static_cast<std::size_t>(std::ceil(2 * cache->t_max / cache->step)) + 4;
    cache->vals.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const double t = -cache->t_max + static_cast<double>(i) * cache->step;
        cache->vals[i] = cache_phi_direct(cache, t);
    }

    TestFunctionPair p;
    p.kind = (symmetrize ? "bump2(center=" : "bump(center=") + format_double(center) +
             ",hw=" + format_double(half_width) + ")";
    p.real_valued = symmetrize;
    p.support_hat = {{symmetrize ? -(std::fabs(center) + half_width)
                                 : center - half_width,
                      symmetrize ? (std::fabs(center) + half_width) : center + half_width}};
    if (symmetrize)
        p.hat_gap = std::max(0.0, std::fabs(center) - half_width);
    else if (center - half_width > 0.0 || center + half_width < 0.0)
        p.hat_gap = std::min(std::fabs(center - half_width), std::fabs(center + half_width));
    p.phi = [cache](double t) { return cache_phi(cache, t); };
    p.phi_hat = [cache](double xi) { return std::complex<double>(cache_hat(*cache, xi), 0); };
    p.phi_hat_d1 = [cache](double xi) {
        double v = bump1((xi - cache->center) / cache->hw) / cache->hw;
        if (cache->symmetric) v += bump1((xi + cache->center) / cache->hw) / cache->hw;
        return std::complex<double>(v, 0);
    };
    p.phi_hat_d2 = [cache](double xi) {
        double v = bump2((xi - cache->center) / cache->hw) / (cache->hw * cache->hw);
        if (cache->symmetric)
            v += bump2((xi + cache->center) / cache->hw) / (cache->hw * cache->hw);
        return std::complex<double>(v, 0);
    };
    p.decay_c = estimate_decay(p.phi, cache->t_max, cache->hat_deriv_l1);
    return p;
}

TestFunctionPair scale_pair(const TestFunctionPair& p, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("scale_pair: s <= 0");
    TestFunctionPair q;
    q.kind = "scale(s=" + format_double(s) + ", of=" + p.kind + ")";
    q.real_valued = p.real_valued;
    auto phi = p.phi, hat = p.phi_hat, d1 = p.phi_hat_d1, d2 = p.phi_hat_d2;
    q.phi = [phi, s](double t) { return phi(s * t); };
    q.phi_hat = [hat, s](double xi) { return hat(xi / s) / s; };
    q.phi_hat_d1 = [d1, s](double xi) { return d1(xi / s) / (s * s); };
    q.phi_hat_d2 = [d2, s](double xi) { return d2(xi / s) / (s * s * s); };
    if (p.support_hat) q.support_hat = {{(*p.support_hat)[0] * s, (*p.support_hat)[1] * s}};
    q.hat_gap = p.hat_gap * s;
    if (p.sup_tail) {
        auto inner = p.sup_tail;
        q.sup_tail = [inner, s](double x) { return inner(s * x); };
    }
    for (int m = 0; m <= 4; ++m)
        q.decay_c[m] = p.decay_c[m] * std::max(1.0, std::pow(s, -m));
    return q;
}

void verify_fourier_convention(const TestFunctionPair& p, int npoints, double tol) {
    double lo, hi;
    if (p.support_hat) {
        lo = (*p.support_hat)[0];
        hi = (*p.support_hat)[1];
    } else {
        // Schwartz pair without compact hat support: use a window where the
        // hat has decayed below 1e-16 of its peak (asserted by sampling).
        double peak = 0.0, w = 1.0;
        for (int i = 0; i <= 400; ++i)
            peak = std::max(peak, std::abs(p.phi_hat(-20.0 + 0.1 * i)));
        while (w < 1e6 && (std::abs(p.phi_hat(w)) > 1e-18 * peak ||
                           std::abs(p.phi_hat(-w)) > 1e-18 * peak))
            w *= 1.5;
        lo = -w;
        hi = w;
    }
    for (int j = 0; j < npoints; ++j) {
        const double t = -6.0 + 12.0 * j / (npoints - 1);
        const std::complex<double> recon = inv_transform(p.phi_hat, lo, hi, t, tol * 1e-2);
        if (std::abs(recon - p.phi(t)) > tol)
            throw NumericalError("Fourier convention check failed for " + p.kind + " at t=" +
                                 format_double(t) + ": |recon - phi| = " +
                                 format_double(std::abs(recon - p.phi(t))));
    }
}

}  // namespace magtrace
