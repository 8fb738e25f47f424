#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with the standard quartic
// dense-output interpolant, adaptive PI-free step control, FSAL.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "magtrace/util.hpp"

namespace magtrace::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Controls {
    double rtol{1e-10};
    double atol{1e-12};
    double h_init{0.0};       // 0 = auto
    std::size_t max_steps{2'000'000};
};

// One accepted step with its interpolation coefficients.
template <std::size_t N>
struct DenseStep {
    double t0{}, h{};
    State<N> r1{}, r2{}, r3{}, r4{}, r5{};

    State<N> eval(double t) const {
        const double th = (t - t0) / h, th1 = 1.0 - th;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return y;
    }
};

template <std::size_t N>
struct Solution {
    std::vector<DenseStep<N>> steps;   // contiguous in t
    double t0{}, t1{};
    State<N> y1{};
    std::size_t n_accepted{}, n_rejected{};

    State<N> at(double t) const {
        if (steps.empty()) throw NumericalError("empty ODE solution");
        const bool fwd = t1 >= t0;
        if ((fwd && (t < t0 - 1e-9 || t > t1 + 1e-9)) ||
            (!fwd && (t > t0 + 1e-9 || t < t1 - 1e-9)))
            throw std::invalid_argument("ODE dense output queried outside integration range");
        // binary search for the step containing t
        std::size_t lo = 0, hi = steps.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            const double tend = steps[mid].t0 + steps[mid].h;
            if (fwd ? (tend >= t) : (tend <= t)) hi = mid; else lo = mid + 1;
        }
        return steps[lo].eval(t);
    }
};

// Butcher tableau (Dormand & Prince 1980).
namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
}  // namespace dp

// Integrate y' = f(t, y) from t0 to t1 (either direction).  f has signature
// void(double t, const State<N>&, State<N>& dydt).  On failure, the steps
// accepted so far are copied into *partial (when given) before throwing, so
// callers can report how far the integration got.
template <std::size_t N, typename RHS>
Solution<N> integrate(RHS&& f, State<N> y0, double t0, double t1, const Controls& ctl = {},
                      Solution<N>* partial = nullptr) {
    using namespace dp;
    Solution<N> sol;
    sol.t0 = t0;
    sol.t1 = t1;
    if (t1 == t0) { sol.y1 = y0; return sol; }

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    State<N> k1, k2, k3, k4, k5, k6, k7, yt, ynew;
    f(t0, y0, k1);

    double h = ctl.h_init;
    if (h == 0.0) {
        double ny = 0, nf = 0;
        for (std::size_t i = 0; i < N; ++i) {
            ny = std::max(ny, std::fabs(y0[i]));
            nf = std::max(nf, std::fabs(k1[i]));
        }
        h = (nf > 0) ? 0.01 * std::max(ny, 1.0) / nf : 1e-3;
        h = std::min(h, std::fabs(t1 - t0));
    }
    h = std::fabs(h) * dir;

    double t = t0;
    std::size_t steps_taken = 0;
    auto fail = [&](const std::string& what) {
        if (partial) {
            sol.t1 = t;
            sol.y1 = y0;
            *partial = sol;
        }
        throw NumericalError(what);
    };
    while (dir * (t1 - t) > 0) {
        if (++steps_taken > ctl.max_steps)
            fail("ODE integrator exceeded max step count");
        if (std::fabs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(t), 1.0))
            fail("ODE step size underflow at t = " + format_double(t));
        if (dir * (t + h - t1) > 0) h = t1 - t;

        for (std::size_t i = 0; i < N; ++i) yt[i] = y0[i] + h * a21 * k1[i];
        f(t + c2 * h, yt, k2);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y0[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, yt, k3);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y0[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, yt, k4);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y0[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, yt, k5);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y0[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, yt, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y0[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, ynew, k7);

        double err = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = ctl.atol + ctl.rtol * std::max(std::fabs(y0[i]), std::fabs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) err = 1e10;  // NaN/inf state: force max shrink

        if (err <= 1.0) {
            DenseStep<N> ds;
            ds.t0 = t;
            ds.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const double dy = ynew[i] - y0[i];
                const double bspl = h * k1[i] - dy;
                ds.r1[i] = y0[i];
                ds.r2[i] = dy;
                ds.r3[i] = bspl;
                ds.r4[i] = dy - h * k7[i] - bspl;
                ds.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            sol.steps.push_back(ds);
            ++sol.n_accepted;
            t += h;
            y0 = ynew;
            k1 = k7;  // FSAL
        } else {
            ++sol.n_rejected;
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h *= fac;
    }
    sol.y1 = y0;
    return sol;
}

}  // namespace magtrace::ode
