#include "magtrace/util.hpp"

#include <cmath>
#include <cstdio>

namespace magtrace {

namespace {

double pairwise_rec(const double* xs, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_rec(xs, h) + pairwise_rec(xs + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
    return pairwise_rec(xs.data(), xs.size());
}

double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);  // (-pi, pi], except remainder gives [-pi, pi]
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double artanh_checked(double x) {
    if (!(std::fabs(x) < 1.0))
        throw NumericalError("artanh argument out of range: " + format_double(x));
    return std::atanh(x);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_line needs >= 3 matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.slope_stderr = (x.size() > 2) ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
    return f;
}

}  // namespace magtrace
