#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace magtrace {

// Numerical failure: an algorithm could not reach its accuracy target
// (integrator step underflow, quadrature non-convergence, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A result is well defined but a completeness/tolerance certificate could
// not be established (truncated spectral sum, non-exhaustive class list, ...).
struct CertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic pairwise (fixed-tree) summation: result is independent of
// chunking or thread count, and carries an O(log n) rounding constant.
double pairwise_sum(std::span<const double> xs);

// Wrap an angle to (-pi, pi].
double normalize_angle(double a);

// Shortest-path printing of a double (17 significant digits round-trips).
std::string format_double(double x);

// atanh with a domain check that throws instead of returning NaN.
double artanh_checked(double x);

// Linear least-squares fit y ~ a + b*x; returns {a, b, stderr_of_b}.
struct LineFit {
    double intercept{};
    double slope{};
    double slope_stderr{};
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// splitmix64: tiny deterministic generator with platform-independent output,
// used wherever a seeded sample must reproduce byte-for-byte.
struct SplitMix {
    unsigned long long state;
    explicit SplitMix(unsigned long long seed) : state(seed) {}
    unsigned long long next() {
        unsigned long long z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
};

}  // namespace magtrace
