// Test-only reference implementations, independent of the library's own
// numeric paths: a series/continued-fraction normal CDF, a bisection
// quantile on top of it, and a fixed-grid Simpson integrator.
#ifndef PORTLOSS_TESTS_ORACLES_HPP
#define PORTLOSS_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>

namespace oracle {

// erf by its Taylor series; adequate to ~1e-16 for |x| < 1.5.
inline double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x2 / n;
        const double add = term / (2.0 * n + 1.0);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum * 1.1283791670955125738961589; // 2/sqrt(pi)
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
// evaluated backwards at fixed depth; ample precision for x >= 1.5.
inline double erfc_cf(double x) {
    double cf = 0.0;
    for (int n = 120; n >= 1; --n) cf = (n / 2.0) / (x + cf);
    return std::exp(-x * x) / (x + cf) * 0.5641895835477562869480795; // 1/sqrt(pi)
}

inline double std_normal_cdf(double z) {
    const double x = std::abs(z) / 1.4142135623730950488;
    const double tail = x < 1.5 ? 0.5 * (1.0 - erf_series(x)) : 0.5 * erfc_cf(x);
    return z < 0.0 ? tail : 1.0 - tail;
}

inline double std_normal_quantile(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std_normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Composite Simpson on a fixed grid (even panel count).
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace oracle

#endif
