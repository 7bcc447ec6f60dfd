#ifndef PORTLOSS_NUMERICS_HPP
#define PORTLOSS_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "portloss/errors.hpp"

namespace portloss {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2 = 1.4142135623730950488016887;

/// Probabilities are saturated to this range before Phi^-1 so that extreme
/// tails map to large finite abscissas instead of +-inf.
inline constexpr double kProbFloor = 1e-300;
inline constexpr double kProbCeil = 1.0 - 1e-16;

inline double std_normal_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

/// Phi(z), accurate to full double precision via erfc.
inline double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

inline double clamp_probability(double p) {
    if (p < kProbFloor) return kProbFloor;
    if (p > kProbCeil) return kProbCeil;
    return p;
}

namespace detail {

// Rational initial guess for Phi^-1 (Acklam's approximation, |rel err| < 1.2e-9).
inline double normal_quantile_guess(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

/// Phi^-1(p) for p in (0,1). One Halley step against std_normal_cdf on top of a
/// rational approximation keeps the pair round-trip consistent to ~1e-15.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
    double x = detail::normal_quantile_guess(p);
    // The pdf underflows past |x| ~ 38; skip polishing in that regime, where the
    // guess's 1e-9 relative error is far below any absolute tolerance anyway.
    if (std::abs(x) < 36.0) {
        const double e = std_normal_cdf(x) - p;
        const double u = e / std_normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    enum class Scheme { GaussHermite, Adaptive };

    Scheme scheme = Scheme::GaussHermite;
    /// Gauss-Hermite order, or maximum bisection depth for the adaptive rule.
    int limit = 64;
    double abs_tol = 1e-10;

    static QuadratureSpec gauss_hermite(int order = 64, double tol = 1e-10) {
        QuadratureSpec s{Scheme::GaussHermite, order, tol};
        s.validate();
        return s;
    }
    static QuadratureSpec adaptive(int max_depth = 40, double tol = 1e-10) {
        QuadratureSpec s{Scheme::Adaptive, max_depth, tol};
        s.validate();
        return s;
    }
    void validate() const {
        if (limit < 2) throw validation_error("QuadratureSpec: order/refinement limit must be >= 2");
        if (!(abs_tol > 0.0)) throw validation_error("QuadratureSpec: tolerance must be > 0");
    }
};

namespace detail {

struct HermiteRule {
    std::vector<double> nodes;   // abscissas for weight phi(y)
    std::vector<double> weights; // sum to 1
};

// Nodes/weights of the n-point Gauss-Hermite rule, rescaled so that
// sum_i w_i f(y_i) ~ int f(y) phi(y) dy.  Newton iteration on the orthonormal
// Hermite recurrence with the classical initial guesses.
inline HermiteRule build_hermite_rule(int n) {
    constexpr double pi_quarter = 0.7511255444649424828587030; // pi^(-1/4)
    HermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[n - 1];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[n - 2];
        } else {
            z = 2.0 * z - rule.nodes[n - i + 1];
        }

        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pi_quarter;
            double p2 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (k + 1.0)) * p2 - std::sqrt(k / (k + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2; // derivative of the orthonormal polynomial
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
        }
        // store descending on the right half; mirror on the left
        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        const double w = 2.0 / (pp * pp); // physicists' weight, total sqrt(pi)
        rule.weights[n - 1 - i] = w;
        rule.weights[i] = w;
    }

    constexpr double inv_sqrt_pi = 0.5641895835477562869480795;
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] *= kSqrt2;          // e^{-x^2}  ->  phi(y) abscissas
        rule.weights[i] *= inv_sqrt_pi;   // weights now sum to 1
    }
    return rule;
}

inline const HermiteRule& hermite_rule(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<HermiteRule>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<HermiteRule>(build_hermite_rule(n));
    return *slot;
}

template <typename F>
double hermite_estimate(F&& f, int n) {
    const HermiteRule& rule = hermite_rule(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(rule.nodes[i]);
    return acc;
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw quadrature_error("adaptive quadrature: refinement limit reached before tolerance");
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson integral of f over [a, b] to absolute tolerance tol.
/// Throws quadrature_error once max_depth interval halvings are exhausted.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol, int max_depth = 40) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// int f(y) phi(y) dy over the real line.  Gauss-Hermite at the spec order,
/// cross-checked at twice the order; falls back to an adaptive composite rule
/// on [-12, 12] (Gaussian mass outside is ~3e-33) when the pair disagrees.
/// The fallback pre-subdivides into unit panels so that narrow integrand
/// features cannot slip between the first Simpson nodes.
template <typename F>
double gauss_weighted_integral(F&& f, const QuadratureSpec& spec = QuadratureSpec{}) {
    spec.validate();
    if (spec.scheme == QuadratureSpec::Scheme::GaussHermite) {
        const double coarse = detail::hermite_estimate(f, spec.limit);
        const double fine = detail::hermite_estimate(f, 2 * spec.limit);
        if (std::abs(fine - coarse) <= spec.abs_tol) return fine;
    }
    const int depth = spec.scheme == QuadratureSpec::Scheme::Adaptive ? spec.limit : 48;
    auto weighted = [&f](double y) { return f(y) * std_normal_pdf(y); };
    double acc = 0.0;
    for (int edge = -12; edge < 12; ++edge)
        acc += integrate_adaptive(weighted, edge, edge + 1.0, spec.abs_tol / 24.0, depth);
    return acc;
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Bisection root of a nondecreasing g on [lo, hi]; returns the bracket
/// midpoint once the interval is narrower than tol.  Fixed evaluation order
/// makes the result deterministic.
template <typename G>
double find_root_increasing(G&& g, double lo, double hi, double tol) {
    if (!(lo <= hi)) throw bracket_error("find_root_increasing: lo > hi");
    double glo = g(lo);
    double ghi = g(hi);
    if (glo > 0.0 || ghi < 0.0)
        throw bracket_error("find_root_increasing: g(lo) <= 0 <= g(hi) violated");
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // interval at floating-point resolution
        const double gm = g(mid);
        if (gm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Series truncation
// ---------------------------------------------------------------------------

struct SeriesSpec {
    double tail_bound = 1e-12;

    void validate() const {
        if (!(tail_bound > 0.0 && tail_bound < 1.0))
            throw validation_error("SeriesSpec: tail bound must lie in (0,1)");
    }
};

/// Smallest K such that the Poisson(lambdaT) mass above K is below the
/// series tail bound.
inline int poisson_truncation(double lambdaT, const SeriesSpec& spec = SeriesSpec{}) {
    spec.validate();
    if (!(lambdaT >= 0.0)) throw validation_error("poisson_truncation: lambdaT must be >= 0");
    if (lambdaT == 0.0) return 0;
    double term = std::exp(-lambdaT);
    double cum = term;
    int k = 0;
    while (1.0 - cum >= spec.tail_bound) {
        ++k;
        term *= lambdaT / k;
        cum += term;
        if (k > 100000)
            throw quadrature_error("poisson_truncation: series did not reach the tail bound");
    }
    return k;
}

/// Poisson(lambdaT) probabilities for k = 0..K.
inline std::vector<double> poisson_weights(double lambdaT, int K) {
    std::vector<double> w(static_cast<std::size_t>(K) + 1);
    w[0] = std::exp(-lambdaT);
    for (int k = 1; k <= K; ++k) w[k] = w[k - 1] * lambdaT / k;
    return w;
}

/// CDF of a Gamma(k, rate) variable with integer shape (Erlang).
inline double erlang_cdf(int k, double rate, double x) {
    if (x <= 0.0) return 0.0;
    const double rx = rate * x;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < k; ++j) {
        term *= rx / j;
        sum += term;
    }
    const double tail = std::exp(-rx + std::log(sum));
    const double cdf = 1.0 - tail;
    return cdf < 0.0 ? 0.0 : (cdf > 1.0 ? 1.0 : cdf);
}

/// Upper quantile of Gamma(k, rate): smallest u with P[S > u] <= tail.
inline double erlang_upper_quantile(int k, double rate, double tail) {
    double hi = (k + 1.0) / rate;
    while (1.0 - erlang_cdf(k, rate, hi) > tail) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (1.0 - erlang_cdf(k, rate, mid) > tail)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

} // namespace portloss

#endif
