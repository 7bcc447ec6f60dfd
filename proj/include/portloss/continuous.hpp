#ifndef PORTLOSS_CONTINUOUS_HPP
#define PORTLOSS_CONTINUOUS_HPP

#include <cmath>
#include <optional>

#include "portloss/errors.hpp"
#include "portloss/model.hpp"
#include "portloss/numerics.hpp"

namespace portloss {

/// Shape of the limiting loss density: two boundary peaks when
/// Lambda^2 > zeta^2, monotone at equality, a single interior mode otherwise.
struct ShapeResult {
    enum class Kind { Bimodal, Monotone, Unimodal };
    Kind kind = Kind::Unimodal;
    std::optional<double> mode; // set for the unimodal branch
};

/// Limiting percentage-loss law of an infinitely fine uniform portfolio
/// without jump risk.  Immutable after construction; all evaluations are pure.
///
/// With aggregate loading Lambda = 0 the loss is deterministic (a point mass
/// at p) and the distribution-function operations report a degenerate law.
class ContinuousLossLaw {
public:
    explicit ContinuousLossLaw(const DerivedParams& derived) : d_(derived) {}
    ContinuousLossLaw(const ContractParams& params, const JumpSpec& jump = JumpSpec::none())
        : d_(derive(params, jump)) {}

    const DerivedParams& derived() const { return d_; }
    double horizon() const { return d_.T; }

    /// Point mass at p instead of a continuous law?
    bool degenerate() const { return d_.Lambda == 0.0; }

    /// Default probability of one loan conditional on the aggregate factor
    /// value Y_T (normal with variance T).
    double conditional_default_prob(double y) const {
        if (d_.zeta == 0.0)
            throw degenerate_error("conditional_default_prob: zeta = 0, no idiosyncratic risk");
        const double z = std_normal_quantile(clamp_probability(d_.p));
        return std_normal_cdf((d_.Sigma * z - d_.Lambda * y / std::sqrt(d_.T)) / d_.zeta);
    }

    /// P[exactly k of n loans default], by Gaussian quadrature over the factor.
    double finite_pmf(int n, int k, const QuadratureSpec& quad = QuadratureSpec{}) const {
        if (n < 1) throw validation_error("finite_pmf: n must be >= 1");
        if (k < 0 || k > n) throw validation_error("finite_pmf: k must lie in [0, n]");
        if (d_.zeta == 0.0)
            throw degenerate_error("finite_pmf: zeta = 0, no idiosyncratic risk");
        const double log_binom =
            std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        const double a = d_.Sigma * std_normal_quantile(clamp_probability(d_.p)) / d_.zeta;
        const double b = d_.Lambda / d_.zeta;
        auto integrand = [&](double y) {
            const double q = std_normal_cdf(a - b * y);
            double lg = log_binom;
            if (k > 0) lg += k * std::log(q);
            if (k < n) lg += (n - k) * std::log1p(-q);
            return std::exp(lg);
        };
        return gauss_weighted_integral(integrand, quad);
    }

    /// P[limiting loss <= x] for x in (0,1).
    double limiting_cdf(double x) const {
        require_continuous("limiting_cdf");
        check_unit_interval(x, "limiting_cdf");
        return std_normal_cdf(standardized(x));
    }

    /// Density of the limiting loss at x in (0,1).
    double limiting_density(double x) const {
        require_continuous("limiting_density");
        check_unit_interval(x, "limiting_density");
        const double z = std_normal_quantile(clamp_probability(x));
        const double h = standardized(x);
        return d_.zeta / std::abs(d_.Lambda) * std::exp(0.5 * (z * z - h * h));
    }

    ShapeResult classify_shape() const {
        require_continuous("classify_shape");
        const double gap = d_.Lambda * d_.Lambda - d_.zeta * d_.zeta;
        ShapeResult r;
        if (std::abs(gap) <= 1e-12) {
            r.kind = ShapeResult::Kind::Monotone;
        } else if (gap > 0.0) {
            r.kind = ShapeResult::Kind::Bimodal;
        } else {
            r.kind = ShapeResult::Kind::Unimodal;
            const double zp = std_normal_quantile(clamp_probability(d_.p));
            r.mode = std_normal_cdf(d_.zeta * d_.Sigma * zp / (-gap));
        }
        return r;
    }

    /// nu-percentile (value at risk) of the limiting loss, closed form.
    double percentile(double nu) const {
        require_continuous("percentile");
        check_open_unit(nu, "percentile");
        const double zp = std_normal_quantile(clamp_probability(d_.p));
        return std_normal_cdf(
            (d_.Sigma * zp + std::abs(d_.Lambda) * std_normal_quantile(nu)) / d_.zeta);
    }

    /// Expected shortfall: the average of the upper quantiles,
    /// ES_nu = (1-nu)^-1 int_nu^1 L_q dq, integrated through q = Phi(z).
    double expected_shortfall(double nu, const QuadratureSpec& quad = QuadratureSpec{}) const {
        require_continuous("expected_shortfall");
        check_open_unit(nu, "expected_shortfall");
        const double zp = d_.Sigma * std_normal_quantile(clamp_probability(d_.p));
        const double lam = std::abs(d_.Lambda);
        const double z_lo = std_normal_quantile(nu);
        const double z_hi = std::max(z_lo + 2.0, 8.5); // Phi(-8.5) ~ 1e-17
        auto integrand = [&](double z) {
            return std_normal_cdf((zp + lam * z) / d_.zeta) * std_normal_pdf(z);
        };
        const int depth = quad.scheme == QuadratureSpec::Scheme::Adaptive ? quad.limit : 48;
        const double tail_avg =
            integrate_adaptive(integrand, z_lo, z_hi, quad.abs_tol * (1.0 - nu), depth);
        return tail_avg / (1.0 - nu);
    }

private:
    double standardized(double x) const {
        const double zx = std_normal_quantile(clamp_probability(x));
        const double zp = std_normal_quantile(clamp_probability(d_.p));
        return (d_.zeta * zx - d_.Sigma * zp) / std::abs(d_.Lambda);
    }
    void require_continuous(const char* op) const {
        if (degenerate())
            throw degenerate_error(std::string(op) +
                                   ": Lambda = 0, the limiting loss is a point mass at p");
    }
    static void check_unit_interval(double x, const char* op) {
        if (!(x > 0.0 && x < 1.0))
            throw std::domain_error(std::string(op) + ": loss fraction must lie in (0,1)");
    }
    static void check_open_unit(double nu, const char* op) {
        if (!(nu > 0.0 && nu < 1.0))
            throw std::domain_error(std::string(op) + ": confidence level must lie in (0,1)");
    }

    DerivedParams d_;
};

/// Covariance of the default indicators of two (possibly different) contracts
/// sharing the aggregate factor, over the common horizon jointT.
inline double loss_covariance(const ContractParams& a, const ContractParams& b, double jointT,
                              const QuadratureSpec& quad = QuadratureSpec{}) {
    if (!(jointT > 0.0)) throw validation_error("loss_covariance: jointT must be > 0");
    ContractParams pa = a;
    ContractParams pb = b;
    pa.T = jointT;
    pb.T = jointT;
    const DerivedParams da = derive(pa);
    const DerivedParams db = derive(pb);
    if (da.zeta == 0.0 || db.zeta == 0.0)
        throw degenerate_error("loss_covariance: zeta = 0 contract has no idiosyncratic risk");

    const double aa = da.Sigma * std_normal_quantile(clamp_probability(da.p)) / da.zeta;
    const double ba = da.Lambda / da.zeta;
    const double ab = db.Sigma * std_normal_quantile(clamp_probability(db.p)) / db.zeta;
    const double bb = db.Lambda / db.zeta;
    auto integrand = [&](double y) {
        return std_normal_cdf(aa - ba * y) * std_normal_cdf(ab - bb * y);
    };
    return gauss_weighted_integral(integrand, quad) - da.p * db.p;
}

} // namespace portloss

#endif
