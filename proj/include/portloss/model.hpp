#ifndef PORTLOSS_MODEL_HPP
#define PORTLOSS_MODEL_HPP

#include <cmath>
#include <string>

#include "portloss/errors.hpp"
#include "portloss/numerics.hpp"

namespace portloss {

/// Market and liability coefficients of one loan contract.
///
/// Assets follow a geometric diffusion with drift mu and volatility sigma,
/// liabilities one with drift alpha and volatility beta.  rho and theta weight
/// the shared aggregate factor in the asset and liability dynamics; the
/// remainders load on independent idiosyncratic factors.  Default is checked
/// at the horizon T (years): the loan defaults iff A_T <= B_T.
struct ContractParams {
    double mu = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    double beta = 0.0;
    double rho = 0.0;
    double theta = 0.0;
    double A0 = 1.0;
    double B0 = 1.0;
    double T = 1.0;

    void validate() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!std::isfinite(mu)) throw validation_error("mu must be finite");
        if (!std::isfinite(alpha)) throw validation_error("alpha must be finite");
        if (!(sigma >= 0.0)) throw validation_error("sigma must be >= 0");
        if (!(beta >= 0.0)) throw validation_error("beta must be >= 0");
        if (!in01(rho)) throw validation_error("rho must lie in [0,1]");
        if (!in01(theta)) throw validation_error("theta must lie in [0,1]");
        if (!(A0 > 0.0)) throw validation_error("A0 must be > 0");
        if (!(B0 > 0.0)) throw validation_error("B0 must be > 0");
        if (!(T > 0.0)) throw validation_error("T must be > 0");
    }
};

/// Systemic downward jump component: a compound Poisson process with
/// intensity lambda whose nonnegative sizes are either exponentially
/// distributed or a known constant.  lambda = 0 behaves exactly like None.
struct JumpSpec {
    enum class SizeLaw { None, Exponential, Constant };

    double lambda = 0.0;
    SizeLaw size_law = SizeLaw::None;
    double gamma = 0.0; // exponential rate
    double c = 0.0;     // constant size

    static JumpSpec none() { return JumpSpec{}; }
    static JumpSpec exponential(double lambda, double gamma) {
        JumpSpec j{lambda, SizeLaw::Exponential, gamma, 0.0};
        j.validate();
        return j;
    }
    static JumpSpec constant(double lambda, double c) {
        JumpSpec j{lambda, SizeLaw::Constant, 0.0, c};
        j.validate();
        return j;
    }

    bool active() const { return lambda > 0.0 && size_law != SizeLaw::None; }

    void validate() const {
        if (!(lambda >= 0.0)) throw validation_error("lambda must be >= 0");
        if (size_law == SizeLaw::Exponential && !(gamma > 0.0))
            throw validation_error("gamma must be > 0 for exponential jump sizes");
        if (size_law == SizeLaw::Constant && !(c > 0.0))
            throw validation_error("c must be > 0 for constant jump sizes");
    }
};

/// 1 - E[e^{-xi}] for a single jump of size xi.  Zero for no jumps and,
/// to keep the vanishing-jump limit exact, for exponential rates beyond 1e8.
inline double jump_mean_factor(const JumpSpec& jump) {
    jump.validate();
    switch (jump.size_law) {
        case JumpSpec::SizeLaw::None:
            return 0.0;
        case JumpSpec::SizeLaw::Exponential:
            return jump.gamma > 1e8 ? 0.0 : 1.0 / (jump.gamma + 1.0);
        case JumpSpec::SizeLaw::Constant:
            return -std::expm1(-jump.c);
    }
    return 0.0;
}

/// E[(1 - e^{-xi})^2]; enters the terminal asset variance.
inline double jump_square_factor(const JumpSpec& jump) {
    jump.validate();
    switch (jump.size_law) {
        case JumpSpec::SizeLaw::None:
            return 0.0;
        case JumpSpec::SizeLaw::Exponential:
            // 1 - 2g/(g+1) + g/(g+2) collapses to this cancellation-free form.
            return 2.0 / ((jump.gamma + 1.0) * (jump.gamma + 2.0));
        case JumpSpec::SizeLaw::Constant: {
            const double m = -std::expm1(-jump.c);
            return m * m;
        }
    }
    return 0.0;
}

/// Aggregates every formula consumes.
///
///   Sigma^2 = sigma^2 + beta^2 - 2 sigma beta sqrt(rho theta)   (log-ratio vol)
///   zeta^2  = sigma^2 (1-rho) + beta^2 (1-theta)                (idiosyncratic vol)
///   Lambda  = sigma sqrt(rho) - beta sqrt(theta)                (aggregate loading)
///   Xi      = ln(B0/A0) - (mu - alpha - (sigma^2 - beta^2)/2) T
///   p       = Phi(Xi / (Sigma sqrt(T)))
///   XiTilde = Xi - lambda (1 - E[e^{-xi}]) T,  pTilde = Phi(XiTilde / (Sigma sqrt(T)))
struct DerivedParams {
    double Sigma = 0.0;
    double zeta = 0.0;
    double Lambda = 0.0;
    double Xi = 0.0;
    double p = 0.0;
    double XiTilde = 0.0;
    double pTilde = 0.0;
    double T = 1.0;
};

inline DerivedParams derive(const ContractParams& params, const JumpSpec& jump = JumpSpec::none()) {
    params.validate();
    jump.validate();

    DerivedParams d;
    d.T = params.T;
    const double cross = 2.0 * params.sigma * params.beta * std::sqrt(params.rho * params.theta);
    const double Sigma2 = params.sigma * params.sigma + params.beta * params.beta - cross;
    if (!(Sigma2 > 0.0))
        throw degenerate_error(
            "derive: Sigma = 0, assets and liabilities co-move exactly; the asset-liability "
            "ratio is deterministic and no loss law is defined");
    const double zeta2 =
        params.sigma * params.sigma * (1.0 - params.rho) + params.beta * params.beta * (1.0 - params.theta);
    d.Sigma = std::sqrt(Sigma2);
    d.zeta = std::sqrt(zeta2);
    d.Lambda = params.sigma * std::sqrt(params.rho) - params.beta * std::sqrt(params.theta);
    d.Xi = std::log(params.B0 / params.A0) -
           (params.mu - params.alpha - 0.5 * (params.sigma * params.sigma - params.beta * params.beta)) *
               params.T;
    const double sqrtT = std::sqrt(params.T);
    d.p = std_normal_cdf(d.Xi / (d.Sigma * sqrtT));
    d.XiTilde = d.Xi - jump.lambda * jump_mean_factor(jump) * params.T;
    d.pTilde = std_normal_cdf(d.XiTilde / (d.Sigma * sqrtT));
    return d;
}

/// Terminal asset mean and variance at time t.  The compensated jump drift
/// leaves the mean at its no-jump value while the variance picks up the
/// lambda t E[(1-e^{-xi})^2] term.
struct AssetMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline AssetMoments asset_moments(const ContractParams& params, const JumpSpec& jump, double t) {
    params.validate();
    jump.validate();
    if (!(t >= 0.0)) throw validation_error("asset_moments: t must be >= 0");

    AssetMoments m;
    m.mean = params.A0 * std::exp(params.mu * t);
    const double expo = params.sigma * params.sigma * t + jump.lambda * t * jump_square_factor(jump);
    m.variance = m.mean * m.mean * std::expm1(expo);
    return m;
}

} // namespace portloss

#endif
