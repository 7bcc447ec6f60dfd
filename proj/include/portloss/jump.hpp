#ifndef PORTLOSS_JUMP_HPP
#define PORTLOSS_JUMP_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "portloss/continuous.hpp"
#include "portloss/errors.hpp"
#include "portloss/model.hpp"
#include "portloss/numerics.hpp"

namespace portloss {

/// Law of the sum S_k of k iid jump sizes: a Gamma(k, gamma) density for
/// exponential sizes, a point mass at k*c for constant sizes.
struct JumpConvolution {
    enum class Kind { GammaDensity, Atom };

    Kind kind = Kind::Atom;
    int k = 1;
    double rate = 0.0;     // Gamma rate (exponential sizes)
    double atom_at = 0.0;  // location of the point mass (constant sizes)

    double pdf(double u) const {
        if (kind != Kind::GammaDensity)
            throw validation_error("JumpConvolution: atom law has no density");
        if (u < 0.0) return 0.0;
        // gamma e^{-gamma u} (gamma u)^{k-1} / (k-1)!
        double lg = std::log(rate) - rate * u;
        if (k > 1) lg += (k - 1) * std::log(rate * u) - std::lgamma(static_cast<double>(k));
        return std::exp(lg);
    }

    double cdf(double u) const {
        if (kind == Kind::Atom) return u >= atom_at ? 1.0 : 0.0;
        return erlang_cdf(k, rate, u);
    }

    /// Smallest u with P[S_k > u] <= tail; the upper cut for quadrature.
    double upper_quantile(double tail) const {
        if (kind == Kind::Atom) return atom_at;
        return erlang_upper_quantile(k, rate, tail);
    }
};

/// k-fold convolution of the jump-size law, k >= 1.
inline JumpConvolution convolution_density(const JumpSpec& jump, int k) {
    jump.validate();
    if (k < 1) throw validation_error("convolution_density: k must be >= 1");
    JumpConvolution conv;
    conv.k = k;
    switch (jump.size_law) {
        case JumpSpec::SizeLaw::Exponential:
            conv.kind = JumpConvolution::Kind::GammaDensity;
            conv.rate = jump.gamma;
            return conv;
        case JumpSpec::SizeLaw::Constant:
            conv.kind = JumpConvolution::Kind::Atom;
            conv.atom_at = k * jump.c;
            return conv;
        case JumpSpec::SizeLaw::None:
            break;
    }
    throw validation_error("convolution_density: jump-size law has no convolution (no sizes)");
}

/// Limiting percentage-loss law under systemic jump risk: a Poisson mixture
/// over the jump count of shifted continuous laws.  With lambda = 0 every
/// evaluation reduces exactly to ContinuousLossLaw.
///
/// For Lambda = 0 the mixture consists of point masses (the aggregate
/// diffusion factor cancels); only the CDF exists, not a density.
class JumpLossLaw {
public:
    JumpLossLaw(const ContractParams& params, const JumpSpec& jump,
                const SeriesSpec& series = SeriesSpec{},
                const QuadratureSpec& quad = QuadratureSpec{})
        : d_(derive(params, jump)), jump_(jump), series_(series), quad_(quad) {
        series_.validate();
        quad_.validate();
        init_mixture();
    }
    JumpLossLaw(const DerivedParams& derived, const JumpSpec& jump,
                const SeriesSpec& series = SeriesSpec{},
                const QuadratureSpec& quad = QuadratureSpec{})
        : d_(derived), jump_(jump), series_(series), quad_(quad) {
        jump_.validate();
        series_.validate();
        quad_.validate();
        init_mixture();
    }

    const DerivedParams& derived() const { return d_; }
    const JumpSpec& jump() const { return jump_; }
    double horizon() const { return d_.T; }
    bool degenerate() const { return d_.Lambda == 0.0; }

    /// View of the same parameters without the jump component.
    ContinuousLossLaw continuous_part() const { return ContinuousLossLaw(d_); }

    /// Default probability of one loan conditional on the aggregate factor
    /// value Y_T and the accumulated jump J_T = j >= 0.
    double conditional_default_prob(double y, double j) const {
        if (d_.zeta == 0.0)
            throw degenerate_error("conditional_default_prob: zeta = 0, no idiosyncratic risk");
        if (!(j >= 0.0)) throw validation_error("conditional_default_prob: j must be >= 0");
        const double sqrtT = std::sqrt(d_.T);
        const double zp = std_normal_quantile(clamp_probability(d_.pTilde));
        return std_normal_cdf((d_.Sigma * zp - d_.Lambda * y / sqrtT + j / sqrtT) / d_.zeta);
    }

    /// P[limiting loss <= x] for x in (0,1).
    double limiting_cdf(double x) const {
        if (!(x > 0.0 && x < 1.0))
            throw std::domain_error("limiting_cdf: loss fraction must lie in (0,1)");
        return cdf_unchecked(x);
    }

    /// Density at x in (0,1); requires Lambda != 0.
    double limiting_density(double x) const {
        if (degenerate())
            throw degenerate_error(
                "limiting_density: Lambda = 0, the mixture is atomic and has no density");
        if (!(x > 0.0 && x < 1.0))
            throw std::domain_error("limiting_density: loss fraction must lie in (0,1)");

        const double zx = std_normal_quantile(clamp_probability(x));
        const double zp = std_normal_quantile(clamp_probability(d_.pTilde));
        const double lam = std::abs(d_.Lambda);
        const double sqrtT = std::sqrt(d_.T);
        const double cut = sqrtT * (d_.zeta * zx - d_.Sigma * zp); // u where H crosses 0
        auto ratio = [&](double u) {
            const double h = (d_.zeta * zx - d_.Sigma * zp - u / sqrtT) / lam;
            return std::exp(0.5 * (zx * zx - h * h));
        };

        double acc = weights_[0] * ratio(0.0);
        for (int k = 1; k <= truncation_; ++k) {
            const Component& comp = components_[k - 1];
            double term;
            if (comp.conv.kind == JumpConvolution::Kind::Atom) {
                term = ratio(comp.conv.atom_at);
            } else {
                // normalize by the ratio's peak so the tolerance acts relatively
                const double scale = ratio(std::clamp(cut, 0.0, comp.umax));
                term = scale * mixture_integral(comp, cut, weights_[k],
                                                [&](double u) { return ratio(u) / scale; });
            }
            acc += weights_[k] * term;
        }
        return d_.zeta / lam * acc;
    }

    /// nu-percentile by monotone root finding on the CDF; Lambda != 0.
    double percentile(double nu) const {
        if (degenerate())
            throw degenerate_error("percentile: Lambda = 0 mixture is atomic; invert the CDF "
                                   "directly instead");
        if (!(nu > 0.0 && nu < 1.0))
            throw std::domain_error("percentile: confidence level must lie in (0,1)");
        auto g = [&](double x) { return cdf_unchecked(x) - nu; };
        return find_root_increasing(g, 1e-12, 1.0 - 1e-12, 1e-13);
    }

    /// ES_nu = (1-nu)^-1 int_nu^1 L_q dq.  Evaluated through the equivalent
    /// tail identity int_nu^1 L_q dq = L_nu (1-nu) + int_{L_nu}^1 (1-F) dx,
    /// which needs a single CDF inversion.  The tail integral runs in the
    /// x = Phi(z) variable; the outer tolerance stays above the noise floor
    /// of the inner mixture quadratures.
    double expected_shortfall(double nu, const QuadratureSpec& quad = QuadratureSpec{}) const {
        if (degenerate())
            throw degenerate_error("expected_shortfall: Lambda = 0 mixture is atomic");
        if (!(nu > 0.0 && nu < 1.0))
            throw std::domain_error("expected_shortfall: confidence level must lie in (0,1)");
        const double var = percentile(nu);
        auto tail = [&](double z) {
            return (1.0 - cdf_unchecked(std_normal_cdf(z))) * std_normal_pdf(z);
        };
        const double z_lo = std_normal_quantile(clamp_probability(var));
        const double z_hi = std::max(z_lo + 2.0, 8.5);
        const int depth = quad.scheme == QuadratureSpec::Scheme::Adaptive ? quad.limit : 48;
        const double excess =
            integrate_adaptive(tail, z_lo, z_hi, std::max(quad.abs_tol, 1e-8), depth);
        return var + excess / (1.0 - nu);
    }

private:
    void init_mixture() {
        const double lt = jump_.active() ? jump_.lambda * d_.T : 0.0;
        truncation_ = poisson_truncation(lt, series_);
        weights_ = poisson_weights(lt, truncation_);
        components_.clear();
        for (int k = 1; k <= truncation_; ++k) {
            Component comp;
            comp.conv = convolution_density(jump_, k);
            comp.umax = comp.conv.upper_quantile(series_.tail_bound);
            if (comp.conv.kind == JumpConvolution::Kind::GammaDensity) {
                comp.mean = k / comp.conv.rate;
                comp.sd = std::sqrt(static_cast<double>(k)) / comp.conv.rate;
            }
            components_.push_back(comp);
        }
    }

    int adaptive_depth() const {
        return quad_.scheme == QuadratureSpec::Scheme::Adaptive ? quad_.limit : 48;
    }

    // CDF with the argument already in (0,1); saturates rather than rejects.
    double cdf_unchecked(double x) const {
        x = clamp_probability(x);
        const double zx = std_normal_quantile(x);
        const double zp = std_normal_quantile(clamp_probability(d_.pTilde));
        const double sqrtT = std::sqrt(d_.T);

        if (degenerate()) {
            // Atomic mixture: the no-jump term sits at the S_0 = 0 conditional
            // loss Phi(Sigma Phi^-1(pTilde) / zeta); each k >= 1 term
            // contributes P[S_k <= M(x)] with M the inverted loss level.
            const double atom0 = std_normal_cdf(d_.Sigma * zp / d_.zeta);
            double acc = x >= atom0 ? weights_[0] : 0.0;
            const double m = sqrtT * (d_.zeta * zx - d_.Sigma * zp);
            if (m > 0.0) {
                for (int k = 1; k <= truncation_; ++k)
                    acc += weights_[k] * components_[k - 1].conv.cdf(m);
            }
            return acc;
        }

        const double lam = std::abs(d_.Lambda);
        const double cut = sqrtT * (d_.zeta * zx - d_.Sigma * zp);
        auto big_phi_h = [&](double u) {
            return std_normal_cdf((d_.zeta * zx - d_.Sigma * zp - u / sqrtT) / lam);
        };

        double acc = weights_[0] * big_phi_h(0.0);
        for (int k = 1; k <= truncation_; ++k) {
            const Component& comp = components_[k - 1];
            double term;
            if (comp.conv.kind == JumpConvolution::Kind::Atom) {
                term = big_phi_h(comp.conv.atom_at);
            } else {
                term = mixture_integral(comp, cut, weights_[k], big_phi_h);
            }
            acc += weights_[k] * term;
        }
        return acc;
    }

    struct Component {
        JumpConvolution conv;
        double umax = 0.0; // Gamma upper quantile at the series tail bound
        double mean = 0.0;
        double sd = 0.0;
    };

    // int_0^umax g(u) pdf_k(u) du.  Plain adaptive quadrature can return a
    // false zero here: the Gamma density vanishes at 0 for k >= 2 and g's
    // transition band (width ~ |Lambda| sqrt(T)) can be far narrower than the
    // Gamma support, so a top-level rule may never see the mass.  Panels are
    // therefore seeded at the Gamma mass scales and across g's transition
    // around the H = 0 crossing at `cut`.
    template <typename G>
    double mixture_integral(const Component& comp, double cut, double weight, G&& g) const {
        const double band = std::abs(d_.Lambda) * std::sqrt(d_.T);

        // Jump sizes spanning a negligible slice of the Gaussian band leave g
        // constant across the whole size distribution (second-order error
        // ~(sd/band)^2); the vanishing-jump-size proxy laws live here.
        if (comp.umax <= 1e-3 * band)
            return g(comp.mean) * comp.conv.cdf(comp.umax);

        // Both the CDF kernel Phi(H) and the density kernel (relative to its
        // peak) are below 1e-16 once u exceeds the crossing by 8.5 bands, so
        // the integration domain stops there.
        const double umax = std::min(comp.umax, std::max(cut, 0.0) + 8.5 * band);
        if (!(umax > 0.0)) return 0.0;

        double edges[17];
        int n_edges = 0;
        edges[n_edges++] = 0.0;
        edges[n_edges++] = umax;
        for (double f : {-3.0, -1.5, -0.5, 0.0, 0.5, 1.5, 3.0, 6.0}) {
            const double e = comp.mean + f * comp.sd;
            if (e > 0.0 && e < umax) edges[n_edges++] = e;
        }
        for (double f : {-8.0, -4.0, -2.0, 0.0, 2.0, 4.0}) {
            const double e = cut + f * band;
            if (e > 0.0 && e < umax) edges[n_edges++] = e;
        }
        std::sort(edges, edges + n_edges);

        // the component enters the mixture scaled by its Poisson weight, so
        // the inner tolerance may relax by the same factor
        const double tol =
            std::min(0.125, quad_.abs_tol / n_edges / std::max(weight, 1e-300));
        double acc = 0.0;
        for (int i = 0; i + 1 < n_edges; ++i) {
            if (edges[i + 1] - edges[i] < 1e-14 * umax) continue;
            acc += integrate_adaptive([&](double u) { return g(u) * comp.conv.pdf(u); },
                                      edges[i], edges[i + 1], tol, adaptive_depth());
        }
        return acc;
    }

    DerivedParams d_;
    JumpSpec jump_;
    SeriesSpec series_;
    QuadratureSpec quad_;
    int truncation_ = 0;
    std::vector<double> weights_;
    std::vector<Component> components_;
};

} // namespace portloss

#endif
