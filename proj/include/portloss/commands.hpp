#ifndef PORTLOSS_COMMANDS_HPP
#define PORTLOSS_COMMANDS_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "portloss/config.hpp"
#include "portloss/continuous.hpp"
#include "portloss/csv.hpp"
#include "portloss/fixtures.hpp"
#include "portloss/jump.hpp"
#include "portloss/model.hpp"
#include "portloss/montecarlo.hpp"

namespace portloss::cli {

inline const fixtures::TableRef& table_by_name(const std::string& which) {
    if (which == "percentiles-fig4") return fixtures::unimodal_percentiles();
    if (which == "es-fig4") return fixtures::unimodal_shortfalls();
    if (which == "percentiles-fig6") return fixtures::monotone_percentiles();
    if (which == "es-fig6") return fixtures::monotone_shortfalls();
    throw validation_error("unknown table '" + which +
                           "' (expected percentiles-fig4|es-fig4|percentiles-fig6|es-fig6)");
}

/// Emits one regression table as CSV (values in percent, two decimals) next
/// to the pinned reference values and absolute deviations.  Returns the
/// largest deviation in percentage points relative to each row's tolerance:
/// with `check`, a nonzero exit status signals an exceeded tolerance.
inline int cmd_table(const std::string& which, std::ostream& out, bool check = false) {
    const fixtures::TableRef& ref = table_by_name(which);
    const bool monotone_fixture = which == "percentiles-fig6" || which == "es-fig6";
    const bool shortfall = which.rfind("es-", 0) == 0;
    const ContractParams contract =
        monotone_fixture ? fixtures::monotone_contract() : fixtures::unimodal_contract();

    CsvWriter csv(out);
    std::vector<std::string> header{"gamma"};
    for (double nu : fixtures::kTableNus) header.push_back("nu=" + format_double(nu, 3));
    for (double nu : fixtures::kTableNus) header.push_back("ref=" + format_double(nu, 3));
    for (double nu : fixtures::kTableNus) header.push_back("dev=" + format_double(nu, 3));
    csv.row(header);

    bool within = true;
    for (const fixtures::TableRow& row : ref.rows) {
        const JumpLossLaw law(contract, fixtures::table_jump(row.gamma));
        std::vector<double> values;
        for (double nu : fixtures::kTableNus)
            values.push_back(100.0 * (shortfall ? law.expected_shortfall(nu) : law.percentile(nu)));

        std::vector<std::string> fields{row.label};
        for (double v : values) fields.push_back(format_double(v, 2));
        for (double r : row.reference) fields.push_back(format_double(r, 2));
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double dev = std::abs(values[i] - row.reference[i]);
            fields.push_back(format_double(dev, 3));
            within = within && dev <= row.tolerance_pp;
        }
        csv.row(fields);
    }
    return check && !within ? 2 : 0;
}

/// Density on a uniform grid over (eps, 1-eps); one column per rho-sweep
/// value, or a single column for the configured contract.
inline void cmd_density_grid(const RunConfig& cfg, int resolution, std::ostream& out) {
    if (resolution < 2) throw validation_error("density grid: resolution must be >= 2");
    constexpr double eps = 1e-6;

    std::vector<double> rhos = cfg.rho_sweep;
    if (rhos.empty()) rhos.push_back(cfg.contract.rho);

    std::vector<std::function<double(double)>> densities;
    std::vector<std::string> header{"x"};
    for (double rho : rhos) {
        ContractParams contract = cfg.contract;
        contract.rho = rho;
        header.push_back(cfg.rho_sweep.empty() ? std::string("density")
                                               : "density[rho=" + format_double(rho) + "]");
        if (cfg.jump.active()) {
            JumpLossLaw law(contract, cfg.jump);
            densities.emplace_back([law](double x) { return law.limiting_density(x); });
        } else {
            ContinuousLossLaw law(contract);
            if (law.degenerate())
                throw degenerate_error("density grid: Lambda = 0 at rho = " + format_double(rho) +
                                       ", the loss is a point mass and has no density");
            densities.emplace_back([law](double x) { return law.limiting_density(x); });
        }
    }

    CsvWriter csv(out);
    csv.row(header);
    for (int i = 0; i < resolution; ++i) {
        const double x = eps + (1.0 - 2.0 * eps) * i / (resolution - 1);
        std::vector<std::string> fields{format_double(x)};
        for (const auto& f : densities) fields.push_back(format_double(f(x)));
        csv.row(fields);
    }
}

/// Cumulative default-count law of an n-loan portfolio.  Without jumps this
/// is the single-factor staircase; with jumps each Poisson/size scenario is a
/// plain portfolio whose unconditional default probability shifts with the
/// accumulated jump, mixed by quadrature.
inline std::vector<double> finite_loss_cumulative(const ContractParams& contract,
                                                  const JumpSpec& jump, int n) {
    const DerivedParams d = derive(contract, jump);
    if (d.zeta == 0.0)
        throw degenerate_error("finite loss law: zeta = 0, no idiosyncratic risk");
    const double sqrtT = std::sqrt(d.T);
    const double zp_tilde = std_normal_quantile(clamp_probability(d.pTilde));

    std::vector<double> log_binom(n + 1);
    for (int k = 0; k <= n; ++k)
        log_binom[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);

    const auto& rule = detail::hermite_rule(128);
    // pmf of all default counts for the scenario "jump burden u", sharing the
    // conditional-probability evaluations across k
    auto scenario_pmf = [&](double u, std::vector<double>& pmf) {
        pmf.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double q = std_normal_cdf(
                (d.Sigma * zp_tilde + u / sqrtT - d.Lambda * rule.nodes[i]) / d.zeta);
            const double lq = std::log(q);
            const double l1q = std::log1p(-q);
            for (int k = 0; k <= n; ++k) {
                double lg = log_binom[k];
                if (k > 0) lg += k * lq;
                if (k < n) lg += (n - k) * l1q;
                pmf[k] += rule.weights[i] * std::exp(lg);
            }
        }
    };

    const double lt = jump.active() ? jump.lambda * d.T : 0.0;
    const int K = poisson_truncation(lt);
    const std::vector<double> w = poisson_weights(lt, K);

    std::vector<double> atoms(n + 1, 0.0);
    std::vector<double> pmf;
    scenario_pmf(0.0, pmf);
    for (int k = 0; k <= n; ++k) atoms[k] = w[0] * pmf[k];

    // beyond this jump burden the scenario is fully defaulted and the pmf is
    // constant; panels concentrate on the transition below it
    const double u_sat =
        d.Sigma * sqrtT * (std_normal_quantile(1.0 - 1e-10) - zp_tilde);
    auto integrate_sizes = [&](const JumpConvolution& conv, double weight) {
        const double umax = conv.upper_quantile(1e-12);
        const double split = std::min(umax, u_sat);
        const struct {
            double lo, hi;
            int panels;
        } regions[] = {{0.0, split, 160}, {split, umax, 48}};
        for (const auto& reg : regions) {
            if (!(reg.hi > reg.lo)) continue;
            const double h = (reg.hi - reg.lo) / reg.panels;
            for (int s = 0; s <= reg.panels; ++s) {
                const double u = reg.lo + s * h;
                const double simpson_w =
                    (s == 0 || s == reg.panels) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
                const double g = conv.pdf(u);
                if (g == 0.0) continue;
                scenario_pmf(u, pmf);
                const double factor = weight * simpson_w * h / 3.0 * g;
                for (int k = 0; k <= n; ++k) atoms[k] += factor * pmf[k];
            }
        }
    };

    for (int j = 1; j <= K; ++j) {
        const JumpConvolution conv = convolution_density(jump, j);
        if (conv.kind == JumpConvolution::Kind::Atom) {
            scenario_pmf(conv.atom_at, pmf);
            for (int k = 0; k <= n; ++k) atoms[k] += w[j] * pmf[k];
            continue;
        }
        integrate_sizes(conv, w[j]);
    }

    std::vector<double> cum(n + 1);
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        acc += atoms[k];
        cum[k] = std::min(acc, 1.0);
    }
    return cum;
}

/// Monte Carlo summary (and optional ECDF grid) with the Kolmogorov-Smirnov
/// distance against the matching analytic law.
inline void cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream* grid_out = nullptr) {
    if (cfg.samples < 1000)
        throw validation_error("simulate: sample count must be >= 1000");

    SimConfig sim;
    sim.samples = cfg.samples;
    sim.seed = cfg.seed;
    sim.percentiles = cfg.nus;
    sim.mode = cfg.finite_mode ? SimConfig::Mode::Finite : SimConfig::Mode::Limiting;
    sim.portfolio_size = cfg.portfolio_size;

    SimResult result;
    std::function<double(double)> cdf;
    std::function<double(double)> cdf_left;

    if (cfg.finite_mode) {
        result = sample_finite_portfolio(cfg.contract, cfg.jump, cfg.portfolio_size, sim);
        const int n = cfg.portfolio_size;
        auto cum = std::make_shared<std::vector<double>>(finite_loss_cumulative(
            cfg.contract, cfg.jump, n));
        cdf = [cum, n](double x) {
            if (x < 0.0) return 0.0;
            const int k = static_cast<int>(std::floor(x * n + 1e-9));
            return k >= n ? 1.0 : (*cum)[k];
        };
        cdf_left = [cum, n](double x) {
            const double k_exact = x * n;
            const int k = static_cast<int>(std::ceil(k_exact - 1e-9)) - 1;
            if (k < 0) return 0.0;
            return k >= n ? 1.0 : (*cum)[k];
        };
    } else if (cfg.jump.active()) {
        const JumpLossLaw law(cfg.contract, cfg.jump);
        result = sample_limiting_loss(law, sim);
        cdf = support_cdf(law);
        cdf_left = support_cdf_left(law);
    } else {
        const ContinuousLossLaw law(cfg.contract);
        result = sample_limiting_loss(law, sim);
        if (law.degenerate()) {
            const double p = law.derived().p;
            cdf = [p](double x) { return x >= p ? 1.0 : 0.0; };
            cdf_left = [p](double x) { return x > p ? 1.0 : 0.0; };
        } else {
            cdf = support_cdf(law);
            cdf_left = cdf;
        }
    }

    const double ks = result.ks_distance(cdf, cdf_left);
    const double scale = cfg.percent_units ? 100.0 : 1.0;

    CsvWriter csv(out);
    csv.row({"metric", "value"});
    csv.row({"samples", format_double(static_cast<double>(cfg.samples), 0)});
    csv.row({"seed", format_double(static_cast<double>(cfg.seed), 0)});
    csv.row({"mean", format_double(scale * result.mean)});
    csv.row({"mean_se", format_double(scale * result.mean_se)});
    csv.row({"variance", format_double(scale * scale * result.variance)});
    csv.row({"variance_se", format_double(scale * scale * result.variance_se)});
    for (const auto& q : result.percentiles) {
        csv.row({"percentile_" + format_double(q.nu), format_double(scale * q.value)});
        csv.row({"percentile_" + format_double(q.nu) + "_se", format_double(scale * q.se)});
    }
    for (const auto& q : result.shortfalls)
        csv.row({"es_" + format_double(q.nu), format_double(scale * q.value)});
    csv.row({"ks_distance", format_double(ks)});

    if (grid_out != nullptr) {
        const int res = cfg.resolution > 1 ? cfg.resolution : 1000;
        CsvWriter grid(*grid_out);
        grid.row({"x", "ecdf", "analytic_cdf"});
        const double lo = result.samples.front();
        const double hi = result.samples.back();
        for (int i = 0; i < res; ++i) {
            // pin the endpoints exactly; lo + (hi-lo) need not round back to hi
            const double x = i == 0 ? lo : (i == res - 1 ? hi : lo + (hi - lo) * i / (res - 1));
            grid.row({format_double(x), format_double(result.ecdf(x)), format_double(cdf(x))});
        }
    }
}

} // namespace portloss::cli

#endif
