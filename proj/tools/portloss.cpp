// portloss: analytic and Monte Carlo loss distributions for a uniform loan
// portfolio with stochastic liabilities and systemic downward jump risk.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "portloss/commands.hpp"
#include "portloss/config.hpp"

namespace {

portloss::RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw portloss::config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return portloss::parse_config(buf.str());
}

struct OutputTarget {
    std::unique_ptr<std::ofstream> file;
    std::ostream* stream = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file = std::make_unique<std::ofstream>(path);
        if (!*file) throw portloss::config_error("cannot open output file '" + path + "'");
        stream = file.get();
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loan portfolio loss distribution analytics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string nu_list;
    int resolution = 0;
    long long samples = -1;
    long long seed = -1;
    bool check = false;
    bool percent = false;
    bool fraction = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Config file (key = value lines)");
        cmd->add_option("--out", out_path, "Output file (default: stdout)");
        cmd->add_option("--nu", nu_list, "Comma-separated confidence levels");
        cmd->add_option("--resolution", resolution, "Grid resolution");
        cmd->add_option("--samples", samples, "Monte Carlo sample count");
        cmd->add_option("--seed", seed, "Monte Carlo seed");
        cmd->add_flag("--check", check, "Exit nonzero if a table deviation exceeds tolerance");
        cmd->add_flag("--percent", percent, "Report losses in percent");
        cmd->add_flag("--fraction", fraction, "Report losses as fractions (default)");
    };

    std::string which;
    CLI::App* table = app.add_subcommand("table", "Built-in fixture regression tables");
    table->add_option("which", which, "percentiles-fig4|es-fig4|percentiles-fig6|es-fig6")
        ->required();
    add_common(table);

    CLI::App* density = app.add_subcommand("density-grid", "Loss density on a uniform grid");
    add_common(density);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo summary vs the analytic law");
    add_common(simulate);

    CLI11_PARSE(app, argc, argv);

    try {
        OutputTarget out;
        out.open(out_path);

        if (table->parsed()) return portloss::cli::cmd_table(which, *out.stream, check);

        portloss::RunConfig cfg = load_config(config_path);
        if (!nu_list.empty()) {
            cfg.nus = portloss::detail::parse_number_list(nu_list, "nu", 0);
            for (double nu : cfg.nus)
                if (!(nu > 0.0 && nu < 1.0))
                    throw portloss::validation_error("nu levels must lie in (0,1)");
        }
        if (resolution > 0) cfg.resolution = resolution;
        if (samples >= 0) cfg.samples = static_cast<std::size_t>(samples);
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (percent) cfg.percent_units = true;
        if (fraction) cfg.percent_units = false;

        if (density->parsed()) {
            const int res = cfg.resolution > 1 ? cfg.resolution : 1000;
            portloss::cli::cmd_density_grid(cfg, res, *out.stream);
            return 0;
        }

        // simulate: summary goes to stdout; --out receives the ECDF grid.
        if (!out_path.empty()) {
            portloss::cli::cmd_simulate(cfg, std::cout, out.stream);
        } else if (cfg.resolution > 1) {
            portloss::cli::cmd_simulate(cfg, std::cout, &std::cout);
        } else {
            portloss::cli::cmd_simulate(cfg, std::cout, nullptr);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
