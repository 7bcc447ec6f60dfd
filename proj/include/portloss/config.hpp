#ifndef PORTLOSS_CONFIG_HPP
#define PORTLOSS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "portloss/errors.hpp"
#include "portloss/model.hpp"

namespace portloss {

/// Malformed config document (syntax, unknown or duplicate key, bad number).
/// Invariant breaches on well-formed input surface as validation_error.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Fully validated run request: contract, jump component, command options.
struct RunConfig {
    ContractParams contract;
    JumpSpec jump;

    std::size_t samples = 1'000'000;
    std::uint64_t seed = 42;
    bool finite_mode = false;
    int portfolio_size = 100;
    int resolution = 0; // 0 = no grid output
    std::vector<double> nus = {0.90, 0.95, 0.975, 0.99};
    std::vector<double> rho_sweep; // density-grid series; empty = single rho
    bool percent_units = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view value, std::string_view key, int line) {
    try {
        std::size_t used = 0;
        const std::string v(value);
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                           "': expected a number, got '" + std::string(value) + "'");
    }
}

inline std::vector<double> parse_number_list(std::string_view value, std::string_view key, int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss{std::string(value)};
    while (std::getline(ss, item, ',')) {
        const std::string_view t = trim(item);
        if (t.empty())
            throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                               "': empty list element");
        out.push_back(parse_number(t, key, line));
    }
    if (out.empty())
        throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                           "': expected a comma-separated list");
    return out;
}

} // namespace detail

/// Parses the flat `key = value` document (UTF-8, '#' comments).  Unknown and
/// duplicate keys are rejected; every diagnostic names the offending key and
/// line.  Model invariants are enforced before returning.
inline RunConfig parse_config(std::string_view text) {
    static const char* const known_keys[] = {
        "mu",   "alpha", "sigma",   "beta", "rho",  "theta",      "a0",
        "b0",   "t",     "lambda",  "jump_law", "gamma_or_c", "samples",
        "seed", "mode",  "n",       "resolution", "nu",         "rho_sweep",
        "units"};

    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry, std::less<>> entries;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("line " + std::to_string(line_no) +
                               ": expected 'key = value', got '" + std::string(line) + "'");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string value{detail::trim(line.substr(eq + 1))};
        if (key.empty())
            throw config_error("line " + std::to_string(line_no) + ": missing key before '='");

        bool known = false;
        for (const char* k : known_keys) known = known || key == k;
        if (!known)
            throw config_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (entries.count(key))
            throw config_error("line " + std::to_string(line_no) + ": duplicate key '" + key +
                               "' (first set on line " + std::to_string(entries[key].line) + ")");
        entries.emplace(key, Entry{value, line_no});
    }

    auto take = [&](std::string_view key) -> std::optional<Entry> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        return it->second;
    };
    auto require_number = [&](std::string_view key) {
        const auto e = take(key);
        if (!e) throw config_error("missing required key '" + std::string(key) + "'");
        return detail::parse_number(e->value, key, e->line);
    };

    RunConfig cfg;
    cfg.contract.mu = require_number("mu");
    cfg.contract.alpha = require_number("alpha");
    cfg.contract.sigma = require_number("sigma");
    cfg.contract.beta = require_number("beta");
    cfg.contract.rho = require_number("rho");
    cfg.contract.theta = require_number("theta");
    cfg.contract.A0 = require_number("a0");
    cfg.contract.B0 = require_number("b0");
    cfg.contract.T = require_number("t");
    cfg.contract.validate();

    double lambda = 0.0;
    if (const auto e = take("lambda")) lambda = detail::parse_number(e->value, "lambda", e->line);
    std::string law = "none";
    if (const auto e = take("jump_law")) law = e->value;
    if (law == "none") {
        if (lambda != 0.0)
            throw validation_error("lambda > 0 requires jump_law 'exponential' or 'constant'");
        cfg.jump = JumpSpec::none();
    } else if (law == "exponential" || law == "constant") {
        const auto e = take("gamma_or_c");
        if (!e)
            throw config_error("missing required key 'gamma_or_c' (jump_law = " + law + ")");
        const double size = detail::parse_number(e->value, "gamma_or_c", e->line);
        cfg.jump = law == "exponential" ? JumpSpec::exponential(lambda, size)
                                        : JumpSpec::constant(lambda, size);
    } else {
        const auto e = take("jump_law");
        throw config_error("line " + std::to_string(e->line) +
                           ": key 'jump_law': expected none|exponential|constant, got '" + law +
                           "'");
    }

    if (const auto e = take("samples")) {
        const double v = detail::parse_number(e->value, "samples", e->line);
        if (!(v >= 1.0) || v != std::floor(v))
            throw validation_error("samples must be a positive integer");
        cfg.samples = static_cast<std::size_t>(v);
    }
    if (const auto e = take("seed")) {
        const double v = detail::parse_number(e->value, "seed", e->line);
        if (v < 0.0 || v != std::floor(v)) throw validation_error("seed must be a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(v);
    }
    if (const auto e = take("mode")) {
        if (e->value == "finite")
            cfg.finite_mode = true;
        else if (e->value != "limiting")
            throw config_error("line " + std::to_string(e->line) +
                               ": key 'mode': expected limiting|finite, got '" + e->value + "'");
    }
    if (const auto e = take("n")) {
        const double v = detail::parse_number(e->value, "n", e->line);
        if (!(v >= 1.0) || v != std::floor(v)) throw validation_error("n must be a positive integer");
        cfg.portfolio_size = static_cast<int>(v);
    }
    if (const auto e = take("resolution")) {
        const double v = detail::parse_number(e->value, "resolution", e->line);
        if (!(v >= 2.0) || v != std::floor(v)) throw validation_error("resolution must be an integer >= 2");
        cfg.resolution = static_cast<int>(v);
    }
    if (const auto e = take("nu")) {
        cfg.nus = detail::parse_number_list(e->value, "nu", e->line);
        for (double nu : cfg.nus)
            if (!(nu > 0.0 && nu < 1.0)) throw validation_error("nu levels must lie in (0,1)");
    }
    if (const auto e = take("rho_sweep")) {
        cfg.rho_sweep = detail::parse_number_list(e->value, "rho_sweep", e->line);
        for (double r : cfg.rho_sweep)
            if (!(r >= 0.0 && r <= 1.0)) throw validation_error("rho_sweep values must lie in [0,1]");
    }
    if (const auto e = take("units")) {
        if (e->value == "percent")
            cfg.percent_units = true;
        else if (e->value != "fraction")
            throw config_error("line " + std::to_string(e->line) +
                               ": key 'units': expected fraction|percent, got '" + e->value + "'");
    }
    return cfg;
}

} // namespace portloss

#endif
