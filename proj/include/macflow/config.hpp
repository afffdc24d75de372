#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "macflow/errors.hpp"
#include "macflow/grid.hpp"
#include "macflow/io.hpp"
#include "macflow/schedule.hpp"
#include "macflow/solver.hpp"

namespace macflow {

// Flat JSON run configuration. Unknown keys are a hard error (reported with
// the line they appear on); config drift is the main reproducibility hazard.
struct RunConfig {
    std::vector<double> eps;   // one value for run, >= 3 for sweep
    int N = 1;                 // ambient dimension minus one; 0 selects a line grid
    double r_max = 0.0;
    int n_cells = 0;
    std::string profile;       // "constant:c" | "interface:R0" |
                               // "interface_prepared:R0[:width_factor]"
    std::string scheme = "imex";
    double dt = 0.0;           // 0: default eps^2/4 per run
    double t_end = -1.0;       // < 0: default t_eps
    uint64_t seed = 0;
    std::string output_dir;

    Grid make_grid() const {
        return (N == 0) ? Grid::line(r_max, n_cells) : Grid::radial(N, r_max, n_cells);
    }
    double dt_for(double e) const { return dt > 0.0 ? dt : e * e / 4.0; }
    double t_end_for(const Schedule& s) const { return t_end >= 0.0 ? t_end : s.t_eps; }

    InitialProfile make_profile() const {
        const auto split = [](const std::string& s) {
            std::vector<std::string> parts;
            size_t start = 0;
            while (true) {
                const size_t p = s.find(':', start);
                parts.push_back(s.substr(start, p - start));
                if (p == std::string::npos) break;
                start = p + 1;
            }
            return parts;
        };
        const auto parts = split(profile);
        try {
            if (parts.size() == 2 && parts[0] == "constant")
                return InitialProfile::constant(std::stod(parts[1]));
            if (parts.size() == 2 && parts[0] == "interface")
                return InitialProfile::interface_at(std::stod(parts[1]));
            if ((parts.size() == 2 || parts.size() == 3) && parts[0] == "interface_prepared") {
                const double R0 = std::stod(parts[1]);
                const double wf = parts.size() == 3 ? std::stod(parts[2]) : 1.2;
                return InitialProfile::interface_prepared(R0, wf);
            }
        } catch (const std::invalid_argument&) {
        } catch (const std::out_of_range&) {
        }
        throw ConfigError("config: bad profile '" + profile + "'");
    }

    void validate() const {
        if (eps.empty()) throw ConfigError("config: eps missing");
        for (double e : eps)
            if (!(e > 0.0) || !(e < 1.0))
                throw ConfigError("config: eps values must lie in (0,1)");
        if (N < 0) throw ConfigError("config: N must be nonnegative");
        if (!(r_max > 0.0)) throw ConfigError("config: r_max must be positive");
        if (n_cells < 16) throw ConfigError("config: n_cells must be at least 16");
        if (dt < 0.0) throw ConfigError("config: dt must be positive when given");
        scheme_from_string(scheme);
        make_profile();
        make_grid();
    }
};

namespace detail {

inline int line_of_key(const std::string& text, const std::string& key) {
    const size_t pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    static const std::set<std::string> known{"eps",     "N",     "r_max", "n_cells",
                                             "profile", "scheme", "dt",    "t_end",
                                             "seed",    "output_dir"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' (line " +
                              std::to_string(detail::line_of_key(text, it.key())) + ")");
    }

    RunConfig cfg;
    try {
        if (!j.contains("eps")) throw ConfigError("config: eps missing");
        if (j["eps"].is_array())
            cfg.eps = j["eps"].get<std::vector<double>>();
        else
            cfg.eps = {j["eps"].get<double>()};
        if (j.contains("N")) cfg.N = j["N"].get<int>();
        if (j.contains("r_max")) cfg.r_max = j["r_max"].get<double>();
        if (j.contains("n_cells")) cfg.n_cells = j["n_cells"].get<int>();
        if (j.contains("profile")) cfg.profile = j["profile"].get<std::string>();
        if (j.contains("scheme")) cfg.scheme = j["scheme"].get<std::string>();
        if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
        if (j.contains("t_end")) cfg.t_end = j["t_end"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    } catch (const nlohmann::json::type_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

} // namespace macflow
