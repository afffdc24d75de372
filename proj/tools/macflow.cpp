// macflow: desk-scale laboratory for a modified Allen-Cahn flow with a
// time-dependent interface width. Subcommands: run, sweep, verify-potential,
// verify-energy, compare-barrier, mcf-test.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macflow/barrier.hpp"
#include "macflow/config.hpp"
#include "macflow/io.hpp"
#include "macflow/mcf.hpp"
#include "macflow/measures.hpp"
#include "macflow/potential.hpp"
#include "macflow/schedule.hpp"
#include "macflow/solver.hpp"
#include "macflow/sweep.hpp"

using namespace macflow;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

fs::path resolve_output(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("MACFLOW_OUTPUT_DIR")) return env;
    return ".";
}

ordered_json ledger_json(const EnergyLedger& led) {
    ordered_json j;
    j["term_time_deriv"] = led.term_time_deriv;
    j["term_mu_t"] = led.term_mu_t;
    j["term_xi"] = led.term_xi;
    j["term_G"] = led.term_G;
    j["mu_0"] = led.mu_0;
    j["residual"] = energy_residual(led);
    return j;
}

ordered_json summary_json(const RunConfig& cfg, double eps, const Trajectory& traj) {
    ordered_json j;
    j["eps"] = eps;
    j["t_end"] = traj.final_field.time;
    j["steps"] = traj.steps;
    j["max_abs_v"] = traj.max_abs_v;
    j["ledger"] = ledger_json(traj.ledger);
    j["violations"] = ordered_json::array();
    j["D"] = traj.D;
    j["D_times_logeps"] = traj.D * std::abs(std::log(eps));
    j["min_xi_density"] = traj.min_xi_density;
    j["scheme"] = cfg.scheme;
    return j;
}

void write_snapshots(const fs::path& dir, const Trajectory& traj) {
    int index = 0;
    for (const Field& snap : traj.snapshots) {
        write_text(dir / ("t_" + std::to_string(index) + ".csv"), field_csv(snap));
        ++index;
    }
}

int cmd_run(const std::string& config_path, const std::string& output, int dump_every) {
    RunConfig cfg = load_config(config_path);
    if (cfg.eps.size() != 1)
        throw ConfigError("run: config must carry exactly one eps (use sweep for lists)");
    const double eps = cfg.eps[0];
    Schedule sched(eps);
    Grid grid = cfg.make_grid();
    Field v0 = initial_datum(grid, sched, cfg.make_profile());

    SolverConfig scfg;
    scfg.dt = cfg.dt_for(eps);
    scfg.t_end = cfg.t_end_for(sched);
    scfg.scheme = scheme_from_string(cfg.scheme);
    scfg.clamp_check = true;
    scfg.dump_every = dump_every;

    const fs::path out = resolve_output(!cfg.output_dir.empty() && output.empty()
                                            ? cfg.output_dir
                                            : output);
    ensure_dir(out);
    try {
        Trajectory traj = scfg.scheme == Scheme::duhamel
                              ? duhamel_solve(v0, sched,
                                              std::max(1, static_cast<int>(std::ceil(
                                                              scfg.t_end /
                                                              (theta0() * eps * eps)))))
                              : run_mac(scfg, v0, sched);
        write_text(out / "summary.json", summary_json(cfg, eps, traj).dump(2) + "\n");
        if (dump_every > 0) write_snapshots(out / "snapshots", traj);
        std::cout << "run: eps=" << eps << " steps=" << traj.steps
                  << " max|v|=" << fmt_double(traj.max_abs_v)
                  << " residual=" << fmt_double(energy_residual(traj.ledger)) << "\n";
        return 0;
    } catch (const MaxPrincipleViolation& e) {
        ordered_json j;
        j["eps"] = eps;
        j["error"] = "max_principle_violation";
        j["time"] = e.time;
        j["max_abs_v"] = e.max_abs_v;
        write_text(out / "summary.json", j.dump(2) + "\n");
        std::cerr << "run: " << e.what() << "\n";
        return 2;
    }
}

int cmd_sweep(const std::string& config_path, const std::string& output, int jobs) {
    RunConfig cfg = load_config(config_path);
    if (cfg.eps.size() < 3) throw ConfigError("sweep: need at least 3 eps values");
    SweepReport rep = run_sweep(cfg, jobs);

    const fs::path out = resolve_output(!cfg.output_dir.empty() && output.empty()
                                            ? cfg.output_dir
                                            : output);
    ensure_dir(out);
    write_text(out / "sweep.csv", sweep_csv(rep));
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& row : rep.rows) {
        ordered_json r;
        r["eps"] = row.result.eps;
        r["ok"] = row.ok;
        if (row.ok) {
            r["D"] = row.result.D;
            r["D_times_logeps"] = row.result.D_times_logeps;
            r["min_xi_density"] = row.result.min_xi_density;
        } else {
            r["error"] = row.error;
        }
        r["runtime_seconds"] = row.runtime_seconds;
        j["rows"].push_back(r);
    }
    j["fit_coefficient"] = rep.fit_coefficient;
    j["fit_residual"] = rep.fit_residual;
    j["loglog_slope"] = rep.loglog_slope;
    j["bounded_flag"] = rep.bounded_flag;
    write_text(out / "sweep.json", j.dump(2) + "\n");
    std::cout << sweep_csv(rep);
    std::cout << "fit: D ~ " << fmt_double(rep.fit_coefficient)
              << " / |log eps| (rms residual " << fmt_double(rep.fit_residual)
              << "), loglog slope " << fmt_double(rep.loglog_slope) << ", bounded="
              << (rep.bounded_flag ? "true" : "false") << "\n";
    for (const auto& row : rep.rows)
        if (!row.ok) return 3;
    return 0;
}

int cmd_verify_potential(std::vector<double> eps_list, const std::string& output) {
    if (eps_list.empty()) eps_list = {0.2, 0.1, 0.05};
    std::string csv =
        "eps,t,alpha,beta,delta,eta,log_delta,log_eta,"
        "bracket_delta_coarse,bracket_eta_coarse,bracket_delta_direct,bracket_eta_direct,"
        "signs_ok\n";
    bool hard_ok = true;
    for (double eps : eps_list) {
        Schedule sched(eps);
        for (double frac : {0.0, 0.5, 1.0}) {
            const double t = frac * sched.t_eps;
            PotentialContext ctx(sched, t);
            RootPair rp = find_roots(ctx);
            BracketStatus st = remark_bracket_status(ctx, rp);
            SignStructureReport rep = verify_sign_structure(ctx, rp, 1000);
            const bool signs = rep.intervals_ok && rep.odd_ok && rep.integrals_ok;
            hard_ok = hard_ok && signs;
            csv += fmt_double(eps);
            csv += ',';
            csv += fmt_double(t);
            csv += ',';
            csv += fmt_double(rp.alpha);
            csv += ',';
            csv += fmt_double(rp.beta);
            csv += ',';
            csv += fmt_double(rp.delta);
            csv += ',';
            csv += fmt_double(rp.eta);
            csv += ',';
            csv += fmt_double(rp.log_delta);
            csv += ',';
            csv += fmt_double(rp.log_eta);
            csv += ',';
            csv += st.delta_coarse ? "1" : "0";
            csv += ',';
            csv += st.eta_coarse ? "1" : "0";
            csv += ',';
            csv += st.delta_direct ? "1" : "0";
            csv += ',';
            csv += st.eta_direct ? "1" : "0";
            csv += ',';
            csv += signs ? "1" : "0";
            csv += '\n';
        }
    }
    std::cout << csv;
    if (!output.empty()) {
        const fs::path out = resolve_output(output);
        ensure_dir(out);
        write_text(out / "potential.csv", csv);
    }
    std::cout << "note: alpha/beta round to 1.0 in doubles; log_delta/log_eta carry the "
                 "well offsets. Bracket columns are report-only.\n";
    return hard_ok ? 0 : 1;
}

int cmd_verify_energy(const std::string& config_path, const std::string& output) {
    RunConfig cfg = load_config(config_path);
    if (cfg.eps.size() != 1) throw ConfigError("verify-energy: exactly one eps");
    const double eps = cfg.eps[0];
    Schedule sched(eps);
    Grid grid = cfg.make_grid();
    Field v0 = initial_datum(grid, sched, cfg.make_profile());
    SolverConfig scfg;
    scfg.dt = cfg.dt_for(eps);
    scfg.t_end = cfg.t_end_for(sched);
    scfg.scheme = scheme_from_string(cfg.scheme);
    Trajectory traj = run_mac(scfg, v0, sched);

    std::string csv = "t,term_time_deriv,term_mu_t,term_xi,term_G,residual\n";
    for (const auto& row : traj.ledger_series) {
        csv += fmt_double(row.t);
        csv += ',';
        csv += fmt_double(row.term_time_deriv);
        csv += ',';
        csv += fmt_double(row.term_mu_t);
        csv += ',';
        csv += fmt_double(row.term_xi);
        csv += ',';
        csv += fmt_double(row.term_G);
        csv += ',';
        csv += fmt_double(row.residual);
        csv += '\n';
    }
    const fs::path out = resolve_output(output);
    ensure_dir(out);
    write_text(out / "energy.csv", csv);
    const double resid = energy_residual(traj.ledger);
    std::cout << "energy equality residual: " << fmt_double(resid) << " (eps=" << eps
              << ", n=" << cfg.n_cells << ", dt=" << fmt_double(scfg.dt)
              << ", scheme=" << cfg.scheme << ")\n"
              << "min xi density: " << fmt_double(traj.min_xi_density)
              << " (F-term scale " << fmt_double(traj.xi_scale) << ")\n"
              << "note: the G-term weight changes sign at t = |log eps|/(2 pi) = "
              << fmt_double(0.5 * sched.t_eps) << " (recorded, not clamped)\n";
    return 0;
}

int cmd_compare_barrier(double T, double M, double eps, int n, double r_max, double dt,
                        const std::string& output) {
    Schedule sched(eps);
    BarrierSpec spec = make_barrier_spec(T, M, sched);
    Grid grid = Grid::radial(1, r_max, n);
    const double clamp_level = alpha_at_t_eps(sched) * (1.0 - 1e-12);
    Field v0(grid, 0.0, 0.0);
    for (int i = 0; i < grid.n_cells; ++i)
        v0[i] = std::clamp(barrier_w(grid.node(i), 0.0, T, sched), -clamp_level, clamp_level);

    SolverConfig scfg;
    scfg.dt = dt > 0.0 ? dt : eps * eps / 16.0;
    scfg.t_end = spec.t2;
    scfg.dump_every = 1;
    Trajectory traj = run_mac(scfg, v0, sched);
    ComparisonReport rep = check_comparison(traj, spec, sched);
    Field v0m = v0;
    for (double& x : v0m.values) x = -x;
    ComparisonReport rep_low =
        check_comparison(mirror_trajectory(run_mac(scfg, v0m, sched)), spec, sched);
    SubsolutionReport sub = verify_subsolution(spec, sched, 1, 200);

    ordered_json j;
    j["eps"] = eps;
    j["T"] = T;
    j["M"] = M;
    j["t2"] = spec.t2;
    j["threshold"] = threshold(M, eps);
    j["min_v_minus_w"] = rep.min_v_minus_w;
    j["min_v_minus_w_to_teps"] = rep.min_v_minus_w_to_teps;
    ordered_json region = ordered_json::array();
    // Decimated per-snapshot region margins.
    {
        const int stride = std::max(1, rep.snapshots_checked / 40);
        int k = 0;
        for (const Field& snap : traj.snapshots) {
            if (!(snap.time > 0.0) || !(snap.time <= spec.t2)) continue;
            if (k++ % stride) continue;
            const double band = M * sched.eps_pow(snap.time) * sched.log_eps_abs;
            const double zero_set = 2.0 * std::sqrt(T - snap.time);
            double region_min = std::numeric_limits<double>::infinity();
            for (int i = 0; i < snap.size(); ++i)
                if (zero_set - snap.grid.node(i) > band)
                    region_min = std::min(region_min, snap[i]);
            if (region_min == std::numeric_limits<double>::infinity()) continue;
            ordered_json row;
            row["t"] = snap.time;
            row["region_min_v"] = region_min;
            row["margin"] = region_min - threshold(M, eps);
            region.push_back(row);
        }
    }
    j["region_checks"] = region;
    j["worst_upper_margin"] = rep.worst_region_margin;
    j["worst_lower_margin_mirrored"] = rep_low.worst_region_margin;
    j["subsolution_max_operator"] = sub.max_operator;
    j["subsolution_tolerance"] = sub.tolerance;

    const fs::path out = resolve_output(output);
    ensure_dir(out);
    write_text(out / "barrier.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_mcf_test(double eps, double R0, int N, const std::string& output) {
    Schedule sched(eps);
    RadiusLaw law = RadiusLaw::sphere(N, R0);
    const double r_max = 2.4 * R0;
    const int n = static_cast<int>(std::ceil(16.0 * r_max / eps));
    Grid grid = Grid::radial(N, r_max, n);
    Field v0 = initial_datum(grid, sched, InitialProfile::interface_at(R0));
    SolverConfig scfg;
    scfg.scheme = Scheme::imex2;
    scfg.dt = eps * eps / 4.0;
    const double cutoff = 10.0 * eps;
    scfg.t_end = std::min((R0 * R0 - cutoff * cutoff) / (2.0 * law.curvature_factor()),
                          sched.t_eps);
    const int total_steps = static_cast<int>(std::ceil(scfg.t_end / scfg.dt));
    scfg.dump_every = std::max(1, total_steps / 40);
    Trajectory traj = run_mac(scfg, v0, sched);
    RadiusErrorReport rep = radius_error(traj, law, eps);

    std::string csv = "t,r_extracted,r_exact,rel_error\n";
    for (const auto& row : rep.rows) {
        csv += fmt_double(row.t);
        csv += ',';
        csv += fmt_double(row.r_extracted);
        csv += ',';
        csv += fmt_double(row.r_exact);
        csv += ',';
        csv += fmt_double(row.rel_error);
        csv += '\n';
    }
    const fs::path out = resolve_output(output);
    ensure_dir(out);
    write_text(out / "mcf.csv", csv);
    std::cout << csv;
    std::cout << "max rel error: " << fmt_double(rep.max_rel_error) << " over "
              << rep.rows.size() << " snapshots (radius >= " << fmt_double(rep.cutoff_radius)
              << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"macflow: modified Allen-Cahn laboratory"};
    app.require_subcommand(1);

    std::string config_path, output;
    int jobs = 1, dump_every = 0;

    auto* run = app.add_subcommand("run", "integrate one MAC trajectory");
    run->add_option("--config", config_path, "JSON config")->required();
    run->add_option("--output", output, "output directory");
    run->add_option("--dump-every", dump_every, "snapshot cadence in steps");

    auto* sweep = app.add_subcommand("sweep", "discrepancy decay across an eps list");
    sweep->add_option("--config", config_path, "JSON config with eps list")->required();
    sweep->add_option("--output", output, "output directory");
    sweep->add_option("--jobs", jobs, "concurrent rows");

    std::vector<double> eps_list;
    auto* vp = app.add_subcommand("verify-potential", "root structure and sign pattern");
    vp->add_option("--eps", eps_list, "eps values (default 0.2 0.1 0.05)");
    vp->add_option("--output", output, "output directory");

    auto* ve = app.add_subcommand("verify-energy", "per-step energy ledger CSV");
    ve->add_option("--config", config_path, "JSON config")->required();
    ve->add_option("--output", output, "output directory");

    double T = 1.0, M = 1.0, eps_one = 0.1, dt_flag = 0.0, rmax_flag = 4.6;
    int n_flag = 2048, N_flag = 1;
    double R0_flag = 1.0;
    auto* cb = app.add_subcommand("compare-barrier", "sub-solution domination checks");
    cb->add_option("--T", T, "barrier extinction parameter");
    cb->add_option("--M", M, "threshold exponent parameter");
    cb->add_option("--eps", eps_one, "interface width");
    cb->add_option("--n", n_flag, "cells");
    cb->add_option("--r-max", rmax_flag, "domain radius");
    cb->add_option("--dt", dt_flag, "time step (default eps^2/16)");
    cb->add_option("--output", output, "output directory");

    auto* mc = app.add_subcommand("mcf-test", "interface radius vs shrinking sphere");
    mc->add_option("--eps", eps_one, "interface width");
    mc->add_option("--R0", R0_flag, "initial radius");
    mc->add_option("--N", N_flag, "ambient dimension minus one");
    mc->add_option("--output", output, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, output, dump_every);
        if (sweep->parsed()) return cmd_sweep(config_path, output, jobs);
        if (vp->parsed()) return cmd_verify_potential(eps_list, output);
        if (ve->parsed()) return cmd_verify_energy(config_path, output);
        if (cb->parsed())
            return cmd_compare_barrier(T, M, eps_one, n_flag, rmax_flag, dt_flag, output);
        if (mc->parsed()) return cmd_mcf_test(eps_one, R0_flag, N_flag, output);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PreconditionUnmet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const MaxPrincipleViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
