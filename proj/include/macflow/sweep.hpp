#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "macflow/config.hpp"
#include "macflow/measures.hpp"
#include "macflow/solver.hpp"

namespace macflow {

// ---------------------------------------------------------------------------
// Epsilon sweep: one independent MAC run per eps, resolution scaled so that
// eps/h >= 16, discrepancy totals assembled into a rate report.
// ---------------------------------------------------------------------------

struct SweepRow {
    DiscrepancyResult result;
    double runtime_seconds = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepReport {
    std::vector<SweepRow> rows; // sorted by decreasing eps
    double fit_coefficient = 0.0; // through-origin LSQ of D on 1/|log eps|
    double fit_residual = 0.0;    // RMS residual of that fit
    double loglog_slope = 0.0;    // secondary slope of log D vs log(1/|log eps|)
    bool bounded_flag = false;    // max D|log eps| <= 2x its value at the largest eps
};

inline SweepRow sweep_one(const RunConfig& cfg, double eps) {
    SweepRow row;
    const auto start = std::chrono::steady_clock::now();
    try {
        Schedule sched(eps);
        const int n_scaled = std::max(cfg.n_cells,
                                      static_cast<int>(std::ceil(16.0 * cfg.r_max / eps)));
        Grid grid = (cfg.N == 0) ? Grid::line(cfg.r_max, n_scaled)
                                 : Grid::radial(cfg.N, cfg.r_max, n_scaled);
        Field v0 = initial_datum(grid, sched, cfg.make_profile());
        SolverConfig scfg;
        scfg.dt = cfg.dt_for(eps);
        scfg.t_end = sched.t_eps;
        scfg.scheme = scheme_from_string(cfg.scheme);
        scfg.clamp_check = true;
        Trajectory traj = run_mac(scfg, v0, sched);
        row.result = discrepancy_total(traj, sched);
        row.ok = true;
    } catch (const std::exception& e) {
        row.error = e.what();
        row.result.eps = eps;
    }
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

inline SweepReport run_sweep(const RunConfig& cfg, int jobs = 1) {
    std::vector<double> eps = cfg.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());

    SweepReport rep;
    rep.rows.resize(eps.size());
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= eps.size()) return;
            rep.rows[k] = sweep_one(cfg, eps[k]);
        }
    };
    const int nw = std::min<int>(jobs, static_cast<int>(eps.size()));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Through-origin least squares of D against x = 1/|log eps|.
    double sxx = 0.0, sxy = 0.0;
    int good = 0;
    for (const auto& row : rep.rows) {
        if (!row.ok) continue;
        const double x = 1.0 / std::abs(std::log(row.result.eps));
        sxx += x * x;
        sxy += x * row.result.D;
        ++good;
    }
    rep.fit_coefficient = (sxx > 0.0) ? sxy / sxx : 0.0;
    double ss = 0.0;
    for (const auto& row : rep.rows) {
        if (!row.ok) continue;
        const double x = 1.0 / std::abs(std::log(row.result.eps));
        const double r = row.result.D - rep.fit_coefficient * x;
        ss += r * r;
    }
    rep.fit_residual = good ? std::sqrt(ss / good) : 0.0;

    // Secondary log-log slope.
    {
        double sx = 0.0, sy = 0.0, sxx2 = 0.0, sxy2 = 0.0;
        int m = 0;
        for (const auto& row : rep.rows) {
            if (!row.ok || !(row.result.D > 0.0)) continue;
            const double lx = std::log(1.0 / std::abs(std::log(row.result.eps)));
            const double ly = std::log(row.result.D);
            sx += lx;
            sy += ly;
            sxx2 += lx * lx;
            sxy2 += lx * ly;
            ++m;
        }
        const double den = m * sxx2 - sx * sx;
        rep.loglog_slope = (m >= 2 && den != 0.0) ? (m * sxy2 - sx * sy) / den : 0.0;
    }

    if (!rep.rows.empty() && rep.rows.front().ok) {
        const double head = rep.rows.front().result.D_times_logeps;
        double worst = head;
        bool all_ok = true;
        for (const auto& row : rep.rows) {
            if (!row.ok) {
                all_ok = false;
                continue;
            }
            worst = std::max(worst, row.result.D_times_logeps);
        }
        rep.bounded_flag = all_ok && worst <= 2.0 * head;
    }
    return rep;
}

inline std::string sweep_csv(const SweepReport& rep) {
    std::string s = "eps,D,D_times_logeps,min_xi_density,runtime_seconds\n";
    for (const auto& row : rep.rows) {
        s += fmt_double(row.result.eps);
        s += ',';
        s += row.ok ? fmt_double(row.result.D) : "nan";
        s += ',';
        s += row.ok ? fmt_double(row.result.D_times_logeps) : "nan";
        s += ',';
        s += row.ok ? fmt_double(row.result.min_xi_density) : "nan";
        s += ',';
        s += fmt_double(row.runtime_seconds);
        s += '\n';
    }
    return s;
}

} // namespace macflow
