#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "macflow/barrier.hpp"
#include "oracles.hpp"

using namespace macflow;
using Catch::Approx;

TEST_CASE("barrier_w values") {
    Schedule s(0.1);
    const double T = 1.0;
    // On the zero set the barrier vanishes.
    for (double t : {0.0, 0.3, 0.9}) {
        const double r0 = 2.0 * std::sqrt(T - t);
        CHECK(barrier_w(r0, t, T, s) == Approx(0.0).margin(1e-14));
    }
    // Saturation at the origin.
    CHECK(std::abs(barrier_w(0.0, 0.0, T, s) - 1.0) < 1e-15);
    // Late-time negative sign at fixed r > 0.
    CHECK(barrier_w(0.5, 0.999 * T, T, s) < 0.0);
    CHECK_THROWS_AS(barrier_w(0.5, T, T, s), ConfigError);
    CHECK_THROWS_AS(barrier_w(0.5, 1.5 * T, T, s), ConfigError);
}

TEST_CASE("threshold") {
    CHECK(threshold(1.0, std::exp(-1.0)) == Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(threshold(1.0, std::exp(-1.0)) == Approx(0.7615941560).epsilon(1e-9));
    CHECK(threshold(50.0, 0.1) == Approx(1.0).epsilon(1e-12));
    // Consistency: the barrier evaluated at r-offset M eps^{1-k} |log eps|
    // from its zero set equals the threshold.
    Schedule s(0.1);
    const double T = 1.0, M = 1.0, t = 0.2;
    const double offset = M * s.eps_pow(t) * s.log_eps_abs;
    const double r = 2.0 * std::sqrt(T - t) - offset;
    CHECK(barrier_w(r, t, T, s) == Approx(threshold(M, 0.1)).epsilon(1e-12));
}

TEST_CASE("solve_t2") {
    Schedule s(0.1);
    const double T = 1.0;
    // M -> 0 pushes t2 to T.
    CHECK(solve_t2(T, 1e-8, s) == Approx(T).epsilon(1e-10));
    // Residual of the defining equation at the solution.
    const double M = 1.0;
    const double t2 = solve_t2(T, M, s);
    const double ep = s.eps_pow(t2);
    const double resid = t2 + 0.25 * M * M * ep * ep * s.log_eps_abs * s.log_eps_abs - T;
    CHECK(std::abs(resid) < 1e-12);
    CHECK(t2 > 0.0);
    CHECK(t2 < T);
    // Larger M shrinks the window.
    CHECK(solve_t2(T, 2.0, s) < t2);
    // Empty window.
    CHECK_THROWS_AS(solve_t2(1e-6, 10.0, s), NoSolution);
}

TEST_CASE("psi is strictly increasing on a grid") {
    Schedule s(0.1);
    const double T = 1.0, M = 1.0;
    const double L2 = s.log_eps_abs * s.log_eps_abs;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double t = T * i / 100.0;
        const double ep = s.eps_pow(t);
        const double psi = t + 0.25 * M * M * ep * ep * L2 - T;
        CHECK(psi > prev);
        prev = psi;
    }
}

TEST_CASE("comparison against a dominating constant") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 4.0, 128);
    Field ones(g, 1.0 - 1e-12);
    SolverConfig cfg;
    cfg.dt = s.epsilon * s.epsilon / 4.0;
    cfg.t_end = 0.3;
    cfg.dump_every = 1;
    Trajectory traj = run_mac(cfg, ones, s);
    BarrierSpec spec = make_barrier_spec(1.0, 1.0, s);
    ComparisonReport rep = check_comparison(traj, spec, s);
    CHECK(rep.initial_dominates);
    CHECK(rep.min_v_minus_w >= 0.0);
    CHECK(rep.snapshots_checked > 0);
}

TEST_CASE("comparison precondition") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 4.0, 128);
    Field low(g, -0.5);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.05;
    Trajectory traj = run_mac(cfg, low, s);
    BarrierSpec spec = make_barrier_spec(1.0, 1.0, s);
    CHECK_THROWS_AS(check_comparison(traj, spec, s), PreconditionUnmet);
}

TEST_CASE("subsolution report in the sampled zone") {
    Schedule s(0.1);
    BarrierSpec spec = make_barrier_spec(1.0, 1.0, s);
    SubsolutionReport rep = verify_subsolution(spec, s, 1, 100);
    CHECK(rep.all_below_tolerance);
    CHECK(rep.max_operator <= rep.tolerance);
    // The finite-difference operator tracks the analytic bracket reduction.
    CHECK(rep.max_fd_vs_analytic < 1e-3);
}
