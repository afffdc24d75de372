#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "macflow/measures.hpp"
#include "macflow/solver.hpp"
#include "oracles.hpp"

using namespace macflow;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
} // namespace

TEST_CASE("initial datum: constants") {
    Schedule s(0.1);
    Grid g = Grid::radial(1, 3.0, 64);
    Field v = initial_datum(g, s, InitialProfile::constant(0.5));
    for (int i = 0; i < g.n_cells; ++i) CHECK(v[i] == 0.5);
    Field xi = xi_density(v, s);
    for (int i = 0; i < g.n_cells; ++i) CHECK(xi[i] >= 0.0);
    CHECK_THROWS_AS(initial_datum(g, s, InitialProfile::constant(1.5)), ConfigError);
}

TEST_CASE("initial datum: interface profile") {
    Schedule s(0.1);
    Grid g = Grid::radial(1, 3.0, 512);
    Field v = initial_datum(g, s, InitialProfile::interface_at(1.0));
    const double expect = std::min(std::tanh(1.0 / s.eps_pow(0.0)), alpha_at_t_eps(s));
    CHECK(v[0] == Approx(expect).margin(1e-6));
    CHECK_THROWS_AS(initial_datum(g, s, InitialProfile::interface_at(2.0)), ConfigError);
    CHECK_THROWS_AS(initial_datum(g, s, InitialProfile::interface_at(-1.0)), ConfigError);
}

TEST_CASE("prepared interface is discretely well-prepared with margin") {
    Schedule s(0.1);
    Grid g = Grid::radial(1, 3.2, 512);
    Field v = initial_datum(g, s, InitialProfile::interface_prepared(1.4));
    Field xi = xi_density(v, s);
    double mn = xi[0];
    for (int i = 0; i < g.n_cells; ++i) mn = std::min(mn, xi[i]);
    CHECK(mn >= -1e-8);
}

TEST_CASE("equilibria are fixed points of step_imex and step_imex2") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 2.0, 64);
    detail::HelmholtzSolver hs(g);
    for (double c : {0.0, 1.0, -1.0}) {
        Field v(g, c);
        Field w = step_imex(v, s, 0.01, hs);
        CHECK(sup_diff(v, w) < 1e-12);
        Field w2 = step_imex2(v, s, 0.01, hs);
        CHECK(sup_diff(v, w2) < 1e-12);
    }
}

TEST_CASE("step_imex with reaction disabled is an implicit heat step") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 2.0, 64);
    detail::HelmholtzSolver hs(g);
    Field c(g, 0.37);
    Field w = step_imex(c, s, 0.01, hs, /*disable_reaction=*/true);
    CHECK(sup_diff(c, w) < 1e-13);
}

TEST_CASE("one imex step matches a finely substepped explicit run") {
    Schedule s(0.1);
    Grid g = Grid::radial(1, 3.0, 256);
    Field v = initial_datum(g, s, InitialProfile::interface_at(1.0));
    const double dt = 1e-5;
    detail::HelmholtzSolver hs(g);
    Field imex = step_imex(v, s, dt, hs);
    Field e = v;
    for (int k = 0; k < 50; ++k) e = step_explicit(e, s, dt / 50.0);
    CHECK(sup_diff(imex, e) < 1e-6);
}

TEST_CASE("solve_heat: constants, eigenmode decay, mass conservation") {
    Grid g = Grid::line(1.0, 512);
    Field c(g, 2.0);
    Field hc = solve_heat(c, 0.37);
    for (int i = 0; i < g.n_cells; ++i) CHECK(hc[i] == Approx(2.0).epsilon(1e-10));

    Field v(g);
    for (int i = 0; i < g.n_cells; ++i) v[i] = std::cos(pi * g.node(i));
    const double t = 0.1;
    Field w = solve_heat(v, t, 1e-5);
    const double decay = std::exp(-pi * pi * t);
    double worst = 0.0;
    for (int i = 0; i < g.n_cells; ++i)
        worst = std::max(worst, std::abs(w[i] - decay * v[i]) / decay);
    CHECK(worst < 1e-4);

    Field m0(g);
    oracles::Rng rng(9);
    for (int i = 0; i < g.n_cells; ++i) m0[i] = rng.range(-1.0, 1.0);
    Field m1 = solve_heat(m0, 0.05);
    CHECK(integrate(m1) == Approx(integrate(m0)).epsilon(1e-10));
}

TEST_CASE("zero initial data stays zero under run_mac") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 2.0, 64);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.2;
    Field v(g, 0.0);
    Trajectory traj = run_mac(cfg, v, s);
    CHECK(traj.max_abs_v == 0.0);
}

TEST_CASE("constant well data stays inside the admissible band") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 2.0, 64);
    const double a = alpha_at_t_eps(s);
    SolverConfig cfg;
    cfg.dt = s.epsilon * s.epsilon / 4.0;
    cfg.t_end = s.t_eps;
    cfg.clamp_check = true;
    Field v = initial_datum(g, s, InitialProfile::constant(a * (1.0 - 1e-12)));
    Trajectory traj = run_mac(cfg, v, s);
    CHECK(traj.max_abs_v <= a + 1e-6);
}

TEST_CASE("imex dt refinement is first order") {
    Schedule s(0.1);
    Grid g = Grid::radial(1, 3.0, 256);
    Field v0 = initial_datum(g, s, InitialProfile::interface_at(1.0));
    const double t_end = 0.05;
    auto run_with = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_end = t_end;
        return run_mac(cfg, v0, s).final_field;
    };
    Field a = run_with(1e-3);
    Field b = run_with(5e-4);
    Field c = run_with(2.5e-4);
    const double e1 = sup_diff(a, b);
    const double e2 = sup_diff(b, c);
    CHECK(e1 / e2 >= 1.8);
}

TEST_CASE("frozen-kappa Lyapunov decay") {
    // With kappa frozen the flow is standard Allen-Cahn; the energy
    // integral is non-increasing step to step.
    Schedule s = Schedule::frozen_for_tests(0.2);
    Grid g = Grid::radial(1, 3.0, 256);
    Field v(g);
    for (int i = 0; i < g.n_cells; ++i)
        v[i] = std::tanh((1.0 - g.node(i)) / s.eps_pow(0.0));
    SolverConfig cfg;
    cfg.dt = s.epsilon * s.epsilon / 4.0;
    cfg.t_end = 40 * cfg.dt;
    detail::HelmholtzSolver hs(g);
    double prev = integrate(mu_density(v, s));
    const double scale = std::abs(prev);
    for (int k = 0; k < 40; ++k) {
        v = step_imex(v, s, cfg.dt, hs);
        const double cur = integrate(mu_density(v, s));
        CHECK(cur <= prev + 1e-8 * scale);
        prev = cur;
    }
}

TEST_CASE("unstable dt triggers NonFiniteState") {
    Schedule s(0.05);
    Grid g = Grid::radial(1, 3.0, 256);
    Field v0 = initial_datum(g, s, InitialProfile::interface_at(1.0));
    SolverConfig cfg;
    cfg.dt = 100.0 * s.epsilon * s.epsilon / 4.0;
    cfg.t_end = 40 * cfg.dt;
    CHECK_THROWS_AS(run_mac(cfg, v0, s), NonFiniteState);
}

TEST_CASE("theta0 closed form") {
    const double expect = 1.0 / (std::sqrt(2.0) * std::sqrt(1.0 + std::sqrt(2.0)) +
                                 std::sqrt(2.0 * (1.0 + std::sqrt(2.0))) / std::numbers::e);
    CHECK(theta0() == Approx(expect).epsilon(1e-12));
    CHECK(1.0 / theta0() == Approx(3.0058).epsilon(1e-4));
    CHECK(theta0() == Approx(0.3327).epsilon(1e-4));
}

TEST_CASE("duhamel fixed point for constant wells") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 2.0, 64);
    Field v(g, 1.0);
    Trajectory traj = duhamel_solve(v, s, 2);
    CHECK(sup_diff(traj.final_field, v) < 1e-10);
}

TEST_CASE("duhamel matches imex over a few windows") {
    Schedule s(0.2);
    Grid g = Grid::radial(1, 4.4, 128);
    Field v0 = initial_datum(g, s, InitialProfile::interface_at(2.0));
    const int windows = 3;
    Trajectory dh = duhamel_solve(v0, s, windows);

    SolverConfig cfg;
    cfg.scheme = Scheme::imex;
    const double t_end = windows * theta0() * s.epsilon * s.epsilon;
    cfg.dt = t_end / 1024;
    cfg.t_end = t_end;
    Trajectory ix = run_mac(cfg, v0, s);
    CHECK(dh.final_field.time == Approx(ix.final_field.time).epsilon(1e-12));
    CHECK(sup_diff(dh.final_field, ix.final_field) < 5e-3);
}
