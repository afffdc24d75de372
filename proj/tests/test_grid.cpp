#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "macflow/grid.hpp"
#include "oracles.hpp"

using namespace macflow;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

Field fill(const Grid& g, double (*fn)(double)) {
    Field v(g);
    for (int i = 0; i < g.n_cells; ++i) v[i] = fn(g.node(i));
    return v;
}
} // namespace

TEST_CASE("grid construction and validation") {
    CHECK_THROWS_AS(Grid::radial(0, 1.0, 64), ConfigError);
    CHECK_THROWS_AS(Grid::radial(1, -1.0, 64), ConfigError);
    CHECK_THROWS_AS(Grid::line(1.0, 8), ConfigError);
    Grid g = Grid::radial(1, 2.0, 128);
    CHECK(g.h == Approx(2.0 / 128));
    CHECK(g.node(0) == Approx(0.5 * g.h));
    CHECK(g.sigma() == Approx(2.0 * pi).epsilon(1e-14));
    CHECK(Grid::radial(2, 1.0, 64).sigma() == Approx(4.0 * pi).epsilon(1e-14));
}

TEST_CASE("laplacian of constants and quadratics") {
    for (int N : {1, 2}) {
        Grid g = Grid::radial(N, 2.0, 128);
        Field c(g, 3.7);
        Field lc = laplacian(c);
        for (int i = 0; i < g.n_cells; ++i) CHECK(lc[i] == Approx(0.0).margin(1e-12));

        Field r2 = fill(g, [](double r) { return r * r; });
        Field lr2 = laplacian(r2);
        if (N == 1) {
            // N = 1 flux form is exact on r^2 away from the outer Neumann
            // closure, including the axis cell.
            for (int i = 0; i < g.n_cells - 1; ++i)
                CHECK(lr2[i] == Approx(2.0 * (N + 1)).epsilon(1e-10));
        } else {
            // For N >= 2 the midpoint cell volume r_i^N h deviates from the
            // exact one near the axis (O(h^2/r^2) pointwise, O(1) only at the
            // axis cell whose weight is O(h^{N+1})); away from it r^2 is
            // recovered to O(h^2).
            for (int i = 0; i < g.n_cells - 1; ++i) {
                if (g.node(i) < 0.25 * g.r_max) continue;
                CHECK(lr2[i] == Approx(2.0 * (N + 1)).epsilon(1e-3));
            }
        }
    }
}

TEST_CASE("laplacian of cosine on a line grid") {
    const double L = 1.0;
    Grid g = Grid::line(L, 256);
    Field v = fill(g, [](double r) { return std::cos(pi * r / 1.0); });
    Field lv = laplacian(v);
    double max_err = 0.0;
    for (int i = 0; i < g.n_cells; ++i)
        max_err = std::max(max_err, std::abs(lv[i] + (pi / L) * (pi / L) * v[i]));
    CHECK(max_err < 1e-3);

    // Refinement: doubling n reduces the error by the asymptotic factor 4.
    Grid g2 = Grid::line(L, 512);
    Field w = fill(g2, [](double r) { return std::cos(pi * r / 1.0); });
    Field lw = laplacian(w);
    double max_err2 = 0.0;
    for (int i = 0; i < g2.n_cells; ++i)
        max_err2 = std::max(max_err2, std::abs(lw[i] + (pi / L) * (pi / L) * w[i]));
    CHECK(max_err / max_err2 >= 3.5);
}

TEST_CASE("grad_sq basics") {
    Grid g = Grid::radial(1, 2.0, 128);
    Field c(g, -0.4);
    Field gc = grad_sq(c);
    for (int i = 0; i < g.n_cells; ++i) CHECK(gc[i] == 0.0);

    Field lin = fill(g, [](double r) { return r; });
    Field gl = grad_sq(lin);
    for (int i = 1; i < g.n_cells - 1; ++i) CHECK(gl[i] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grad_sq on a tanh layer matches the analytic identity") {
    // eps = 8h: central differences track (1-v^2)^2/eps^2 within 2% relative.
    Grid g = Grid::line(2.0, 512);
    const double eps = 8.0 * g.h;
    Field v(g);
    for (int i = 0; i < g.n_cells; ++i) v[i] = std::tanh((1.0 - g.node(i)) / eps);
    Field gs = grad_sq(v);
    double worst = 0.0;
    for (int i = 3; i < g.n_cells - 3; ++i) {
        // Transition-layer cells; in the saturated tail the chord-error
        // constant tends to (4/3)(h/eps)^2, grazing 2% at eps = 8h exactly.
        if (std::abs(v[i]) > 0.95) continue;
        const double exact = (1.0 - v[i] * v[i]) * (1.0 - v[i] * v[i]);
        worst = std::max(worst, std::abs(gs[i] * eps * eps - exact) / exact);
    }
    CHECK(worst < 0.02);
}

TEST_CASE("integrate against the radial measure") {
    Grid g = Grid::radial(1, 1.5, 256);
    Field one(g, 1.0);
    CHECK(integrate(one) == Approx(pi * 1.5 * 1.5).epsilon(1e-12));

    Field r = fill(g, [](double x) { return x; });
    Grid g1 = Grid::radial(1, 1.0, 256);
    Field r1 = fill(g1, [](double x) { return x; });
    CHECK(integrate(r1) == Approx(2.0 * pi / 3.0).epsilon(1e-4));

    Grid gl = Grid::line(0.7, 64);
    Field onel(gl, 1.0);
    CHECK(integrate(onel) == Approx(0.7).epsilon(1e-14));
}

TEST_CASE("discrete integration by parts is exact for the flux Laplacian") {
    oracles::Rng rng(5);
    for (int N : {0, 1, 2}) {
        Grid g = (N == 0) ? Grid::line(1.0, 64) : Grid::radial(N, 1.0, 64);
        Field u(g), v(g);
        for (int i = 0; i < g.n_cells; ++i) {
            const double x = g.node(i);
            u[i] = std::sin(2.0 * x) + 0.3 * rng.unit() * x * (1.0 - x);
            v[i] = std::cos(1.7 * x) + 0.2 * rng.unit();
        }
        Field lv = laplacian(v);
        Field prod(g);
        for (int i = 0; i < g.n_cells; ++i) prod[i] = u[i] * lv[i];
        const double lhs = integrate(prod);
        const double rhs = -dirichlet_form(u, v);
        CHECK(lhs == Approx(rhs).epsilon(1e-11).margin(1e-11));
    }
}
