#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "macflow/errors.hpp"

namespace macflow {

enum class GridKind { radial, line };

// Cell-centered grid on [0, r_max], nodes r_i = (i+1/2) h. Radially symmetric
// reduction of R^{N+1}: integrals carry the weight sigma_N r^N, the Laplacian
// becomes v'' + (N/r) v'. kind == line means N = 0 on a plain interval.
struct Grid {
    GridKind kind = GridKind::line;
    int ambient_dim_minus_one = 0; // N
    double r_max = 0.0;
    int n_cells = 0;
    double h = 0.0;

    Grid() = default;

    Grid(GridKind k, int N, double rmax, int n) : kind(k), ambient_dim_minus_one(N), r_max(rmax), n_cells(n) {
        if (!(rmax > 0.0)) throw ConfigError("Grid: r_max must be positive");
        if (n < 16) throw ConfigError("Grid: n_cells must be at least 16");
        if (k == GridKind::radial && N < 1)
            throw ConfigError("Grid: radial grids need ambient dimension N+1 >= 2");
        if (k == GridKind::line && N != 0)
            throw ConfigError("Grid: line grids have N = 0");
        h = rmax / n;
    }

    static Grid radial(int N, double rmax, int n) { return Grid(GridKind::radial, N, rmax, n); }
    static Grid line(double rmax, int n) { return Grid(GridKind::line, 0, rmax, n); }

    double node(int i) const { return (i + 0.5) * h; }
    double face(int i) const { return i * h; } // face i sits left of cell i

    // Area of the unit N-sphere: sigma_N = 2 pi^{(N+1)/2} / Gamma((N+1)/2).
    double sigma() const {
        if (kind == GridKind::line) return 1.0;
        const double N = ambient_dim_minus_one;
        return 2.0 * std::pow(std::numbers::pi, 0.5 * (N + 1.0)) / std::tgamma(0.5 * (N + 1.0));
    }

    // Quadrature weight of cell i (midpoint rule against the radial measure).
    double weight(int i) const {
        if (kind == GridKind::line) return h;
        return sigma() * std::pow(node(i), ambient_dim_minus_one) * h;
    }

    // Weight of interior face i (i = 1..n-1) in the discrete Dirichlet form.
    double face_weight(int i) const {
        if (kind == GridKind::line) return h;
        return sigma() * std::pow(face(i), ambient_dim_minus_one) * h;
    }

    bool operator==(const Grid& o) const {
        return kind == o.kind && ambient_dim_minus_one == o.ambient_dim_minus_one &&
               r_max == o.r_max && n_cells == o.n_cells;
    }
};

struct Field {
    Grid grid;
    std::vector<double> values;
    double time = 0.0;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0, double t = 0.0)
        : grid(g), values(static_cast<size_t>(g.n_cells), fill), time(t) {}

    int size() const { return grid.n_cells; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

// Conservative (flux-form) radial Laplacian with zero-flux closures at both
// ends. The axis face has zero measure for N >= 1, so the r = 0 closure is
// automatic; at r_max the mirror ghost gives zero flux, matching the Neumann
// problem. Exact on quadratics in the interior and at the axis cell.
inline void laplacian_into(const Field& v, Field& out) {
    const Grid& g = v.grid;
    const int n = g.n_cells;
    const double inv_h2 = 1.0 / (g.h * g.h);
    if (g.kind == GridKind::line) {
        for (int i = 0; i < n; ++i) {
            const double left = (i > 0) ? v[i - 1] - v[i] : 0.0;
            const double right = (i + 1 < n) ? v[i + 1] - v[i] : 0.0;
            out[i] = (left + right) * inv_h2;
        }
        return;
    }
    const int N = g.ambient_dim_minus_one;
    for (int i = 0; i < n; ++i) {
        const double rc = std::pow(g.node(i), N);
        const double wl = (i > 0) ? std::pow(g.face(i), N) : 0.0;
        const double wr = (i + 1 < n) ? std::pow(g.face(i + 1), N) : 0.0;
        const double left = (i > 0) ? wl * (v[i - 1] - v[i]) : 0.0;
        const double right = (i + 1 < n) ? wr * (v[i + 1] - v[i]) : 0.0;
        out[i] = (left + right) * inv_h2 / rc;
    }
}

inline Field laplacian(const Field& v) {
    Field out(v.grid, 0.0, v.time);
    laplacian_into(v, out);
    return out;
}

// |Dv|^2 per cell, central differences with mirror ghosts at both ends (even
// reflection at the axis, zero normal derivative at r_max).
inline void grad_sq_into(const Field& v, Field& out) {
    const int n = v.grid.n_cells;
    const double inv_2h = 0.5 / v.grid.h;
    for (int i = 0; i < n; ++i) {
        const double vm = (i > 0) ? v[i - 1] : v[0];
        const double vp = (i + 1 < n) ? v[i + 1] : v[n - 1];
        const double d = (vp - vm) * inv_2h;
        out[i] = d * d;
    }
}

inline Field grad_sq(const Field& v) {
    Field out(v.grid, 0.0, v.time);
    grad_sq_into(v, out);
    return out;
}

// Midpoint quadrature against the radial measure.
inline double integrate(const Field& density) {
    const Grid& g = density.grid;
    double sum = 0.0;
    if (g.kind == GridKind::line) {
        for (int i = 0; i < g.n_cells; ++i) sum += density[i];
        return sum * g.h;
    }
    const int N = g.ambient_dim_minus_one;
    const double sh = g.sigma() * g.h;
    for (int i = 0; i < g.n_cells; ++i)
        sum += std::pow(g.node(i), N) * density[i];
    return sum * sh;
}

// Discrete Dirichlet form sum_faces w_f (Du)(Dv); the flux Laplacian satisfies
// integrate(u * laplacian(v)) = -dirichlet_form(u, v) exactly.
inline double dirichlet_form(const Field& u, const Field& v) {
    const Grid& g = u.grid;
    const double inv_h2 = 1.0 / (g.h * g.h);
    double sum = 0.0;
    for (int i = 1; i < g.n_cells; ++i)
        sum += g.face_weight(i) * (u[i] - u[i - 1]) * (v[i] - v[i - 1]) * inv_h2;
    return sum;
}

inline bool all_finite(const Field& v) {
    for (double x : v.values)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double max_abs(const Field& v) {
    double m = 0.0;
    for (double x : v.values) m = std::max(m, std::abs(x));
    return m;
}

} // namespace macflow
