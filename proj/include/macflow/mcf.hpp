#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "macflow/errors.hpp"
#include "macflow/grid.hpp"
#include "macflow/solver.hpp"

namespace macflow {

// ---------------------------------------------------------------------------
// Exact mean-curvature-flow references: shrinking spheres/cylinders and the
// grim reaper graph, plus zero-level extraction from MAC fields.
// ---------------------------------------------------------------------------

struct RadiusLaw {
    enum class Kind { sphere, cylinder } kind = Kind::sphere;
    int N = 1;  // ambient dimension minus one
    int j = 0;  // cylinder axis dimensions (1 <= j < N)
    double R0 = 0.0;

    static RadiusLaw sphere(int N, double R0) {
        if (N < 1) throw ConfigError("RadiusLaw: sphere needs N >= 1");
        if (!(R0 > 0.0)) throw ConfigError("RadiusLaw: R0 must be positive");
        return {Kind::sphere, N, 0, R0};
    }
    static RadiusLaw cylinder(int N, int j, double R0) {
        if (j < 1 || j >= N) throw ConfigError("RadiusLaw: cylinder needs 1 <= j < N");
        if (!(R0 > 0.0)) throw ConfigError("RadiusLaw: R0 must be positive");
        return {Kind::cylinder, N, j, R0};
    }

    int curvature_factor() const { return kind == Kind::sphere ? N : N - j; }
    double extinction() const { return R0 * R0 / (2.0 * curvature_factor()); }

    // r(t) = sqrt(R0^2 - 2 m t), m = N for spheres, N - j for cylinders.
    double radius(double t) const {
        if (!(t >= 0.0) || !(t < extinction()))
            throw ConfigError("RadiusLaw: t outside [0, extinction)");
        return std::sqrt(R0 * R0 - 2.0 * curvature_factor() * t);
    }
};

inline double sphere_radius(double t, const RadiusLaw& law) { return law.radius(t); }

// Translating graph u_t(p) = t - log cos p on (-pi/2, pi/2).
inline double grim_reaper(double p, double t) {
    if (!(std::abs(p) < std::numbers::pi / 2.0))
        throw ConfigError("grim_reaper: |p| must be below pi/2");
    return t - std::log(std::cos(p));
}

// Locates the single sign change of a monotone interface profile by linear
// interpolation between the bracketing cells.
inline double extract_zero_level(const Field& v) {
    int crossings = 0;
    double r_star = 0.0;
    for (int i = 0; i + 1 < v.size(); ++i) {
        const double a = v[i], b = v[i + 1];
        if (a == 0.0) {
            ++crossings;
            r_star = v.grid.node(i);
        } else if (a * b < 0.0) {
            ++crossings;
            r_star = v.grid.node(i) + v.grid.h * a / (a - b);
        }
    }
    if (crossings == 0) throw NoInterface("extract_zero_level: no sign change");
    if (crossings > 1)
        throw MultipleInterfaces("extract_zero_level: " + std::to_string(crossings) +
                                 " sign changes");
    return r_star;
}

struct RadiusErrorRow {
    double t = 0.0;
    double r_extracted = 0.0;
    double r_exact = 0.0;
    double rel_error = 0.0;
};

struct RadiusErrorReport {
    std::vector<RadiusErrorRow> rows;
    double max_rel_error = 0.0;
    bool monotone_decreasing = true; // up to 1e-3 R0 jitter
    double cutoff_radius = 0.0;      // comparisons kept while exact radius >= cutoff
};

// Compares extracted interface radius against the exact law across trajectory
// snapshots, keeping times where the law radius is at least 10 eps.
inline RadiusErrorReport radius_error(const Trajectory& traj, const RadiusLaw& law,
                                      double eps) {
    RadiusErrorReport rep;
    rep.cutoff_radius = 10.0 * eps;
    double prev = std::numeric_limits<double>::infinity();
    for (const Field& snap : traj.snapshots) {
        if (!(snap.time < law.extinction())) break;
        const double exact = law.radius(snap.time);
        if (exact < rep.cutoff_radius) break;
        const double got = extract_zero_level(snap);
        RadiusErrorRow row{snap.time, got, exact, std::abs(got - exact) / exact};
        rep.rows.push_back(row);
        rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
        if (got > prev + 1e-3 * law.R0) rep.monotone_decreasing = false;
        prev = got;
    }
    if (rep.rows.empty()) throw PreconditionUnmet("radius_error: no comparable snapshots");
    return rep;
}

} // namespace macflow
