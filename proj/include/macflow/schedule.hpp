#pragma once

#include <cmath>
#include <numbers>

#include "macflow/errors.hpp"

namespace macflow {

// Time/epsilon bookkeeping for the modified Allen-Cahn flow.
//
// The exponent schedule is kappa(t) = arctan(t)/pi with scaling
// K(eps) = 2/|log eps| and terminal time t_eps = |log eps|/pi.
// All logarithms are natural.
struct Schedule {
    double epsilon = 0.0;      // interface width parameter, in (0,1)
    double log_eps_abs = 0.0;  // |log epsilon|, cached
    double t_eps = 0.0;        // |log epsilon|/pi
    bool frozen = false;       // test hook: kappa == 0, kappa_dot == 0

    Schedule() = default;

    explicit Schedule(double eps) : epsilon(eps) {
        if (!(eps > 0.0) || !(eps < 1.0))
            throw ConfigError("Schedule: epsilon must lie in (0,1)");
        log_eps_abs = -std::log(eps);
        t_eps = log_eps_abs / std::numbers::pi;
    }

    // Test hook only: freezes kappa at 0 so MAC degenerates to the standard
    // Allen-Cahn equation with constant width. Not reachable from run configs.
    static Schedule frozen_for_tests(double eps) {
        Schedule s(eps);
        s.frozen = true;
        return s;
    }

    double kappa(double t) const {
        if (frozen) return 0.0;
        return std::atan(t) / std::numbers::pi;
    }

    double kappa_dot(double t) const {
        if (frozen) return 0.0;
        return 1.0 / (std::numbers::pi * (1.0 + t * t));
    }

    double kappa_ddot(double t) const {
        if (frozen) return 0.0;
        const double one_pt2 = 1.0 + t * t;
        return -2.0 * t / (std::numbers::pi * one_pt2 * one_pt2);
    }

    double K() const { return 2.0 / log_eps_abs; }

    // eps^{1-kappa(t)}, the instantaneous interface width.
    double eps_pow(double t) const {
        return std::exp(-(1.0 - kappa(t)) * log_eps_abs);
    }

    // ((kappa_ddot + kappa_dot^2 |log eps|) / (K kappa_dot)) * eps^{1-kappa}.
    // Implemented as printed; it changes sign at t = |log eps|/(2 pi), which
    // callers record as a diagnostic instead of clamping.
    double energy_weight(double t) const {
        const double kd = kappa_dot(t);
        return (kappa_ddot(t) + kd * kd * log_eps_abs) / (K() * kd) * eps_pow(t);
    }
};

inline double K_of_eps(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw ConfigError("K_of_eps: epsilon must lie in (0,1)");
    return 2.0 / (-std::log(eps));
}

} // namespace macflow
