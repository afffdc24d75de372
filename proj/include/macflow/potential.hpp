#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "macflow/errors.hpp"
#include "macflow/schedule.hpp"

namespace macflow {

// ---------------------------------------------------------------------------
// The MAC nonlinearity family.
//
//   f(x)   = (x^2-1) x
//   g(x)   = (x^2-1) log|(1+x)/(1-x)|
//   F(u)   = (1/2)(u^2-1)^2
//   G(u)   = (1/3)(u-2)(u+1)^2 log|1+u| - (1/3)(u+2)(u-1)^2 log|1-u|
//            + u^2/3 + (4/3) log 2 - 1/3
//   phi(x) = (2/eps^{2(1-kappa)}) f(x) - (kappa_dot/K) g(x)
//   W(u)   = F(u)/(2 eps^{1-kappa}) - (kappa_dot/K) G(u)
//
// F' = 2 f and G' = g, which is what makes W the antiderivative structure
// behind phi.
// ---------------------------------------------------------------------------

inline double f(double x) { return (x * x - 1.0) * x; }

// log singularities at +-1 are dominated by the (x^2-1) factor; within 1e-12
// of +-1 we return the continuous limit 0 so no Inf*0 can appear.
inline double g_fn(double x) {
    const double ax = std::abs(x);
    if (std::abs(1.0 - ax) < 1e-12) return 0.0;
    return (x * x - 1.0) * std::log(std::abs((1.0 + x) / (1.0 - x)));
}

inline double F_fn(double u) {
    const double s = u * u - 1.0;
    return 0.5 * s * s;
}

inline double G_fn(double u) {
    const double c0 = (4.0 / 3.0) * std::log(2.0) - 1.0 / 3.0;
    double value = u * u / 3.0 + c0;
    // Each log term carries a vanishing squared factor; drop it inside the
    // 1e-12 neighborhood where the product is below 3e-23 anyway.
    const double p = 1.0 + u;
    if (std::abs(p) >= 1e-12)
        value += (u - 2.0) * p * p * std::log(std::abs(p)) / 3.0;
    const double m = 1.0 - u;
    if (std::abs(m) >= 1e-12)
        value -= (u + 2.0) * (u - 1.0) * (u - 1.0) * std::log(std::abs(m)) / 3.0;
    return value;
}

// Smooth cutoff derivative from the existence proof: 1 on [-1,1], 0 outside
// (-2,2), quintic smoothstep in between (C^2 at the joins).
inline double chi_dot(double tau) {
    const double a = std::abs(tau);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double s = a - 1.0;
    return 1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

// Frozen coefficients of the nonlinearity at one (eps, t).
struct PotentialContext {
    double eps = 0.0;
    double t = 0.0;
    double eps_pow = 0.0;           // eps^{1-kappa(t)}
    double two_over_eps_pow2 = 0.0; // 2/eps^{2(1-kappa)}
    double kdot_over_K = 0.0;       // kappa_dot(t)/K(eps)
    double g_scale = 0.0;           // (|log eps|/2) kappa_dot eps^{2(1-kappa)}

    PotentialContext() = default;

    PotentialContext(const Schedule& sched, double time) : eps(sched.epsilon), t(time) {
        eps_pow = sched.eps_pow(time);
        two_over_eps_pow2 = 2.0 / (eps_pow * eps_pow);
        kdot_over_K = sched.kappa_dot(time) / sched.K();
        g_scale = 0.5 * sched.log_eps_abs * sched.kappa_dot(time) * eps_pow * eps_pow;
    }

    // Ratio of the g-coefficient to the f-coefficient. The wells +-alpha,
    // +-beta solve x = c log|(1+x)/(1-x)|.
    double gap_coefficient() const { return kdot_over_K / two_over_eps_pow2; }
};

inline double phi(double x, const PotentialContext& ctx) {
    return ctx.two_over_eps_pow2 * f(x) - ctx.kdot_over_K * g_fn(x);
}

inline double W_fn(double u, const PotentialContext& ctx) {
    return F_fn(u) / (2.0 * ctx.eps_pow) - ctx.kdot_over_K * G_fn(u);
}

// ---------------------------------------------------------------------------
// Root structure.
//
// phi factors as (x^2-1) * psi(x) with psi(x) = A x - B log|(1+x)/(1-x)|,
// A = 2/eps^{2(1-kappa)}, B = kappa_dot/K. The wells alpha in (0,1) and
// beta in (1,inf) are the nontrivial zeros of psi. Writing delta = 1-alpha
// and eta = beta-1 and passing to lambda = log(gap), psi = 0 becomes
//
//   alpha:  c log(2-e^l) - c l - 1 + e^l = 0
//   beta:   c log(2+e^l) - c l - 1 - e^l = 0
//
// with c = B/A. For this schedule c <= ~0.015 everywhere, so the gaps are
// of order exp(-1/c) -- far below one ulp of 1.0 for every (eps, t). The
// log-gap representation is therefore the primary one; alpha and beta as
// plain doubles round to 1.0.
// ---------------------------------------------------------------------------

struct RootPair {
    double alpha = 0.0; // 1 - delta, rounds to 1.0 at desk scale
    double beta = 0.0;  // 1 + eta, rounds to 1.0 at desk scale
    double delta = 0.0; // exp(log_delta); underflows to 0 when < ~1e-308
    double eta = 0.0;
    double log_delta = 0.0; // authoritative
    double log_eta = 0.0;   // authoritative
    double t = 0.0;
    double eps = 0.0;
};

namespace detail {

// alpha gap equation residual, lambda = log(delta).
inline double gap_below(double lambda, double c) {
    const double d = std::exp(lambda); // underflow to 0 is fine
    return c * std::log(2.0 - d) - c * lambda - 1.0 + d;
}

// beta gap equation residual, lambda = log(eta).
inline double gap_above(double lambda, double c) {
    const double d = std::exp(lambda);
    return c * std::log(2.0 + d) - c * lambda - 1.0 - d;
}

template <typename Fn>
double bisect(Fn&& fn, double lo, double hi, const char* what) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (!(flo * fhi < 0.0))
        throw NoRootInBracket(std::string(what) + ": endpoint values " +
                              std::to_string(flo) + ", " + std::to_string(fhi));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo < 1e-14 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

inline RootPair find_roots(const PotentialContext& ctx) {
    const double c = ctx.gap_coefficient();
    if (!(c > 0.0))
        throw NoRootInBracket("find_roots: gap coefficient nonpositive (kappa_dot zero?)");

    RootPair rp;
    rp.t = ctx.t;
    rp.eps = ctx.eps;

    // delta: the residual is positive far left, negative around log(c),
    // with a single crossing near log(2) - 1/c.
    {
        const double lo = std::log(2.0) - 2.0 / c;
        const double hi = std::log(std::min(c, 0.5));
        rp.log_delta = detail::bisect([c](double l) { return detail::gap_below(l, c); },
                                      lo, hi, "find_roots/alpha");
    }
    // eta: residual strictly decreasing in lambda.
    {
        const double lo = std::log(2.0) - 3.0 / c;
        const double hi = 0.0;
        rp.log_eta = detail::bisect([c](double l) { return detail::gap_above(l, c); },
                                    lo, hi, "find_roots/beta");
    }
    rp.delta = std::exp(rp.log_delta);
    rp.eta = std::exp(rp.log_eta);
    rp.alpha = 1.0 - rp.delta;
    rp.beta = 1.0 + rp.eta;
    return rp;
}

// ---------------------------------------------------------------------------
// Sign-structure verification (report-valued).
// ---------------------------------------------------------------------------

struct IntervalCheck {
    std::string name;
    int expected_sign = 0;
    int samples = 0;
    int mismatches = 0;
    bool ok() const { return mismatches == 0; }
};

struct RootDerivCheck {
    std::string root;
    int expected_sign = 0;
    double fd_value = 0.0;    // central difference, h = 1e-7 max(1,|x|)
    int analytic_sign = 0;    // sign from the factored form, gap-aware
    bool fd_ok = false;
    bool analytic_ok = false;
};

struct SignStructureReport {
    std::vector<IntervalCheck> intervals;
    std::vector<RootDerivCheck> derivs;
    double max_odd_defect = 0.0; // max |phi(x)+phi(-x)| / scale
    bool intervals_ok = false;
    bool odd_ok = false;
    // Symmetric integrals over [-gamma, gamma] for gamma = alpha, 1, beta,
    // normalized by the integral of |phi|.
    std::array<double, 3> symmetric_integral_rel{};
    bool integrals_ok = false;
};

namespace detail {

// Sign of psi(1 - e^l) without forming 1 - e^l (l may be far below log ulp).
inline int cofactor_sign_below(double lambda, double A, double B) {
    const double d = std::exp(lambda);
    const double v = A * (1.0 - d) - B * (std::log(2.0 - d) - lambda);
    return (v > 0.0) - (v < 0.0);
}

inline int cofactor_sign_above(double lambda, double A, double B) {
    const double d = std::exp(lambda);
    const double v = A * (1.0 + d) - B * (std::log(2.0 + d) - lambda);
    return (v > 0.0) - (v < 0.0);
}

// Sign of phi at x = 1 - e^l (side=-1) or x = 1 + e^l (side=+1), exact in
// the factored representation.
inline int phi_sign_gap(int side, double lambda, double A, double B) {
    if (side < 0) {
        // x in (0,1): x^2-1 < 0
        return -cofactor_sign_below(lambda, A, B);
    }
    return cofactor_sign_above(lambda, A, B);
}

inline int phi_sign_plain(double x, double A, double B) {
    const double s = x * x - 1.0;
    const double psi = A * x - B * std::log(std::abs((1.0 + x) / (1.0 - x)));
    const double v = s * psi;
    return (v > 0.0) - (v < 0.0);
}

} // namespace detail

// Samples phi on every interval of the claimed sign pattern
//   phi > 0 on (-beta,-1) u (-alpha,0) u (alpha,1) u (beta,inf)
//   phi < 0 on (-inf,-beta) u (-1,-alpha) u (0,alpha) u (1,beta)
// The sub-ulp intervals adjacent to +-1 are sampled in log-gap coordinates.
inline SignStructureReport verify_sign_structure(const PotentialContext& ctx,
                                                 const RootPair& roots,
                                                 int samples_per_interval = 256) {
    SignStructureReport rep;
    const double A = ctx.two_over_eps_pow2;
    const double B = ctx.kdot_over_K;
    const int n = samples_per_interval;

    auto check_plain = [&](const std::string& name, double lo, double hi, int sign,
                           bool mirror) {
        IntervalCheck chk{name, sign, 0, 0};
        for (int i = 0; i < n; ++i) {
            double x = lo + (hi - lo) * (i + 0.5) / n;
            if (mirror) x = -x;
            ++chk.samples;
            if (detail::phi_sign_plain(x, A, B) != sign) ++chk.mismatches;
        }
        rep.intervals.push_back(chk);
    };
    // Gap intervals: lambda = log(gap) swept across [lam_lo, lam_hi).
    auto check_gap = [&](const std::string& name, int side, double lam_lo, double lam_hi,
                         int sign, bool mirror) {
        IntervalCheck chk{name, sign, 0, 0};
        for (int i = 0; i < n; ++i) {
            const double lam = lam_lo + (lam_hi - lam_lo) * (i + 0.5) / n;
            ++chk.samples;
            int s = detail::phi_sign_gap(side, lam, A, B);
            if (mirror) s = -s; // phi odd
            if (s != sign) ++chk.mismatches;
        }
        rep.intervals.push_back(chk);
    };

    const double span = 45.0;
    // Positive axis. Every representable x in (0, 1 - 4e-16) lies below
    // alpha, and every x >= 1 + 1e-12 lies above beta (the gaps are sub-ulp),
    // while the intervals hugging 1 are sampled in log-gap coordinates.
    check_plain("(0,alpha)", 1e-6, 1.0 - 4e-16, -1, false);
    check_gap("(alpha,1)", -1, roots.log_delta - span,
              roots.log_delta - 1e-12 * std::abs(roots.log_delta), +1, false);
    check_gap("(1,beta)", +1, roots.log_eta - span,
              roots.log_eta - 1e-12 * std::abs(roots.log_eta), -1, false);
    check_plain("(beta,inf)", 1.0 + 1e-12, 6.0, +1, false);
    // Negative axis, by direct evaluation at mirrored points.
    check_plain("(-alpha,0)", 1e-6, 1.0 - 4e-16, +1, true);
    check_gap("(-1,-alpha)", -1, roots.log_delta - span,
              roots.log_delta - 1e-12 * std::abs(roots.log_delta), -1, true);
    check_gap("(-beta,-1)", +1, roots.log_eta - span,
              roots.log_eta - 1e-12 * std::abs(roots.log_eta), +1, true);
    check_plain("(-inf,-beta)", 1.0 + 1e-12, 6.0, -1, true);

    rep.intervals_ok = true;
    for (const auto& c : rep.intervals) rep.intervals_ok = rep.intervals_ok && c.ok();

    // Derivative signs at the seven roots, by central differences with
    // h = 1e-7 max(1,|x|). At +-1 the true derivative is -inf but the log
    // singularity lives inside the sub-ulp gap, so the FD probe sees the
    // cubic slope ~ +2A instead.
    // The analytic column resolves the sign from the factored form.
    auto fd = [&](double x) {
        const double h = 1e-7 * std::max(1.0, std::abs(x));
        return (phi(x + h, ctx) - phi(x - h, ctx)) / (2.0 * h);
    };
    auto push_deriv = [&](const std::string& root, double x, int expected,
                          int analytic) {
        RootDerivCheck d;
        d.root = root;
        d.expected_sign = expected;
        d.fd_value = fd(x);
        d.analytic_sign = analytic;
        const int fds = (d.fd_value > 0.0) - (d.fd_value < 0.0);
        d.fd_ok = fds == expected;
        d.analytic_ok = analytic == expected;
        rep.derivs.push_back(d);
    };
    // phi'(0) = -(A - 2B) < 0.
    push_deriv("0", 0.0, -1, (A - 2.0 * B > 0.0) ? -1 : +1);
    // phi'(alpha) = (alpha^2-1) psi'(alpha); psi'(alpha) = A - 2B/(delta(2-delta)).
    // log(2B/(delta(2-delta))) vs log(A) decides psi' sign without underflow.
    {
        const double log_psi_neg = std::log(2.0 * B) - roots.log_delta; // ~|psi'| dominant part
        const int psi_sign = (std::log(A) > log_psi_neg) ? +1 : -1;
        push_deriv("alpha", roots.alpha, +1, -psi_sign);
        push_deriv("-alpha", -roots.alpha, +1, -psi_sign);
    }
    // phi'(+-1) = 2 psi(1) = -inf.
    push_deriv("1", 1.0, -1, -1);
    push_deriv("-1", -1.0, -1, -1);
    // phi'(beta) = (beta^2-1)(A + 2B/(eta(2+eta))) > 0.
    push_deriv("beta", roots.beta, +1, +1);
    push_deriv("-beta", -roots.beta, +1, +1);

    // Oddness.
    {
        double defect = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = -2.0 + 4.0 * (i + 0.5) / 100.0;
            const double p = phi(x, ctx);
            const double q = phi(-x, ctx);
            const double scale = std::max({std::abs(p), std::abs(q), 1.0});
            defect = std::max(defect, std::abs(p + q) / scale);
        }
        rep.max_odd_defect = defect;
        rep.odd_ok = defect < 1e-12;
    }

    // Symmetric integrals (midpoint rule on a symmetric grid).
    {
        const std::array<double, 3> gammas{roots.alpha, 1.0, roots.beta};
        rep.integrals_ok = true;
        for (size_t k = 0; k < gammas.size(); ++k) {
            const double gamma = gammas[k];
            const int m = 4000;
            const double h = 2.0 * gamma / m;
            double sum = 0.0, abs_sum = 0.0;
            for (int i = 0; i < m; ++i) {
                const double x = -gamma + (i + 0.5) * h;
                const double p = phi(x, ctx);
                sum += p;
                abs_sum += std::abs(p);
            }
            const double rel = std::abs(sum) / std::max(abs_sum, 1e-300);
            rep.symmetric_integral_rel[k] = rel;
            rep.integrals_ok = rep.integrals_ok && rel < 1e-10;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Asymptotic gap brackets (report-valued). Solving the gap equations directly
// gives both gaps ~ 2 e^{-1/c}; a conventional two-sided estimate with the
// 4x-weaker exponent X = 1/(4c) = 1/(|log eps| kdot eps^{2(1-kappa)}) floats
// around; both variants are checked and reported, neither is asserted.
// ---------------------------------------------------------------------------

struct BracketStatus {
    bool delta_coarse = false; // 2 e^{-X} < delta < 4 e^{-X}, X = 1/(4c)
    bool eta_coarse = false;   // 2 e^{-4X} < eta < 4 e^{-2X}
    bool delta_direct = false; // 2 e^{-1/c} < delta < 4 e^{-1/c}
    bool eta_direct = false;   // same bounds with the direct coefficient
};

inline BracketStatus remark_bracket_status(const PotentialContext& ctx, const RootPair& rp) {
    BracketStatus st;
    const double c = ctx.gap_coefficient();
    const double X = 1.0 / (4.0 * c); // |log eps| kdot eps^{2(1-kappa)} = 4c
    const double l2 = std::log(2.0), l4 = std::log(4.0);
    // The gaps sit exponentially close to the leading-order value 2 e^{-1/c},
    // i.e. ON some of these bounds; a log-space tolerance keeps the flags
    // from flipping on bisection noise at the boundary.
    auto inside = [&](double lo, double x, double hi) {
        const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
        return (lo - tol < x) && (x < hi + tol);
    };
    st.delta_coarse = inside(l2 - X, rp.log_delta, l4 - X);
    st.eta_coarse = inside(l2 - 4.0 * X, rp.log_eta, l4 - 2.0 * X);
    st.delta_direct = inside(l2 - 1.0 / c, rp.log_delta, l4 - 1.0 / c);
    st.eta_direct = inside(l2 - 1.0 / c, rp.log_eta, l4 - 1.0 / c);
    return st;
}

} // namespace macflow
