#pragma once

// Test-only oracles: finite differences, quadrature and a tiny deterministic
// generator. These stay independent of the implementation paths they check.

#include <cmath>
#include <cstdint>

namespace oracles {

template <typename Fn>
double central_diff(Fn&& fn, double x, double h = 1e-5) {
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

template <typename Fn>
double central_diff2(Fn&& fn, double x, double h = 1e-5) {
    return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h);
}

// Composite Simpson on [a, b] with n (even) panels.
template <typename Fn>
double simpson(Fn&& fn, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = fn(a) + fn(b);
    for (int i = 1; i < n; ++i) sum += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed = 42) : state(seed ? seed : 1) {}
    double unit() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

} // namespace oracles
