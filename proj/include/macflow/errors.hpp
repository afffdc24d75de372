#pragma once

#include <stdexcept>
#include <string>

namespace macflow {

// Error taxonomy. Each named failure mode gets its own type so callers and
// the CLI can map them to exit codes without string matching.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoRootInBracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    double time;
    explicit NonFiniteState(double t, const std::string& what)
        : std::runtime_error(what), time(t) {}
};

struct MaxPrincipleViolation : std::runtime_error {
    double time;
    double max_abs_v;
    MaxPrincipleViolation(double t, double m, const std::string& what)
        : std::runtime_error(what), time(t), max_abs_v(m) {}
};

struct FixedPointDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ATanhDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoInterface : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MultipleInterfaces : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoSolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionUnmet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace macflow
