/**
 * Error types shared across the library.
 *
 * Domain violations (bad inputs to pure functions) use std::domain_error.
 * Events that are part of normal solver control flow (a propagation that
 * blows up under a bad costate guess, an exhausted multistart budget) get
 * their own types carrying diagnostic payloads.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace csc {

/// Primer vector (or a blended direction) vanished where a thrust
/// direction was required.
class degenerate_direction_error : public std::runtime_error {
public:
    explicit degenerate_direction_error(const std::string& what)
        : std::runtime_error(what) {}
};

/// Numerical integration could not be continued (step-size underflow,
/// state left its validity domain, or a degenerate control state).
/// Carries the time at which propagation failed, in canonical units.
class propagation_error : public std::runtime_error {
public:
    propagation_error(const std::string& what, double t_fail)
        : std::runtime_error(what), t_fail_(t_fail) {}
    double failure_time() const { return t_fail_; }

private:
    double t_fail_;
};

/// The shooting solver exhausted its budget. Carries the best residual
/// infinity-norm seen across all attempts.
class no_convergence_error : public std::runtime_error {
public:
    no_convergence_error(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

private:
    double best_residual_;
};

/// Scenario file failed to parse or validate. The message names the
/// offending key (or the parser's byte position for syntax errors).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read or written. The message carries the path.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace csc
