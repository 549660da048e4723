#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace phaseslide {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the effective domain of a convex potential.
class DomainError : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Bad configuration. `key()` names the offending entry (may be empty).
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Iterative solver did not converge. Carries the residual history.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> history = {})
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

} // namespace phaseslide
