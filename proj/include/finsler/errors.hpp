#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Argument outside the mathematical domain of an operation (p <= n for a
/// Morrey constant, mu beyond the Hardy threshold, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method ran out of budget or lost its bracket. `best` carries the
/// best value found so far when one exists.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double best = 0.0)
        : std::runtime_error(what), best_(best) {}
    [[nodiscard]] double best() const noexcept { return best_; }

private:
    double best_;
};

/// Computed data contradict a structural property (for instance a volume-ratio
/// curve that increases beyond its error bars).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed descriptor or configuration document.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace finsler
