#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace finsler {

/// Outcome of one inequality instance.
struct InequalityReport {
    enum class Direction { upper, lower, equal };  ///< lhs <= rhs, lhs >= rhs, lhs = rhs

    std::string id;
    Direction direction = Direction::upper;
    nlohmann::json parameters = nlohmann::json::object();
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;      ///< lhs / rhs
    double reference = 0.0;  ///< sharp constant in force
    double tolerance = 1e-9; ///< one-sided relative slack
    double mc_sigma = 0.0;   ///< one-sigma Monte-Carlo error of lhs - rhs, if any
    bool divergent = false;  ///< both sides infinite: vacuous pass
    bool pass = false;
    nlohmann::json diagnostics = nlohmann::json::object();
    std::uint64_t seed = 0;
    int workers = 1;

    /// Sets ratio and pass: upper holds iff lhs <= rhs (1 + tol) + 3 sigma;
    /// equal holds iff |lhs - rhs| <= tol |rhs| + 3 sigma.
    void evaluate();
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Sharpness sweep over a scale parameter.
struct SweepResult {
    std::string id;
    std::string variable = "R";
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<double> grid;
    std::vector<double> lhs, rhs, ratio;  ///< per-point inequality sides
    std::vector<double> scaled;           ///< per-point scaled quantity that converges to `target`
    std::vector<double> inferred;         ///< per-point inferred constant
    double limit = 0.0;                   ///< extrapolated limit of `scaled`
    double target = 0.0;
    double constant_limit = 0.0;          ///< extrapolated limit of `inferred`
    double constant_target = 0.0;
    double order = 0.0;                   ///< estimated convergence order (0 if converged)
    double tolerance = 1e-3;
    bool extrapolated = false;
    bool pass = false;
    nlohmann::json extra = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const;
    /// Columns R, lhs, rhs, ratio, target.
    [[nodiscard]] std::string to_csv() const;
};

/// Richardson-type extrapolation from the last three values of a sequence
/// sampled on a geometric grid: Aitken's delta-squared with a guard for
/// converged or non-monotone tails. Returns {limit, order}.
std::pair<double, double> extrapolate(const std::vector<double>& values, double grid_ratio);

/// Shortest round-trip text for a double, locale independent.
std::string format_double(double v);

}  // namespace finsler
