#include "finsler/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace finsler {

void InequalityReport::evaluate() {
    ratio = rhs != 0.0 ? lhs / rhs : (lhs == 0.0 ? 1.0 : HUGE_VAL);
    if (divergent) {
        pass = true;
        return;
    }
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
        pass = false;
        return;
    }
    const double slack = tolerance * std::abs(rhs) + 3.0 * mc_sigma;
    switch (direction) {
        case Direction::upper: pass = lhs <= rhs + slack; break;
        case Direction::lower: pass = lhs >= rhs - slack; break;
        case Direction::equal: pass = std::abs(lhs - rhs) <= slack; break;
    }
}

namespace {

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

nlohmann::json numbers(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

}  // namespace

nlohmann::json InequalityReport::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["direction"] = direction == Direction::upper ? "lhs<=rhs" : (direction == Direction::lower ? "lhs>=rhs" : "lhs=rhs");
    j["parameters"] = parameters;
    j["lhs"] = number(lhs);
    j["rhs"] = number(rhs);
    j["ratio"] = number(ratio);
    j["reference_constant"] = number(reference);
    j["tolerance"] = tolerance;
    j["mc_sigma"] = mc_sigma;
    j["divergent"] = divergent;
    j["pass"] = pass;
    j["diagnostics"] = diagnostics;
    j["seed"] = seed;
    j["workers"] = workers;
    return j;
}

nlohmann::json SweepResult::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["variable"] = variable;
    j["parameters"] = parameters;
    j["grid"] = numbers(grid);
    j["lhs"] = numbers(lhs);
    j["rhs"] = numbers(rhs);
    j["ratio"] = numbers(ratio);
    j["scaled"] = numbers(scaled);
    j["inferred_constant"] = numbers(inferred);
    j["limit"] = number(limit);
    j["target"] = number(target);
    j["constant_limit"] = number(constant_limit);
    j["constant_target"] = number(constant_target);
    j["order"] = number(order);
    j["extrapolated"] = extrapolated;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << variable << ",lhs,rhs,ratio,target\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << format_double(grid[i]) << ',' << format_double(i < lhs.size() ? lhs[i] : 0.0) << ','
           << format_double(i < rhs.size() ? rhs[i] : 0.0) << ',' << format_double(i < ratio.size() ? ratio[i] : 0.0)
           << ',' << format_double(target) << '\n';
    }
    return os.str();
}

std::pair<double, double> extrapolate(const std::vector<double>& values, double grid_ratio) {
    if (values.empty()) return {0.0, 0.0};
    const std::size_t m = values.size();
    if (m < 3) return {values.back(), 0.0};
    const double x1 = values[m - 3], x2 = values[m - 2], x3 = values[m - 1];
    const double d1 = x2 - x1, d2 = x3 - x2;
    const double scale = std::max({std::abs(x1), std::abs(x2), std::abs(x3), 1e-300});
    // Converged to rounding: nothing to extrapolate.
    if (std::abs(d2) <= 1e-13 * scale || std::abs(d1) <= 1e-13 * scale) return {x3, 0.0};
    const double q = d2 / d1;
    if (!(q > 0.0 && q < 1.0)) return {x3, 0.0};
    const double order = grid_ratio > 1.0 ? -std::log(q) / std::log(grid_ratio) : 0.0;
    return {x3 + d2 * q / (1.0 - q), order};
}

}  // namespace finsler
