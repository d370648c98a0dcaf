#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace finsler {

/// JSON text, or the shorthand `kind:key=value:key=value` (numbers and booleans
/// are converted, anything else stays a string).
nlohmann::json parse_descriptor(const std::string& text);

/// Like parse_descriptor, but for minkowski instances the norm keys of the
/// shorthand (`norm=<kind>`, `p`, `eps`, `scale`) are moved into a nested
/// norm descriptor: `minkowski:n=2:norm=lp:p=4:normalized=true`.
nlohmann::json parse_instance_descriptor(const std::string& text);

/// Parameter schedule `R=1:64:geometric` (ratio 2), `R=1:64:geometric:5`
/// (5 points), `R=0:1:linear:11` or `R=1,2,4`.
struct Schedule {
    std::string variable;
    std::vector<double> values;
};
Schedule parse_schedule(const std::string& text);

/// Configuration of the acceptance run. Unknown keys are rejected and every
/// default is written back by to_json().
struct ReproConfig {
    std::uint64_t seed = 20240601;
    int threads = 0;
    int cases = 100;
    std::vector<int> criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::string sweep = "R=1:64:geometric";
    std::vector<double> hardy_deltas = {0.2, 0.1, 0.05};
    std::vector<double> avr_eps = {0.5, 1.0, 2.0};
    std::vector<int> avr_dims = {2, 3};
    std::vector<double> avr_radii = {1.0, 2.0, 4.0, 8.0};
    std::uint64_t avr_samples = 200000;
    double multiplicity_lambda = 100.0;
    int multiplicity_k_max = 3;
    double case_budget = 1.0;      ///< seconds per case for criteria 1 and 5
    double runtime_budget = 600.0; ///< seconds for criteria 1-11

    static ReproConfig from_json(const nlohmann::json& d);
    [[nodiscard]] nlohmann::json to_json() const;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    bool warning = false;
    std::string summary;
    nlohmann::json details = nlohmann::json::object();
    std::vector<std::pair<std::string, double>> timings;  ///< wall seconds; kept out of the report
    double seconds = 0.0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Runs one acceptance criterion (1-11). Criterion 12 needs the others and is
/// produced by run_repro.
CriterionResult run_criterion(int id, const ReproConfig& cfg);

struct ReproResult {
    ReproConfig config;
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;

    [[nodiscard]] bool pass() const;
    /// Deterministic report: no wall-clock data.
    [[nodiscard]] nlohmann::json report() const;
    /// Columns criterion, title, pass, warning, summary.
    [[nodiscard]] std::string summary_csv() const;
    /// Columns criterion, task, seconds.
    [[nodiscard]] std::string timing_csv() const;
};

/// Runs the configured criteria in order. Criterion 12 checks the runtime of the
/// others against the budget and reruns criteria 1, 4 and 5 to compare their
/// serialized reports byte for byte.
ReproResult run_repro(const ReproConfig& cfg, const std::function<void(const CriterionResult&)>& progress = {});

/// Pretty JSON with a trailing newline, as written by the CLI.
std::string dump_report(const nlohmann::json& j);

}  // namespace finsler
