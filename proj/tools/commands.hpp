#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace finsler::cli {

/// Result of one task: a JSON report with a top-level "pass" and optional CSV
/// tables keyed by a file-name suffix.
struct TaskOutput {
    nlohmann::json report;
    std::vector<std::pair<std::string, std::string>> tables;
    [[nodiscard]] bool pass() const { return report.value("pass", false); }
};

/// Each command reads its options from a JSON object, rejects unknown keys with
/// ConfigError and echoes every option, defaults included, under "options".
TaskOutput constants_command(const nlohmann::json& options);
TaskOutput verify_command(const nlohmann::json& options);
TaskOutput sweep_command(const nlohmann::json& options);
TaskOutput pde_command(const nlohmann::json& options);
TaskOutput avr_command(const nlohmann::json& options);

/// Dispatch on "command"; the remaining keys are the command's options.
TaskOutput run_task(const nlohmann::json& task);

/// Config of the `run` subcommand: {"seed"?, "threads"?, "tasks": [{"id", "command", ...}]}.
/// Task ids must be unique; reports are returned in config order.
struct RunOutput {
    std::vector<std::pair<std::string, TaskOutput>> tasks;
    [[nodiscard]] bool pass() const;
    /// Columns task, command, pass.
    [[nodiscard]] std::string summary_csv() const;
};
RunOutput run_config(const nlohmann::json& config);

}  // namespace finsler::cli
