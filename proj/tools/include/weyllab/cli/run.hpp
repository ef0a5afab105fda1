#pragma once

#include "weyllab/cli/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace weyllab::cli {

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_witness = 2 };

struct RunOutcome {
    int exit_code = exit_ok;
    nlohmann::ordered_json report;
    std::string csv;  // empty when the task has no series
};

/// Runs the configured task in memory. The report starts with a header that
/// embeds the canonical config, so that the same bytes rerun the same task.
RunOutcome execute(const RunConfig& config);

struct WrittenFiles {
    std::filesystem::path report;
    std::optional<std::filesystem::path> csv;
    std::filesystem::path config;
};

/// Writes report, CSV and the canonical config into config.output.dir.
WrittenFiles write_outputs(const RunConfig& config, const RunOutcome& outcome);

}  // namespace weyllab::cli
