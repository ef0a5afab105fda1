#pragma once

#include "weyllab/common.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace weyllab::cli {

inline constexpr int kSchemaVersion = 1;

/// A space parameter: a number, a list of numbers or a word.
using Param = std::variant<double, std::vector<double>, std::string>;

struct SpaceSpec {
    std::string name = "cone-quotient";
    std::map<std::string, Param> params;  // validated by the space builder
    std::map<std::string, int> lines;     // source line per key ("name" included); not compared
    bool operator==(const SpaceSpec& o) const { return name == o.name && params == o.params; }
};

enum class TaskKind { build, geodesic, lifetime_scan, tame_check, analytic_tame, holonomy, bounds_check, witness };

std::string to_string(TaskKind k);
/// Accepts both the config spelling (lifetime-scan) and the subcommand (scan).
TaskKind task_kind_from_string(const std::string& s);

struct TaskSpec {
    TaskKind kind = TaskKind::build;
    std::optional<std::vector<double>> point;   // base point; the space default when absent
    std::optional<std::vector<double>> vector;  // initial vector of a single geodesic
    std::vector<std::vector<double>> points;    // explicit sample points (scan, tame checks)
    double t_max = 10.0;
    // holonomy
    int loops = 12;
    double loop_radius = 0.1;
    double loop_reach = 0.5;
    // bounds
    int words = 200;
    long max_exponent = 6;
    int cauchy_max = 20;
    // witness
    int copy = 0;
    std::vector<double> eps{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.01};
    bool operator==(const TaskSpec&) const = default;
};

struct SamplingSpec {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    int points = 8;
    int directions = 64;
    int levels = 3;
    double horizon = 100.0;
    double tolerance = 1e-10;
    bool operator==(const SamplingSpec&) const = default;
};

struct OutputSpec {
    std::string dir = "out";
    std::string report = "report.json";
    std::string csv = "data.csv";
    bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
    int schema = kSchemaVersion;
    SpaceSpec space;
    TaskSpec task;
    SamplingSpec sampling;
    OutputSpec output;
    bool operator==(const RunConfig&) const = default;
};

/// Parses YAML text. ConfigError carries the line of the offending node.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical YAML: every field, fixed order, round-trip precision. Parsing the
/// output gives back an equal config and re-serialising it the same bytes.
std::string to_yaml(const RunConfig& c);

}  // namespace weyllab::cli
