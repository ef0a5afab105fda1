// weyllab: build catalog spaces, run scans and checks, write JSON/CSV reports.
#include "weyllab/cli/run.hpp"
#include "weyllab/cli/spaces.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>

using namespace weyllab;
using namespace weyllab::cli;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    std::optional<std::string> space;
    std::vector<std::string> params;
    std::optional<std::string> point;
    std::optional<std::string> vector;
    std::optional<double> t_max;
    std::optional<int> points;
    std::optional<int> directions;
    std::optional<int> levels;
    std::optional<double> horizon;
    std::optional<int> copy;
};

std::optional<double> parse_number(const std::string& s) {
    double d = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), d);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return d;
}

std::vector<double> parse_list(std::string s, const std::string& flag) {
    if (!s.empty() && s.front() == '[') s.erase(0, 1);
    if (!s.empty() && s.back() == ']') s.pop_back();
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = std::min(s.find(',', start), s.size());
        std::string item = s.substr(start, end - start);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        const auto d = parse_number(item);
        if (!d) throw ConfigError(flag, "expected comma-separated numbers, got '" + s + "'");
        out.push_back(*d);
        start = end + 1;
    }
    return out;
}

Param parse_param_value(const std::string& v, const std::string& flag) {
    if (v.find(',') != std::string::npos || (!v.empty() && v.front() == '[')) return parse_list(v, flag);
    if (const auto d = parse_number(v)) return *d;
    return v;
}

RunConfig assemble(const Overrides& o, TaskKind kind) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.config.empty() && kind == TaskKind::witness) c.space.name = "genus2";
    c.task.kind = kind;
    if (o.space) {
        if (*o.space != c.space.name) c.space.params.clear();
        c.space.name = *o.space;
        c.space.lines.clear();
    }
    for (const auto& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--param", "expected key=value, got '" + kv + "'");
        c.space.params[kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1), "--param " + kv.substr(0, eq));
    }
    if (o.point) c.task.point = parse_list(*o.point, "--point");
    if (o.vector) c.task.vector = parse_list(*o.vector, "--vector");
    if (o.t_max) c.task.t_max = *o.t_max;
    if (o.copy) c.task.copy = *o.copy;
    if (o.seed) c.sampling.seed = *o.seed;
    if (o.workers) c.sampling.workers = *o.workers;
    if (o.points) c.sampling.points = *o.points;
    if (o.directions) c.sampling.directions = *o.directions;
    if (o.levels) c.sampling.levels = *o.levels;
    if (o.horizon) c.sampling.horizon = *o.horizon;
    if (o.out) c.output.dir = *o.out;
    return c;
}

void add_task_options(CLI::App* sub, Overrides& o) {
    std::string names;
    for (const auto& n : catalog_names()) names += (names.empty() ? "" : ", ") + n;
    sub->add_option("--space", o.space, "Catalog space: " + names);
    sub->add_option("--param", o.params, "Space parameter key=value (repeatable; lists as a,b,c)");
    sub->add_option("--point", o.point, "Base point, comma-separated chart coordinates");
    sub->add_option("--points", o.points, "Number of sample points")->check(CLI::PositiveNumber);
    sub->add_option("--directions", o.directions, "Directions per point")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", o.horizon, "Integration horizon")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for closed Weyl structures"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("--config", o.config, "YAML run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", o.out, "Output directory");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"build", "Build a catalog space and report its structure"},
        {"geodesic", "Integrate one Weyl geodesic"},
        {"scan", "Life-time scan over sample points and directions"},
        {"tame", "mu against delta over dyadic levels, with the analytic check"},
        {"analytic-tame", "Analytic tameness inequality over a sphere-bundle sample"},
        {"holonomy", "Holonomy sample, invariant subspaces and flatness"},
        {"bounds", "Contracting-word and Cauchy bounds for the homothety group"},
        {"witness", "Non-tame witness search (exit 2 when found)"},
    };
    std::map<CLI::App*, TaskKind> kinds;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_task_options(sub, o);
        kinds[sub] = task_kind_from_string(name);
        if (name == "geodesic") {
            sub->add_option("--vector", o.vector, "Initial vector, comma-separated components");
            sub->add_option("--t-max", o.t_max, "Parameter horizon")->check(CLI::PositiveNumber);
        }
        if (name == "tame" || name == "witness")
            sub->add_option("--levels", o.levels, "Number of dyadic levels")->check(CLI::PositiveNumber);
        if (name == "witness") sub->add_option("--copy", o.copy, "Dyadic copy n of the genus-2 surface");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const RunConfig config = assemble(o, kinds.at(sub));
        const RunOutcome outcome = execute(config);
        const WrittenFiles files = write_outputs(config, outcome);
        std::cout << "status: " << outcome.report["status"].get<std::string>() << "\n"
                  << "report: " << files.report.string() << "\n";
        if (files.csv) std::cout << "csv:    " << files.csv->string() << "\n";
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "weyllab: config error: " << (e.line() > 0 && !o.config.empty() ? o.config + ": " : "") << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "weyllab: error: " << e.what() << "\n";
    }
    return exit_error;
}
