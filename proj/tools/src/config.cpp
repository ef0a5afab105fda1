#include "weyllab/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace weyllab::cli {

namespace {

const std::map<TaskKind, std::string>& task_names() {
    static const std::map<TaskKind, std::string> names{
        {TaskKind::build, "build"},
        {TaskKind::geodesic, "geodesic"},
        {TaskKind::lifetime_scan, "lifetime-scan"},
        {TaskKind::tame_check, "tame-check"},
        {TaskKind::analytic_tame, "analytic-tame"},
        {TaskKind::holonomy, "holonomy"},
        {TaskKind::bounds_check, "bounds-check"},
        {TaskKind::witness, "witness"},
    };
    return names;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& what) {
    const YAML::Mark m = n.Mark();
    if (m.is_null()) throw ConfigError(field, what);
    throw ConfigError(field, what, m.line + 1, m.column + 1);
}

// Rejects keys outside `known`, pointing at the first offender.
void check_keys(const YAML::Node& map, const std::string& path, const std::set<std::string>& known) {
    if (!map.IsMap()) fail(map, path, "expected a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (known.count(key)) continue;
        std::string list;
        for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
        fail(kv.first, path.empty() ? key : path + "." + key, "unknown key (expected one of: " + list + ")");
    }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& field, const char* expected) {
    if (!n.IsScalar()) fail(n, field, std::string("expected ") + expected);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, field, std::string("expected ") + expected + ", got '" + n.Scalar() + "'");
    }
}

double number(const YAML::Node& n, const std::string& field) { return scalar<double>(n, field, "a number"); }

std::vector<double> numbers(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

template <class T>
T positive(const YAML::Node& n, const std::string& field, T value) {
    if (!(value > T{0})) fail(n, field, "must be positive");
    return value;
}

void read_space(const YAML::Node& n, SpaceSpec& s) {
    if (!n.IsMap()) fail(n, "space", "expected a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        const std::string field = "space." + key;
        if (!kv.first.Mark().is_null()) s.lines[key] = kv.first.Mark().line + 1;
        if (key == "name") {
            s.name = scalar<std::string>(kv.second, field, "a catalog name");
        } else if (kv.second.IsSequence()) {
            s.params[key] = numbers(kv.second, field);
        } else if (kv.second.IsScalar()) {
            double d;
            const std::string& text = kv.second.Scalar();
            if (kv.second.Tag() != "!" && YAML::convert<double>::decode(kv.second, d) && !text.empty())
                s.params[key] = d;
            else
                s.params[key] = text;
        } else {
            fail(kv.second, field, "expected a number, a list of numbers or a word");
        }
    }
}

void read_task(const YAML::Node& n, TaskSpec& t) {
    check_keys(n, "task",
               {"kind", "point", "vector", "points", "t_max", "loops", "loop_radius", "loop_reach", "words",
                "max_exponent", "cauchy_max", "copy", "eps"});
    if (n["kind"]) {
        const auto name = scalar<std::string>(n["kind"], "task.kind", "a task name");
        try {
            t.kind = task_kind_from_string(name);
        } catch (const ArgumentError& e) {
            fail(n["kind"], "task.kind", e.what());
        }
    }
    if (n["point"]) t.point = numbers(n["point"], "task.point");
    if (n["vector"]) t.vector = numbers(n["vector"], "task.vector");
    if (n["points"]) {
        const YAML::Node& ps = n["points"];
        if (!ps.IsSequence()) fail(ps, "task.points", "expected a list of points");
        t.points.clear();
        for (std::size_t i = 0; i < ps.size(); ++i)
            t.points.push_back(numbers(ps[i], "task.points[" + std::to_string(i) + "]"));
    }
    if (n["t_max"]) t.t_max = positive(n["t_max"], "task.t_max", number(n["t_max"], "task.t_max"));
    if (n["loops"]) t.loops = positive(n["loops"], "task.loops", scalar<int>(n["loops"], "task.loops", "an integer"));
    if (n["loop_radius"])
        t.loop_radius = positive(n["loop_radius"], "task.loop_radius", number(n["loop_radius"], "task.loop_radius"));
    if (n["loop_reach"])
        t.loop_reach = positive(n["loop_reach"], "task.loop_reach", number(n["loop_reach"], "task.loop_reach"));
    if (n["words"]) t.words = positive(n["words"], "task.words", scalar<int>(n["words"], "task.words", "an integer"));
    if (n["max_exponent"])
        t.max_exponent = positive(n["max_exponent"], "task.max_exponent",
                                  scalar<long>(n["max_exponent"], "task.max_exponent", "an integer"));
    if (n["cauchy_max"])
        t.cauchy_max = positive(n["cauchy_max"], "task.cauchy_max",
                                scalar<int>(n["cauchy_max"], "task.cauchy_max", "an integer"));
    if (n["copy"]) t.copy = scalar<int>(n["copy"], "task.copy", "an integer");
    if (n["eps"]) {
        t.eps = numbers(n["eps"], "task.eps");
        for (std::size_t i = 0; i < t.eps.size(); ++i)
            if (!(t.eps[i] > 0.0 && t.eps[i] < 1.0)) fail(n["eps"][i], "task.eps", "entries must lie in (0, 1)");
    }
}

void read_sampling(const YAML::Node& n, SamplingSpec& s) {
    check_keys(n, "sampling", {"seed", "workers", "points", "directions", "levels", "horizon", "tolerance"});
    if (n["seed"]) s.seed = scalar<std::uint64_t>(n["seed"], "sampling.seed", "an unsigned integer");
    if (n["workers"])
        s.workers = positive(n["workers"], "sampling.workers", scalar<unsigned>(n["workers"], "sampling.workers", "an unsigned integer"));
    if (n["points"])
        s.points = positive(n["points"], "sampling.points", scalar<int>(n["points"], "sampling.points", "an integer"));
    if (n["directions"])
        s.directions = positive(n["directions"], "sampling.directions",
                                scalar<int>(n["directions"], "sampling.directions", "an integer"));
    if (n["levels"])
        s.levels = positive(n["levels"], "sampling.levels", scalar<int>(n["levels"], "sampling.levels", "an integer"));
    if (n["horizon"]) s.horizon = positive(n["horizon"], "sampling.horizon", number(n["horizon"], "sampling.horizon"));
    if (n["tolerance"])
        s.tolerance = positive(n["tolerance"], "sampling.tolerance", number(n["tolerance"], "sampling.tolerance"));
}

void read_output(const YAML::Node& n, OutputSpec& o) {
    check_keys(n, "output", {"dir", "report", "csv"});
    if (n["dir"]) o.dir = scalar<std::string>(n["dir"], "output.dir", "a path");
    if (n["report"]) o.report = scalar<std::string>(n["report"], "output.report", "a file name");
    if (n["csv"]) o.csv = scalar<std::string>(n["csv"], "output.csv", "a file name");
}

// Shortest decimal that reads back to the same double.
std::string shortest(double d) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, r.ptr);
    // Keep numbers recognisable as floats to YAML readers.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void emit_numbers(YAML::Emitter& out, const std::vector<double>& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double d : v) out << shortest(d);
    out << YAML::EndSeq;
}

}  // namespace

std::string to_string(TaskKind k) { return task_names().at(k); }

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "scan") return TaskKind::lifetime_scan;
    if (s == "tame") return TaskKind::tame_check;
    if (s == "bounds") return TaskKind::bounds_check;
    for (const auto& [k, name] : task_names())
        if (name == s) return k;
    std::string list;
    for (const auto& [k, name] : task_names()) list += (list.empty() ? "" : ", ") + name;
    throw ArgumentError("unknown task '" + s + "' (expected one of: " + list + ")");
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    RunConfig c;
    if (root.IsNull()) return c;
    check_keys(root, "", {"schema", "space", "task", "sampling", "output"});
    if (root["schema"]) {
        c.schema = scalar<int>(root["schema"], "schema", "an integer");
        if (c.schema != kSchemaVersion)
            fail(root["schema"], "schema", "unsupported schema version " + std::to_string(c.schema) + " (this build reads " +
                                               std::to_string(kSchemaVersion) + ")");
    }
    // An empty section keeps its defaults.
    auto present = [&](const char* key) { return root[key] && !root[key].IsNull(); };
    if (present("space")) read_space(root["space"], c.space);
    if (present("task")) read_task(root["task"], c.task);
    if (present("sampling")) read_sampling(root["sampling"], c.sampling);
    if (present("output")) read_output(root["output"], c.output);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_yaml(const RunConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema" << YAML::Value << c.schema;

    out << YAML::Key << "space" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.space.name;
    for (const auto& [key, value] : c.space.params) {
        out << YAML::Key << key << YAML::Value;
        if (const auto* d = std::get_if<double>(&value)) out << shortest(*d);
        else if (const auto* v = std::get_if<std::vector<double>>(&value)) emit_numbers(out, *v);
        else out << YAML::DoubleQuoted << std::get<std::string>(value);
    }
    out << YAML::EndMap;

    const TaskSpec& t = c.task;
    out << YAML::Key << "task" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(t.kind);
    if (t.point) {
        out << YAML::Key << "point" << YAML::Value;
        emit_numbers(out, *t.point);
    }
    if (t.vector) {
        out << YAML::Key << "vector" << YAML::Value;
        emit_numbers(out, *t.vector);
    }
    if (!t.points.empty()) {
        out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
        for (const auto& p : t.points) emit_numbers(out, p);
        out << YAML::EndSeq;
    }
    out << YAML::Key << "t_max" << YAML::Value << shortest(t.t_max);
    out << YAML::Key << "loops" << YAML::Value << t.loops;
    out << YAML::Key << "loop_radius" << YAML::Value << shortest(t.loop_radius);
    out << YAML::Key << "loop_reach" << YAML::Value << shortest(t.loop_reach);
    out << YAML::Key << "words" << YAML::Value << t.words;
    out << YAML::Key << "max_exponent" << YAML::Value << t.max_exponent;
    out << YAML::Key << "cauchy_max" << YAML::Value << t.cauchy_max;
    out << YAML::Key << "copy" << YAML::Value << t.copy;
    out << YAML::Key << "eps" << YAML::Value;
    emit_numbers(out, t.eps);
    out << YAML::EndMap;

    const SamplingSpec& s = c.sampling;
    out << YAML::Key << "sampling" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::Key << "workers" << YAML::Value << s.workers;
    out << YAML::Key << "points" << YAML::Value << s.points;
    out << YAML::Key << "directions" << YAML::Value << s.directions;
    out << YAML::Key << "levels" << YAML::Value << s.levels;
    out << YAML::Key << "horizon" << YAML::Value << shortest(s.horizon);
    out << YAML::Key << "tolerance" << YAML::Value << shortest(s.tolerance);
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << c.output.dir;
    out << YAML::Key << "report" << YAML::Value << YAML::DoubleQuoted << c.output.report;
    out << YAML::Key << "csv" << YAML::Value << YAML::DoubleQuoted << c.output.csv;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace weyllab::cli
