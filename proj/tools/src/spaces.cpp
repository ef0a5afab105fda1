#include "weyllab/cli/spaces.hpp"

#include "weyllab/charts.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace weyllab::cli {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Typed access to space parameters with defaults; records what was used.
class Params {
public:
    Params(const SpaceSpec& spec, const std::set<std::string>& known) : spec_(spec) {
        for (const auto& [key, value] : spec.params) {
            if (known.count(key)) continue;
            std::string list;
            for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
            if (list.empty()) list = "none";
            throw ConfigError("space." + key, "unknown parameter for '" + spec.name + "' (expected: " + list + ")",
                              line(key));
        }
    }

    double number(const std::string& key, double fallback) {
        double v = fallback;
        if (auto it = spec_.params.find(key); it != spec_.params.end()) {
            const auto* d = std::get_if<double>(&it->second);
            if (!d) throw ConfigError("space." + key, "expected a number", line(key));
            v = *d;
        }
        used[key] = v;
        return v;
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        if (auto it = spec_.params.find(key); it != spec_.params.end()) {
            const auto* v = std::get_if<std::vector<double>>(&it->second);
            if (!v || v->size() != fallback.size())
                throw ConfigError("space." + key, "expected a list of " + std::to_string(fallback.size()) + " numbers",
                                  line(key));
            fallback = *v;
        }
        used[key] = fallback;
        return fallback;
    }

    std::string word(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) {
        std::string v = fallback;
        if (auto it = spec_.params.find(key); it != spec_.params.end()) {
            const auto* s = std::get_if<std::string>(&it->second);
            if (!s || !allowed.count(*s)) {
                std::string list;
                for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
                throw ConfigError("space." + key, "expected one of: " + list, line(key));
            }
            v = *s;
        }
        used[key] = v;
        return v;
    }

    // ConfigError on the parameter's own line when `ok` fails.
    void require(bool ok, const std::string& key, const std::string& what) const {
        if (!ok) throw ConfigError("space." + key, what, line(key));
    }

    bool has(const std::string& key) const { return spec_.params.count(key) > 0; }

    int line(const std::string& key) const {
        auto it = spec_.lines.find(key);
        return it == spec_.lines.end() ? 0 : it->second;
    }

    nlohmann::ordered_json used = nlohmann::ordered_json::object();

private:
    const SpaceSpec& spec_;
};

// Rejection sampling of admissible points in a coordinate box.
std::function<Vector(std::mt19937_64&)> box_sampler(ChartMetric chart, Vector lo, Vector hi) {
    return [chart, lo, hi](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int attempt = 0; attempt < 10000; ++attempt) {
            Vector x(lo.size());
            for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
            if (chart.contains(x)) return x;
        }
        throw ArgumentError("could not sample an admissible point of '" + chart.name() + "'");
    };
}

Vector with_level(double s, const Vector& base) {
    Vector x(base.size() + 1);
    x << s, base;
    return x;
}

Space cone_space(Params& p) {
    const double length = p.number("length", two_pi);
    const double guard = p.number("apex_guard", 1e-6);
    p.require(length > 0.0, "length", "must be positive");
    p.require(guard > 0.0, "apex_guard", "must be positive");
    Space s;
    const ChartMetric chart = charts::cone(charts::circle(length), guard);
    s.weyl = WeylStructure::levi_civita(chart);
    s.default_point = Vector{{1.0, 0.0}};
    s.sample = box_sampler(chart, Vector{{0.5, 0.0}}, Vector{{2.0, two_pi}});
    s.group = catalog::two_generator_group(length);
    s.to_group = [](const Vector& x) { return x; };
    s.contract = [](const Vector& x) { return Vector{{0.5 * x[0], x[1]}}; };
    s.delta = [](const Vector& x) { return x[0]; };
    s.deck = DeckTransformation{"phi+2pi", [](const Vector& x) { return Vector{{x[0], x[1] + two_pi}}; },
                                [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); }};
    return s;
}

void attach_cone(Space& s, const catalog::Cone& c, std::function<Vector(std::mt19937_64&)> base_sample,
                 Vector base_default) {
    const double k = c.k;
    s.weyl = c.weyl;
    s.default_point = with_level(0.0, base_default);
    s.sample = [base_sample, k](std::mt19937_64& rng) {
        const double level = std::uniform_real_distribution<double>(0.0, -std::log(k))(rng);
        return with_level(level, base_sample(rng));
    };
    s.group = c.group;
    s.to_group = [c](const Vector& x) { return c.to_cone(x); };
    const double step = std::log(k);
    s.contract = [step](const Vector& x) {
        Vector y = x;
        y[0] += step;
        return y;
    };
    s.delta = [](const Vector& x) { return std::exp(x[0]); };
    const int n = c.weyl.dim();
    s.deck = DeckTransformation{"expansion", [step](const Vector& x) {
                                    Vector y = x;
                                    y[0] -= step;
                                    return y;
                                },
                                [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); }};
}

Space cone_quotient_space(Params& p) {
    const std::string base = p.word("base", "circle", {"circle", "sphere", "ellipsoid"});
    const double k = p.number("k", 0.5);
    p.require(k > 0.0 && k < 1.0, "k", "must lie in (0, 1)");
    Space s;
    if (base == "circle") {
        const double length = p.number("length", two_pi);
        p.require(length > 0.0, "length", "must be positive");
        const ChartMetric circle = charts::circle(length);
        attach_cone(s, catalog::cone_over_circle(length, k), box_sampler(circle, Vector{{0.0}}, Vector{{two_pi}}),
                    Vector{{0.0}});
    } else if (base == "sphere") {
        const ChartMetric sphere = charts::sphere_stereographic(1.0);
        attach_cone(s, catalog::cone_over_sphere(k), box_sampler(sphere, Vector{{-1.0, -1.0}}, Vector{{1.0, 1.0}}),
                    Vector{{0.1, 0.2}});
    } else {
        const auto axes = p.list("axes", {1.0, 1.5, 2.0});
        p.require(axes[0] > 0.0 && axes[1] > 0.0 && axes[2] > 0.0, "axes", "semi-axes must be positive");
        const catalog::Cone c = catalog::cone_over_ellipsoid(axes[0], axes[1], axes[2], k);
        const ChartMetric base_chart = induced_chart(charts::ellipsoid(axes[0], axes[1], axes[2]));
        attach_cone(s, c, box_sampler(base_chart, Vector{{0.5, 0.0}}, Vector{{std::numbers::pi - 0.5, two_pi}}),
                    Vector{{1.2, 0.3}});
    }
    return s;
}

Space flat_space(const ChartMetric& chart, Vector point, Vector lo, Vector hi) {
    Space s;
    s.weyl = WeylStructure::levi_civita(chart);
    s.default_point = std::move(point);
    s.sample = box_sampler(chart, std::move(lo), std::move(hi));
    return s;
}

Space strip_space(Params& p) {
    const double guard = p.number("puncture_guard", 1e-6);
    const ChartMetric chart = catalog::build_strip_S(guard);
    // The box is clipped to the strip by rejection.
    return flat_space(chart, Vector{{2.0, 0.4}}, Vector{{1.1, -0.9}}, Vector{{6.0, 0.9}});
}

Space cylinder_space(Params& p) {
    const double a = p.number("a", 0.0);
    const double b = p.number("b", 1.0);
    p.require(a < b, "b", "must exceed a");
    const ChartMetric chart = catalog::build_cylinder_Z(a, b);
    return flat_space(chart, Vector{{0.0, 0.5 * (a + b)}}, Vector{{0.0, a}}, Vector{{two_pi, b}});
}

Space torus_space(Params& p) {
    const auto w = p.list("puncture", {0.5, 0.5});
    const double guard = p.number("guard", 1e-6);
    const ChartMetric chart = catalog::build_punctured_torus({w[0], w[1]}, guard);
    return flat_space(chart, Vector{{0.1, 0.2}}, Vector{{0.0, 0.0}}, Vector{{1.0, 1.0}});
}

Space genus2_space(Params& p) {
    catalog::Genus2Profile profile;
    profile.tube_radius = p.number("tube_radius", profile.tube_radius);
    profile.blend = p.number("blend", profile.blend);
    const catalog::Genus2 g = catalog::build_genus2(profile);
    Space s;
    s.weyl = g.weyl;
    s.default_point = Vector::Zero(2);
    const double r = 0.02 * g.surface.P(0).norm();
    s.sample = box_sampler(g.weyl.reference(), Vector::Constant(2, -r), Vector::Constant(2, r));
    s.group = g.group;
    const catalog::Genus2Surface surface = g.surface;
    const Point3 p0 = surface.P(0);
    s.to_group = [surface, p0](const Vector& uv) -> Vector { return surface.local_chart_point(p0, uv); };
    s.surface = g.surface;
    return s;
}

Space mapping_torus_space(Params& p) {
    const double length = p.number("length", two_pi);
    const double rotation = p.number("rotation", 1.0);
    const double rho = p.number("rho", 2.0);
    p.require(length > 0.0, "length", "must be positive");
    p.require(rho > 1.0, "rho", "must exceed 1");
    const ChartMetric circle = charts::circle(length);
    const catalog::MappingTorus mt = catalog::build_mapping_torus(
        circle, [rotation](const Vector& x) { return Vector{{x[0] + rotation}}; }, rho, {Vector{{0.0}}, Vector{{1.0}}});
    Space s;
    attach_cone(s, mt.cone, box_sampler(circle, Vector{{0.0}}, Vector{{two_pi}}), Vector{{0.0}});
    const double shift = std::log(rho);
    s.contract = [shift, rotation](const Vector& x) { return Vector{{x[0] - shift, x[1] - rotation}}; };
    s.deck = mt.deck;
    return s;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"cone",          "cone-quotient", "strip-s", "cylinder-z",
                                                "punctured-torus", "genus2",      "mapping-torus"};
    return names;
}

Space build_space(const SpaceSpec& spec) {
    static const std::map<std::string, std::set<std::string>> known{
        {"cone", {"length", "apex_guard"}},
        {"cone-quotient", {"base", "length", "axes", "k"}},
        {"strip-s", {"puncture_guard"}},
        {"cylinder-z", {"a", "b"}},
        {"punctured-torus", {"puncture", "guard"}},
        {"genus2", {"tube_radius", "blend"}},
        {"mapping-torus", {"length", "rotation", "rho"}},
    };
    const int name_line = spec.lines.count("name") ? spec.lines.at("name") : 0;
    const auto it = known.find(spec.name);
    if (it == known.end()) {
        std::string list;
        for (const auto& n : catalog_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("space.name", "unknown catalog space '" + spec.name + "' (expected one of: " + list + ")",
                          name_line);
    }
    std::set<std::string> allowed = it->second;
    allowed.insert("lee_sign");
    Params p(spec, allowed);
    if (spec.name == "cone-quotient" && p.has("base")) {
        // Parameters belonging to another base are rejected rather than ignored.
        const auto* b = std::get_if<std::string>(&spec.params.at("base"));
        if (b && *b != "circle" && p.has("length"))
            throw ConfigError("space.length", "only meaningful for base 'circle'", p.line("length"));
        if (b && *b != "ellipsoid" && p.has("axes"))
            throw ConfigError("space.axes", "only meaningful for base 'ellipsoid'", p.line("axes"));
    }
    Space s;
    try {
        if (spec.name == "cone") s = cone_space(p);
        else if (spec.name == "cone-quotient") s = cone_quotient_space(p);
        else if (spec.name == "strip-s") s = strip_space(p);
        else if (spec.name == "cylinder-z") s = cylinder_space(p);
        else if (spec.name == "punctured-torus") s = torus_space(p);
        else if (spec.name == "genus2") s = genus2_space(p);
        else s = mapping_torus_space(p);
    } catch (const ArgumentError& e) {
        throw ConfigError("space", e.what(), name_line);
    } catch (const ConstructionError& e) {
        throw ConfigError("space", e.what(), name_line);
    }
    // The flipped convention is kept so its failure can be inspected.
    if (p.word("lee_sign", "consistent", {"consistent", "flipped"}) == "flipped")
        s.weyl = s.weyl.with_sign(LeeSign::flipped);
    s.name = spec.name;
    s.parameters = p.used;
    return s;
}

}  // namespace weyllab::cli
