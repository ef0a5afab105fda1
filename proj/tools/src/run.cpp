#include "weyllab/cli/run.hpp"

#include "weyllab/cli/spaces.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#ifndef WEYLLAB_VERSION
#define WEYLLAB_VERSION "unknown"
#endif

namespace weyllab::cli {

namespace {

using json = nlohmann::ordered_json;

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
    return rows;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Shortest round-trip text for CSV cells.
std::string num(double d) {
    if (std::isnan(d)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, r.ptr);
}

std::string cells(const Vector& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += "," + num(v[i]);
    return s;
}

std::string header(const std::string& prefix, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += "," + prefix + std::to_string(i);
    return s;
}

std::string word_text(const HomothetyGroup& g, const Word& w) {
    std::string s;
    for (const auto& l : w) {
        if (!s.empty()) s += " ";
        s += g.generators()[static_cast<std::size_t>(l.generator)].name + "^" + std::to_string(l.exponent);
    }
    return s.empty() ? "id" : s;
}

Vector to_point(const Space& s, const std::vector<double>& v, const std::string& field) {
    if (static_cast<int>(v.size()) != s.weyl.dim())
        throw ConfigError(field, "expected " + std::to_string(s.weyl.dim()) + " coordinates, got " +
                                     std::to_string(v.size()));
    const Vector x = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (auto bad = s.weyl.reference().violated(x)) throw ConfigError(field, "point violates '" + *bad + "'");
    return x;
}

Vector base_point(const Space& s, const TaskSpec& t) {
    return t.point ? to_point(s, *t.point, "task.point") : s.default_point;
}

// Explicit points, or the default point followed by seeded samples.
std::vector<Vector> sample_points(const Space& s, const RunConfig& c) {
    std::vector<Vector> out;
    if (!c.task.points.empty()) {
        for (std::size_t i = 0; i < c.task.points.size(); ++i)
            out.push_back(to_point(s, c.task.points[i], "task.points[" + std::to_string(i) + "]"));
        return out;
    }
    std::mt19937_64 rng(c.sampling.seed);
    out.push_back(base_point(s, c.task));
    while (static_cast<int>(out.size()) < c.sampling.points) out.push_back(s.sample(rng));
    return out;
}

GeodesicOptions geodesic_options(const RunConfig& c, bool dense) {
    GeodesicOptions go;
    go.tol = c.sampling.tolerance;
    go.store_dense = dense;
    return go;
}

MuOptions mu_options(const RunConfig& c) {
    MuOptions mo;
    mo.n_directions = c.sampling.directions;
    mo.horizon = c.sampling.horizon;
    mo.seed = c.sampling.seed;
    mo.workers = c.sampling.workers;
    mo.geodesic = geodesic_options(c, false);
    return mo;
}

json describe(const Space& s) {
    const ChartMetric& chart = s.weyl.reference();
    json constraints = json::array();
    for (const auto& k : chart.constraints())
        constraints.push_back({{"name", k.name},
                               {"kind", to_string(k.kind)},
                               {"guard", k.guard},
                               {"distance_like", k.distance_like}});
    json out{{"name", s.name},
             {"parameters", s.parameters},
             {"dim", s.weyl.dim()},
             {"chart", chart.name()},
             {"constraints", constraints},
             {"lee_form", {{"kind", s.weyl.lee().kind}, {"closed", s.weyl.closed()}, {"potential", s.weyl.has_potential()}}},
             {"default_point", vec(s.default_point)}};
    if (s.group) {
        json gens = json::array();
        for (const auto& g : s.group->generators()) gens.push_back({{"name", g.name}, {"ratio", g.ratio}});
        out["group"] = {{"generators", gens}, {"distances", s.group->distance_tag()}};
    }
    return out;
}

json run_build(const Space& s) {
    const Vector& x = s.default_point;
    return {{"checks_at_default_point",
             {{"closedness_residual", closedness_residual(s.weyl, x)},
              {"potential_residual", potential_residual(s.weyl, x)},
              {"parallel_metric_residual", check_parallel_metric(s.weyl, x)}}},
            {"features",
             {{"homothety_group", s.group.has_value()},
              {"level_contraction", static_cast<bool>(s.contract)},
              {"closed_form_delta", static_cast<bool>(s.delta)},
              {"deck_transformation", s.deck.has_value()},
              {"embedded_surface", s.surface.has_value()}}}};
}

json run_geodesic(const Space& s, const RunConfig& c, std::string& csv) {
    const Vector x = base_point(s, c.task);
    Vector X;
    if (c.task.vector) {
        if (static_cast<int>(c.task.vector->size()) != s.weyl.dim())
            throw ConfigError("task.vector", "expected " + std::to_string(s.weyl.dim()) + " components");
        X = Eigen::Map<const Vector>(c.task.vector->data(), static_cast<Eigen::Index>(c.task.vector->size()));
    } else {
        X = DirectionFrame(s.weyl, x)(Vector::Unit(s.weyl.dim(), 0));
    }
    const Trajectory traj = integrate(s.weyl, x, X, c.task.t_max, geodesic_options(c, true));
    const FHSeries fh = fh_series(traj, s.weyl);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    csv = os.str();
    return {{"point", vec(x)},
            {"vector", vec(X)},
            {"t_max", c.task.t_max},
            {"termination", to_string(traj.termination)},
            {"detail", traj.detail},
            {"incomplete", traj.incomplete()},
            {"t_end", traj.t_end},
            {"lifetime", traj.incomplete() ? json(traj.lifetime) : json(nullptr)},
            {"approach", std::isfinite(traj.approach) ? json(traj.approach) : json(nullptr)},
            {"steps", traj.states.size()},
            {"rejected_steps", traj.rejected},
            {"fh_residual", fh.residual}};
}

json run_scan(const Space& s, const RunConfig& c, std::string& csv) {
    const auto points = sample_points(s, c);
    ScanOptions so;
    so.directions_per_point = c.sampling.directions;
    so.horizon = c.sampling.horizon;
    so.seed = c.sampling.seed;
    so.workers = c.sampling.workers;
    so.geodesic = geodesic_options(c, false);
    const auto records = lifetime_scan(s.weyl, points, so);
    const int n = s.weyl.dim();
    std::ostringstream os;
    os << "point" << header("x", n) << header("X", n) << ",status,lifetime,termination,approach\n";
    std::map<std::string, std::size_t> counts;
    json per_point = json::array();
    const auto per = static_cast<std::size_t>(c.sampling.directions);
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::optional<double> mu, shortest;
        for (std::size_t k = 0; k < per; ++k) {
            const LifetimeRecord& r = records[p * per + k];
            ++counts[to_string(r.status)];
            os << p << cells(r.x) << cells(r.X) << "," << to_string(r.status) << ","
               << (r.lifetime ? num(*r.lifetime) : "") << "," << to_string(r.termination) << ","
               << (std::isfinite(r.approach) ? num(r.approach) : "") << "\n";
            if (r.status == LifetimeStatus::incomplete) {
                if (!mu || *r.lifetime > *mu) mu = r.lifetime;
                if (!shortest || *r.lifetime < *shortest) shortest = r.lifetime;
            }
        }
        per_point.push_back({{"point", vec(points[p])}, {"max_incomplete_lifetime", opt(mu)},
                             {"min_incomplete_lifetime", opt(shortest)}});
    }
    csv = os.str();
    json status_counts = json::object();
    for (const auto& [k, v] : counts) status_counts[k] = v;
    return {{"directions_per_point", c.sampling.directions},
            {"horizon", c.sampling.horizon},
            {"records", records.size()},
            {"status_counts", status_counts},
            {"points", per_point}};
}

json quasi(const QuasiLinearity& q) { return {{"k1", q.k1}, {"k2", q.k2}, {"spread", q.spread}}; }

json analytic(const Space& s, const std::vector<Vector>& points, const RunConfig& c) {
    SphereBundleSample sample;
    sample.points = points;
    sample.directions_per_point = c.sampling.directions;
    sample.seed = c.sampling.seed;
    const AnalyticTameReport r = analytic_tame_check(s.weyl, sample, c.sampling.workers);
    return {{"epsilon_best", r.epsilon_best},
            {"min_margin", r.min_margin},
            {"sample_size", r.sample_size},
            {"argmin_point", vec(r.argmin_point)},
            {"argmin_direction", vec(r.argmin_direction)},
            {"analytically_tame", r.min_margin > 0.0}};
}

// μ against δ on the sample and its images under the level contraction.
json tame_levels(const Space& s, const RunConfig& c, std::string& csv, TameVerdict& verdict) {
    const auto base = sample_points(s, c);
    std::vector<std::vector<Vector>> levels{base};
    if (s.contract)
        for (int j = 1; j < c.sampling.levels; ++j) {
            std::vector<Vector> next;
            for (const auto& x : levels.back()) next.push_back(s.contract(x));
            levels.push_back(std::move(next));
        }
    const TameReport rep = tame_report(s.weyl, levels, s.delta ? DeltaFn(s.delta) : DeltaFn{}, mu_options(c));
    verdict = rep.verdict;

    const int n = s.weyl.dim();
    std::ostringstream os;
    os << "level" << header("x", n) << ",mu,delta\n";
    std::size_t i = 0;
    for (std::size_t l = 0; l < rep.levels.size() && i < rep.mu_samples.size(); ++l) {
        const std::size_t per = rep.mu_samples.size() / rep.levels.size();
        for (std::size_t k = 0; k < per; ++k, ++i)
            os << l << cells(rep.mu_samples[i].first) << "," << num(rep.mu_samples[i].second) << ","
               << num(rep.delta_samples[i].second) << "\n";
    }
    csv = os.str();

    json lv = json::array();
    for (const auto& q : rep.levels) lv.push_back(quasi(q));
    json out{{"levels", lv},
             {"level_count", levels.size()},
             {"points_per_level", base.size()},
             {"ratio_bounds", {rep.ratio_bounds.first, rep.ratio_bounds.second}},
             {"delta_source", s.delta ? "closed-form" : "lifetimes"},
             {"delta_upper_bound", rep.delta_upper_bound},
             {"censored", rep.censored},
             {"verdict", to_string(rep.verdict)}};
    if (rep.witness)
        out["witness"] = {{"kind", rep.witness->kind},
                          {"spreads", rep.witness->spreads},
                          {"point", vec(rep.witness->point)},
                          {"direction", vec(rep.witness->direction)}};
    if (!s.contract) out["note"] = "space has no level contraction; one level only";
    return out;
}

json run_tame(const Space& s, const RunConfig& c, std::string& csv, TameVerdict& verdict) {
    json out = tame_levels(s, c, csv, verdict);
    out["analytic"] = analytic(s, sample_points(s, c), c);
    return out;
}

json run_analytic(const Space& s, const RunConfig& c, std::string& csv) {
    const auto points = sample_points(s, c);
    const int n = s.weyl.dim();
    std::ostringstream os;
    os << "point" << header("x", n) << ",min_margin,epsilon\n";
    for (std::size_t p = 0; p < points.size(); ++p) {
        SphereBundleSample one;
        one.points = {points[p]};
        one.directions_per_point = c.sampling.directions;
        one.seed = c.sampling.seed + p;
        const AnalyticTameReport r = analytic_tame_check(s.weyl, one);
        os << p << cells(points[p]) << "," << num(r.min_margin) << "," << num(r.epsilon_best) << "\n";
    }
    csv = os.str();
    return analytic(s, points, c);
}

json run_holonomy(const Space& s, const RunConfig& c, std::string& csv) {
    const Vector base = base_point(s, c.task);
    LoopFamily fam;
    fam.radius = c.task.loop_radius;
    fam.reach = c.task.loop_reach;
    const double tol = std::max(c.sampling.tolerance * 1e-1, 1e-13);
    const HolonomySample hs = holonomy_scan(s.weyl, base, fam, c.task.loops, c.sampling.seed, c.sampling.workers, tol);
    const int n = s.weyl.dim();
    std::ostringstream os;
    os << "loop,label";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) os << ",a" << i << j;
    os << "\n";
    for (std::size_t k = 0; k < hs.elements.size(); ++k) {
        os << k << "," << hs.loops[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) os << "," << num(hs.elements[k](i, j));
        os << "\n";
    }
    csv = os.str();

    json out{{"base", vec(base)}, {"loops", hs.elements.size()}, {"orthogonality_residual", hs.orthogonality_residual}};
    if (hs.elements.size() >= 2) {
        const Decomposition d = invariant_subspaces(hs);
        out["decomposition"] = {{"dims", d.dims},
                                {"label", to_string(d.label)},
                                {"trivial", d.trivial},
                                {"residual", d.residual},
                                {"complex_structure", d.complex_structure ? mat(*d.complex_structure) : json(nullptr)}};
    }
    std::vector<Vector> pts{base};
    std::mt19937_64 rng(c.sampling.seed);
    for (int k = 1; k < c.sampling.points; ++k) pts.push_back(s.sample(rng));
    const FlatnessCertificate fc = flatness_certificate(s.weyl, pts);
    out["flatness"] = {{"max_norm", fc.max_norm}, {"argmax", vec(fc.argmax)}, {"flat", fc.flat}, {"points", pts.size()}};
    if (s.deck) {
        const Path path = Path::polyline({base, s.deck->map(base)});
        const Matrix A = full_holonomy_element(s.weyl, path, *s.deck, tol);
        json full{{"deck", s.deck->name}, {"element", mat(A)}};
        if (n == 2) full["rotation_angle"] = std::atan2(A(1, 0), A(0, 0));
        out["full_holonomy"] = full;
    }
    return out;
}

json run_bounds(const Space& s, const RunConfig& c, std::string& csv) {
    if (!s.group) throw ConfigError("space.name", "'" + s.name + "' has no homothety group; bounds-check needs one");
    const HomothetyGroup& g = *s.group;
    const auto words = random_contracting_words(g, static_cast<std::size_t>(c.task.words), c.task.max_exponent,
                                                c.sampling.seed);
    const auto points = sample_points(s, c);
    std::vector<Vector> gp;
    for (const auto& x : points) gp.push_back(s.to_group(x));

    std::ostringstream os;
    os << "kind,word,point,m,n,ratio,measured,bound,holds\n";
    std::size_t lemma_violations = 0, cauchy_checks = 0, cauchy_violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::size_t p = i % gp.size();
        const BoundCheck b = contraction_check(g, gp[p], words[i]);
        if (!b.holds()) ++lemma_violations;
        min_margin = std::min(min_margin, b.margin() / b.bound);
        os << "lemma," << word_text(g, words[i]) << "," << p << ",,," << num(b.ratio) << "," << num(b.measured) << ","
           << num(b.bound) << "," << (b.holds() ? 1 : 0) << "\n";
    }
    const std::size_t cauchy_words = std::min<std::size_t>(words.size(), 3);
    for (std::size_t i = 0; i < cauchy_words; ++i)
        for (std::size_t p = 0; p < gp.size(); ++p)
            for (int m = 0; m <= c.task.cauchy_max; ++m)
                for (int n = m + 1; n <= c.task.cauchy_max; ++n) {
                    const BoundCheck b = cauchy_contraction(g, gp[p], words[i], m, n);
                    ++cauchy_checks;
                    if (!b.holds()) ++cauchy_violations;
                    os << "cauchy," << word_text(g, words[i]) << "," << p << "," << m << "," << n << "," << num(b.ratio)
                       << "," << num(b.measured) << "," << num(b.bound) << "," << (b.holds() ? 1 : 0) << "\n";
                }
    csv = os.str();
    json kx = json::array();
    for (const auto& x : gp) kx.push_back({{"point", vec(x)}, {"D_x", g.displacement(x)}, {"K_x", k_bound(g, x)}});
    return {{"distances", g.distance_tag()},
            {"lemma", {{"words", words.size()}, {"violations", lemma_violations}, {"min_relative_margin", min_margin}}},
            {"cauchy", {{"checks", cauchy_checks}, {"violations", cauchy_violations}, {"max_n", c.task.cauchy_max}}},
            {"k_bounds", kx}};
}

json run_witness(const Space& s, const RunConfig& c, std::string& csv, bool& found) {
    if (!s.surface) {
        TameVerdict v = TameVerdict::inconclusive;
        json out = tame_levels(s, c, csv, v);
        found = v == TameVerdict::non_tame_witness;
        out["method"] = "tame-report";
        return out;
    }
    catalog::WitnessOptions wo;
    wo.workers = c.sampling.workers;
    const catalog::WitnessRecord w = catalog::non_tame_witness(*s.surface, c.task.copy, c.task.eps, wo);
    found = w.found && w.verdict == TameVerdict::non_tame_witness;
    std::ostringstream os;
    os << "eps,short_length,long_length,ratio\n";
    json ratios = json::array();
    for (const auto& r : w.ratios) {
        os << num(r.eps) << "," << num(r.short_length) << "," << num(r.long_length) << "," << num(r.ratio) << "\n";
        ratios.push_back({{"eps", r.eps}, {"short", r.short_length}, {"long", r.long_length}, {"ratio", r.ratio}});
    }
    csv = os.str();
    json levels = json::array();
    for (const auto& l : w.levels)
        levels.push_back({{"eps", l.eps}, {"mu_lower", l.mu_lower}, {"delta_upper", l.delta_upper},
                          {"point", vec(l.point)}});
    return {{"method", "double-ended-geodesic"},
            {"found", w.found},
            {"copy", w.n},
            {"base", vec(w.base)},
            {"direction", vec(w.direction)},
            {"beta", w.beta},
            {"t_plus", w.t_plus},
            {"t_minus", w.t_minus},
            {"symmetry_defect", w.symmetry_defect},
            {"depth", w.depth},
            {"ratios", ratios},
            {"levels", levels},
            {"quasi_linearity", quasi(w.quasi_linearity)},
            {"verdict", to_string(w.verdict)},
            {"evaluations", w.evaluations},
            {"diagnostics", w.diagnostics}};
}

}  // namespace

RunOutcome execute(const RunConfig& config) {
    const Space s = build_space(config.space);
    RunOutcome out;
    json result;
    std::string status = "ok";
    switch (config.task.kind) {
        case TaskKind::build: result = run_build(s); break;
        case TaskKind::geodesic: result = run_geodesic(s, config, out.csv); break;
        case TaskKind::lifetime_scan: result = run_scan(s, config, out.csv); break;
        case TaskKind::tame_check: {
            TameVerdict v = TameVerdict::inconclusive;
            result = run_tame(s, config, out.csv, v);
            break;
        }
        case TaskKind::analytic_tame: result = run_analytic(s, config, out.csv); break;
        case TaskKind::holonomy: result = run_holonomy(s, config, out.csv); break;
        case TaskKind::bounds_check: result = run_bounds(s, config, out.csv); break;
        case TaskKind::witness: {
            bool found = false;
            result = run_witness(s, config, out.csv, found);
            if (found) {
                status = "witness-found";
                out.exit_code = exit_witness;
            }
            break;
        }
    }
    out.report = json{{"weyllab", {{"version", WEYLLAB_VERSION}, {"schema", kSchemaVersion}}},
                      {"config", to_yaml(config)},
                      {"task", to_string(config.task.kind)},
                      {"space", describe(s)},
                      {"status", status},
                      {"artifacts", {{"csv", out.csv.empty() ? json(nullptr) : json(config.output.csv)}}},
                      {"result", result}};
    return out;
}

WrittenFiles write_outputs(const RunConfig& config, const RunOutcome& outcome) {
    namespace fs = std::filesystem;
    const fs::path dir(config.output.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("output.dir", "cannot create '" + dir.string() + "': " + ec.message());
    auto write = [](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw ConfigError("output", "cannot write '" + p.string() + "'");
        f << text;
    };
    WrittenFiles w;
    w.report = dir / config.output.report;
    write(w.report, outcome.report.dump(2) + "\n");
    if (!outcome.csv.empty()) {
        w.csv = dir / config.output.csv;
        write(*w.csv, outcome.csv);
    }
    w.config = dir / "config.yaml";
    write(w.config, to_yaml(config));
    return w;
}

}  // namespace weyllab::cli
