// Acceptance suite: one line per criterion, non-zero exit when any fails.
#include "weyllab/catalog.hpp"
#include "weyllab/charts.hpp"
#include "weyllab/holonomy.hpp"
#include "weyllab/tame.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace weyllab;
using catalog::Cone;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Radial geodesics of the cone over a circle of length 5 die after length t.
Outcome cone_ray_lifetimes() {
    const auto t0 = std::chrono::steady_clock::now();
    const Cone c = catalog::cone_over_circle(5.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t_dist(0.05, 5.0), phi_dist(0.0, 2.0 * pi);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double t = t_dist(rng);
        const Vector x{{t, phi_dist(rng)}};
        const LifetimeRecord r = lifetime(c.exact, x, Vector{{-1.0, 0.0}}, 10.0 * t);
        if (r.status != LifetimeStatus::incomplete) return {false, "a radial ray was not incomplete"};
        worst = std::max(worst, std::abs(*r.lifetime - t) / t);
        // The same ray through the Weyl structure on the cylinder, with g₀-unit speed.
        const Vector s = c.to_cylinder(x);
        const LifetimeRecord rw = lifetime(c.weyl, s, Vector{{-1.0 / t, 0.0}}, 10.0 * t);
        if (rw.status != LifetimeStatus::incomplete) return {false, "a radial Weyl geodesic was not incomplete"};
        worst = std::max(worst, std::abs(*rw.lifetime - t) / t);
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-3 && dt < 5.0, fmt("max relative error %.2e over 50 points (<1e-3), %.2f s (<5 s)", worst, dt)};
}

// 2. ε_best of the cone's Weyl structure is ½.
Outcome analytic_tameness() {
    const auto t0 = std::chrono::steady_clock::now();
    const Cone c = catalog::cone_over_circle(5.0);
    SphereBundleSample sample;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> s_dist(-5.0, 5.0), phi_dist(0.0, 2.0 * pi);
    for (int i = 0; i < 100; ++i) sample.points.push_back(Vector{{s_dist(rng), phi_dist(rng)}});
    sample.directions_per_point = 100;
    const AnalyticTameReport rep = analytic_tame_check(c.weyl, sample);
    const double dt = seconds_since(t0);
    const bool ok = std::abs(rep.epsilon_best - 0.5) <= 1e-4 && rep.sample_size == 10000 && dt < 10.0;
    return {ok, fmt("epsilon_best = %.8f over %zu vectors (0.5 +- 1e-4), %.2f s (<10 s)", rep.epsilon_best,
                    rep.sample_size, dt)};
}

// 3. F' = FH along geodesics of the cone quotient, and H ≤ −√ε/F on incomplete ones.
Outcome fh_system() {
    const auto t0 = std::chrono::steady_clock::now();
    const Cone c = catalog::cone_over_circle(5.0);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> s_dist(-1.0, 1.0), angle(0.0, 2.0 * pi);
    double residual = 0.0, est = -std::numeric_limits<double>::infinity();
    int incomplete = 0;
    for (int i = 0; i < 100; ++i) {
        const Vector x{{s_dist(rng), angle(rng)}};
        // Half random directions, half aimed at the apex.
        const double a = i % 2 == 0 ? angle(rng) : pi;
        const DirectionFrame frame(c.weyl, x);
        const Vector X = frame.at_angle(a);
        GeodesicOptions opt;
        opt.tol = 1e-12;
        const Trajectory traj = integrate(c.weyl, x, X, 3.0, opt);
        const FHSeries fh = fh_series(traj, c.weyl, 0.5);
        residual = std::max(residual, fh.residual);
        if (traj.incomplete()) {
            ++incomplete;
            est = std::max(est, *fh.est_margin);
        }
    }
    const double dt = seconds_since(t0);
    const bool ok = residual <= 1e-4 && incomplete > 0 && est <= 1e-3 && dt < 30.0;
    return {ok, fmt("max|F'-FH| = %.2e (<=1e-4); %d incomplete, max(H + sqrt(eps)/F) = %.2e (<=1e-3); %.2f s", residual,
                    incomplete, est, dt)};
}

// 4. Life-times of incomplete geodesics stay below (ε g(γ̇, γ̇))^(−1/2).
Outcome lifetime_bound_check() {
    const Cone c = catalog::cone_over_circle(5.0);
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> s_dist(-2.0, 2.0), angle(0.0, 2.0 * pi), speed(0.2, 5.0),
        tilt(-1e-9, 1e-9);
    int violations = 0, sampled = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 500; ++i) {
        const Vector x{{s_dist(rng), angle(rng)}};
        // Near-radial inward vectors with random g-length: the incomplete ones.
        const Vector X = speed(rng) * Vector{{-1.0, tilt(rng)}};
        const LifetimeRecord r = lifetime(c.weyl, x, X, 100.0);
        if (r.status != LifetimeStatus::incomplete) continue;
        ++sampled;
        const double bound = lifetime_bound(c.weyl, 0.5, x, X);
        worst = std::max(worst, *r.lifetime - bound);
        if (!(*r.lifetime <= bound + 1e-3)) ++violations;
    }
    return {violations == 0 && sampled == 500,
            fmt("%d violations over %d incomplete geodesics; max(lifetime - bound) = %.3f", violations, sampled, worst)};
}

// 5. Lemma bound d(x, f x) < K_x = D_x(∏ρ/(ρ−1) + 1) for contracting words.
Outcome lemma_bound() {
    const HomothetyGroup g = catalog::two_generator_group();
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> t_dist(0.1, 10.0), angle(0.0, 2.0 * pi);
    const auto words = random_contracting_words(g, 200, 6, 15);
    int violations = 0;
    double k_defect = 0.0, min_margin = std::numeric_limits<double>::infinity();
    for (const auto& w : words) {
        const Vector x{{t_dist(rng), angle(rng)}};
        const BoundCheck b = contraction_check(g, x, w);
        if (!b.holds()) ++violations;
        min_margin = std::min(min_margin, b.margin() / b.bound);
        k_defect = std::max(k_defect, std::abs(k_bound(g, x) - 4.0 * g.displacement(x)));
    }
    return {violations == 0 && words.size() == 200 && k_defect == 0.0,
            fmt("%d violations over %zu words (min relative margin %.3f); |K_x - 4 D_x| = %.1e", violations,
                words.size(), min_margin, k_defect)};
}

// 6. Cauchy estimate d(fᵐx, fⁿx) < d(x, fx) ρᵐ/(1 − ρ).
Outcome cauchy_estimate() {
    const Cone c = catalog::cone_over_circle(5.0);
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> t_dist(0.1, 10.0), angle(0.0, 2.0 * pi);
    const HomothetyGroup two = catalog::two_generator_group();
    const Word f = {{0, -1}};                  // t ↦ kt on the quotient cone
    const Word f2 = {{1, -1}, {0, 1}};         // (t, φ) ↦ (2t/3, φ − 1)
    int checks = 0, violations = 0;
    for (int i = 0; i < 50; ++i) {
        const Vector x{{t_dist(rng), angle(rng)}};
        for (int m = 0; m <= 20; ++m)
            for (int n = m + 1; n <= 20; ++n) {
                for (const auto* grp : {&c.group, &two}) {
                    const Word& w = grp == &c.group ? f : f2;
                    const BoundCheck b = cauchy_contraction(*grp, x, w, m, n);
                    ++checks;
                    if (!b.holds()) ++violations;
                }
            }
    }
    // Worked example: x at t = 1 on the radial line, ρ = 1/2, m = 2, n = 5.
    const BoundCheck ex = cauchy_contraction(c.group, Vector{{1.0, 0.0}}, f, 2, 5);
    const bool exact = ex.measured == 0.21875 && ex.bound == 0.25;
    return {violations == 0 && exact,
            fmt("%d violations over %d (x, m, n, f) checks; worked example %.5f < %.5f", violations, checks,
                ex.measured, ex.bound)};
}

// 7. Weak-tameness failures on the punctured torus and the strip S.
Outcome weak_tameness_failures() {
    // Punctured torus: incomplete vectors accumulate at a complete irrational-slope vector.
    const WeylStructure torus = WeylStructure::levi_civita(catalog::build_punctured_torus({0.5, 0.5}));
    const Vector x{{0.1, 0.2}};
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    const Vector X = Vector{{1.0, golden}}.normalized();
    ProbeOptions po;
    po.horizon = 600.0;
    const WeakTameProbe probe = weak_tame_probe(torus, x, X, {1e-1, 1e-2, 1e-3, 1e-4}, po);
    const bool torus_ok = probe.accumulates();

    // Strip S: μ blows up at (2, 0), stays below the line-geometry supremum off the axis.
    const WeylStructure strip = WeylStructure::levi_civita(catalog::build_strip_S());
    MuOptions mo;
    mo.horizon = 200.0;
    const MuEstimate on_axis = mu_estimate(strip, Vector{{2.0, 0.0}}, mo);
    const Vector off{{2.0, 0.4}};
    const MuEstimate off_axis = mu_estimate(strip, off, mo);
    // Oracle: exit parameter of straight lines from `off`, maximised over directions.
    auto exit_time = [&](double a) {
        const double c = std::cos(a), s = std::sin(a);
        double best = std::numeric_limits<double>::infinity();
        if (c < 0.0) best = (1.0 - off[0]) / c;
        // (x0 + τc)(y0 + τs) = ±1
        for (double sign : {1.0, -1.0}) {
            const double A = c * s, B = off[0] * s + off[1] * c, C = off[0] * off[1] - sign;
            if (std::abs(A) < 1e-15) {
                if (std::abs(B) > 0.0 && -C / B > 0.0) best = std::min(best, -C / B);
                continue;
            }
            const double disc = B * B - 4.0 * A * C;
            if (disc < 0.0) continue;
            for (double r : {(-B - std::sqrt(disc)) / (2.0 * A), (-B + std::sqrt(disc)) / (2.0 * A)})
                if (r > 0.0) best = std::min(best, r);
        }
        return best;
    };
    double oracle = 0.0, arg = 0.0;
    for (int k = 0; k < 200000; ++k) {
        const double a = 2.0 * pi * k / 200000;
        if (exit_time(a) > oracle) {
            oracle = exit_time(a);
            arg = a;
        }
    }
    for (double w = 2.0 * pi / 200000; w > 1e-15; w /= 10.0)
        for (int k = -20; k <= 20; ++k) {
            const double a = arg + w * k / 10.0;
            if (exit_time(a) > oracle) {
                oracle = exit_time(a);
                arg = a;
            }
        }
    const bool strip_ok = on_axis.value && *on_axis.value > 10.0 && off_axis.value &&
                          *off_axis.value <= oracle * (1.0 + 1e-6);
    std::ostringstream os;
    os << "torus: incomplete vectors found at radii";
    for (const auto& l : probe.levels) os << " " << l.radius << (l.found ? "(yes)" : "(no)");
    os << fmt("; strip: mu(2,0) = %.2f (>10), mu(2,0.4) = %.7f <= oracle %.7f", on_axis.value.value_or(0.0),
              off_axis.value.value_or(-1.0), oracle);
    return {torus_ok && strip_ok, os.str()};
}

// 8. The genus-2 witness.
Outcome genus2_witness() {
    const catalog::Genus2Surface s;
    const std::vector<double> eps{0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 32, 0.01};
    const catalog::WitnessRecord w = catalog::non_tame_witness(s, 0, eps);
    if (!w.found) return {false, "witness not found: " + w.diagnostics};
    double max_ratio = 0.0;
    for (const auto& r : w.ratios) max_ratio = std::max(max_ratio, r.ratio);
    const bool ok = w.symmetry_defect < 1e-3 && max_ratio > 100.0 && w.verdict == TameVerdict::non_tame_witness;
    return {ok, fmt("T+ = %.8f, T- = %.8f, |T- - T+|/T+ = %.1e (<1e-3); max ratio %.1f (>100); spread %.1f, verdict %s",
                    w.t_plus, w.t_minus, w.symmetry_defect, max_ratio, w.quasi_linearity.spread,
                    to_string(w.verdict).c_str())};
}

// Development oracle for the apex loop: a constant vector of the plane read in
// the polar frame after the frame has turned by L.
Matrix development_apex_transport(double length) {
    const Eigen::Vector2d e_t_start(1.0, 0.0), e_phi_start(0.0, 1.0);
    const Eigen::Vector2d e_t_end(std::cos(length), std::sin(length)), e_phi_end(-std::sin(length), std::cos(length));
    Matrix A(2, 2);
    for (int col = 0; col < 2; ++col) {
        const Eigen::Vector2d v = col == 0 ? e_t_start : e_phi_start;
        A(0, col) = v.dot(e_t_end);
        A(1, col) = v.dot(e_phi_end);
    }
    return A;
}

Matrix apex_loop(const Cone& c) {
    const Path loop({PathSegment{[](double s) { return Vector{{1.0, 2.0 * pi * s}}; },
                                 [](double) { return Vector{{0.0, 2.0 * pi}}; }, "apex-circle"}});
    DeckTransformation deck{"phi+2pi", [](const Vector& x) { return Vector{{x[0], x[1] + 2.0 * pi}}; },
                            [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); }};
    return full_holonomy_element(c.exact, loop, deck);
}

// 9. Holonomy.
Outcome holonomy_checks() {
    // Flat cone: lassos and the apex loop act trivially.
    const Cone flat = catalog::cone_over_circle(2.0 * pi);
    const HolonomySample hs = holonomy_scan(flat.weyl, Vector{{0.0, 0.0}}, {}, 16, 19);
    double flat_defect = 0.0;
    for (const auto& A : hs.elements) flat_defect = std::max(flat_defect, (A - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    flat_defect = std::max(flat_defect, (apex_loop(flat) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());

    // Deficit cone: apex loop against the development.
    const double L = 5.0;
    const Matrix A = apex_loop(catalog::cone_over_circle(L));
    const double apex_error = (A - development_apex_transport(L)).cwiseAbs().maxCoeff();
    double angle = std::fmod(-std::atan2(A(1, 0), A(0, 0)) + 2.0 * pi, 2.0 * pi);
    angle = 2.0 * pi - angle;  // rotation by −L ≡ 2π − L
    const double angle_error = std::abs(angle - (2.0 * pi - L));

    // S² × ℝ: holonomy acts on the sphere factor only.
    const WeylStructure prod =
        WeylStructure::levi_civita(charts::product(charts::sphere_stereographic(1.0), charts::flat(1)));
    LoopFamily fam;
    fam.radius = 0.2;
    const Decomposition dp = invariant_subspaces(holonomy_scan(prod, Vector{{0.1, -0.2, 0.0}}, fam, 12, 23));
    const bool prod_ok = dp.label == HolonomyLabel::reducible && dp.dims == std::vector<int>{2, 1};

    // Cone over an ellipsoid: irreducible.
    const Cone ell = catalog::cone_over_ellipsoid(1.0, 1.5, 2.0);
    LoopFamily efam;
    efam.radius = 0.3;
    const Decomposition de = invariant_subspaces(holonomy_scan(ell.weyl, Vector{{0.0, 1.2, 0.3}}, efam, 12, 29));
    const bool ell_ok = de.dims == std::vector<int>{3};

    auto dims = [](const Decomposition& d) {
        std::string s = "[";
        for (std::size_t i = 0; i < d.dims.size(); ++i) s += (i ? "," : "") + std::to_string(d.dims[i]);
        return s + "]";
    };
    const bool ok = flat_defect < 1e-4 && angle_error < 1e-3 && apex_error < 1e-3 && prod_ok && ell_ok;
    return {ok, fmt("flat cone max|A-I| = %.1e (<1e-4); apex angle error %.1e (<1e-3, development entries %.1e); "
                    "S2xR dims %s %s; ellipsoid cone dims %s %s",
                    flat_defect, angle_error, apex_error, dims(dp).c_str(), to_string(dp.label).c_str(),
                    dims(de).c_str(), to_string(de.label).c_str())};
}

// 10. Tame-consistent and reducible implies flat, across the closed non-exact catalog.
struct SweepEntry {
    std::string name;
    Cone cone;
    std::vector<Vector> base_points;  // base coordinates of sample points
};

Outcome theorem_sweep() {
    std::vector<SweepEntry> entries;
    entries.push_back({"cone-quotient(L=2pi)", catalog::cone_over_circle(2.0 * pi), {Vector{{0.0}}, Vector{{2.0}}}});
    entries.push_back({"cone-quotient(L=5)", catalog::cone_over_circle(5.0), {Vector{{0.0}}, Vector{{2.0}}}});
    entries.push_back({"cone-quotient(S2)", catalog::cone_over_sphere(), {Vector{{0.1, 0.2}}, Vector{{-0.4, 0.3}}}});
    entries.push_back(
        {"cone-quotient(ellipsoid)", catalog::cone_over_ellipsoid(1.0, 1.5, 2.0), {Vector{{1.2, 0.3}}, Vector{{1.8, 2.0}}}});
    {
        const auto mt = catalog::build_mapping_torus(
            charts::circle(2.0 * pi), [](const Vector& x) { return Vector{{x[0] + 1.0}}; }, 2.0,
            {Vector{{0.0}}, Vector{{1.0}}});
        entries.push_back({"mapping-torus(rotation 1)", mt.cone, {Vector{{0.0}}, Vector{{2.0}}}});
    }

    std::ostringstream os;
    int exercised = 0, counterexamples = 0;
    for (const auto& e : entries) {
        const Cone& c = e.cone;
        std::vector<std::vector<Vector>> levels;
        for (int j = 0; j < 3; ++j) {
            std::vector<Vector> lvl;
            for (const auto& b : e.base_points) {
                Vector x(b.size() + 1);
                x << -j * std::log(2.0), b;
                lvl.push_back(x);
            }
            levels.push_back(lvl);
        }
        MuOptions mo;
        mo.n_directions = 32;
        mo.horizon = 20.0;
        const TameReport tr = tame_report(c.weyl, levels, [](const Vector& x) { return std::exp(x[0]); }, mo);
        const bool tame = tr.verdict == TameVerdict::tame_consistent;

        LoopFamily fam;
        fam.radius = 0.3;
        const Decomposition d = invariant_subspaces(holonomy_scan(c.weyl, levels[0][0], fam, 12, 31));
        const bool reducible = d.label == HolonomyLabel::trivial || d.label == HolonomyLabel::reducible;
        std::vector<Vector> pts;
        for (const auto& l : levels) pts.insert(pts.end(), l.begin(), l.end());
        const FlatnessCertificate fc = flatness_certificate(c.weyl, pts);
        if (tame && reducible) {
            ++exercised;
            if (!fc.flat) ++counterexamples;
        }
        os << fmt("%s: %s/%s/%s(%.1e); ", e.name.c_str(), to_string(tr.verdict).c_str(), to_string(d.label).c_str(),
                  fc.flat ? "flat" : "curved", fc.max_norm);
    }
    os << fmt("%d examples exercise the implication, %d counterexamples", exercised, counterexamples);
    return {counterexamples == 0 && exercised > 0, os.str()};
}

// 11. Equivariant extensions on the dyadic cone quotient.
Outcome quasi_linearity_extension() {
    const Cone c = catalog::cone_over_circle(2.0 * pi, 0.5);
    const FundamentalDomain omega = c.fundamental_domain();
    const auto ext_delta = equivariant_extend(c.group, omega, c.model.delta);
    const auto ext_one = equivariant_extend(c.group, omega, [](const Vector&) { return 1.0; });
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> log_t(-8.0, 8.0), angle(0.0, 2.0 * pi);
    double delta_error = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vector x{{std::exp2(log_t(rng)), angle(rng)}};
        delta_error = std::max(delta_error, std::abs(ext_delta(x) - c.model.delta(x)));
        const double r = ext_one(x) / c.model.delta(x);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {delta_error == 0.0 && lo >= 0.5 && hi <= 1.0,
            fmt("max|ext(delta) - delta| = %.1e (exact); ext(1)/delta in [%.4f, %.4f] (within [0.5, 1])", delta_error,
                lo, hi)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cone ray lifetimes", cone_ray_lifetimes},
        {"analytic tameness of the cone", analytic_tameness},
        {"F/H system", fh_system},
        {"lifetime bound", lifetime_bound_check},
        {"contracting-word bound K_x", lemma_bound},
        {"Cauchy estimate", cauchy_estimate},
        {"weak-tameness failures", weak_tameness_failures},
        {"genus-2 non-tame witness", genus2_witness},
        {"holonomy", holonomy_checks},
        {"reducible + tame => flat sweep", theorem_sweep},
        {"quasi-linearity by extension", quasi_linearity_extension},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2zu %s  %s: %s [%.2f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
