#include <doctest.h>

#include "weyllab/catalog.hpp"
#include "weyllab/charts.hpp"
#include "weyllab/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace weyllab;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

// Cone over a circle of length L unrolled onto a sector of angle L: a point
// (t, φ) sits at t·(cos cφ, sin cφ) with c = L/2π.
Vector develop(double c, const Vector& x) {
    return vec({x[0] * std::cos(c * x[1]), x[0] * std::sin(c * x[1])});
}

}  // namespace

TEST_CASE("flat plane geodesics are straight lines") {
    const auto w = WeylStructure::levi_civita(charts::flat(2));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int k = 0; k < 10; ++k) {
        const Vector x0 = vec({n01(rng), n01(rng)});
        const Vector v0 = vec({n01(rng), n01(rng)});
        const Trajectory tr = integrate(w, x0, v0, 5.0);
        CHECK(tr.termination == Termination::horizon);
        for (const auto& s : tr.states) CHECK((s.x - (x0 + s.t * v0)).norm() < 1e-9);
    }
}

TEST_CASE("radial cone geodesic reaches the apex at parameter t") {
    const auto w = WeylStructure::levi_civita(charts::cone(charts::circle(5.0)));
    for (double t0 : {1.0, 3.0, 0.25}) {
        const auto rec = lifetime(w, vec({t0, 0.7}), vec({-1.0, 0.0}), 100.0);
        REQUIRE(rec.status == LifetimeStatus::incomplete);
        CHECK(rec.termination == Termination::hit_singular_set);
        CHECK(*rec.lifetime == doctest::Approx(t0).epsilon(1e-9));
    }
}

TEST_CASE("cone geodesics match the development of the cone") {
    const double L = 5.0, c = L / (2.0 * std::numbers::pi);
    const auto w = WeylStructure::levi_civita(charts::cone(charts::circle(L)));
    const Vector x0 = vec({1.3, 0.2});
    const Vector v0 = vec({-0.4, 0.9});
    const Trajectory tr = integrate(w, x0, v0, 2.0);
    REQUIRE(tr.termination == Termination::horizon);
    // Planar velocity: radial part v_t plus angular part t·c·v_φ.
    const Vector e_r = vec({std::cos(c * x0[1]), std::sin(c * x0[1])});
    const Vector e_p = vec({-std::sin(c * x0[1]), std::cos(c * x0[1])});
    const Vector pv = v0[0] * e_r + x0[0] * c * v0[1] * e_p;
    for (const auto& s : tr.states) {
        const Vector expect = develop(c, x0) + s.t * pv;
        CHECK(std::abs(s.x[0] - expect.norm()) < 1e-8);
    }
}

TEST_CASE("Weyl cone geodesics collapse F at the apex") {
    const auto w = WeylStructure(charts::cylinder(charts::circle(5.0)), coordinate_lee_form(2, 0));
    for (double t0 : {1.0, 2.0}) {
        const auto rec = lifetime(w, vec({std::log(t0), 0.0}), vec({-1.0 / t0, 0.0}), 100.0);
        REQUIRE(rec.status == LifetimeStatus::incomplete);
        CHECK(rec.termination == Termination::f_collapse);
        CHECK(*rec.lifetime == doctest::Approx(t0).epsilon(1e-6));
    }
}

TEST_CASE("exp_map") {
    const auto cone = WeylStructure::levi_civita(charts::cone(charts::circle(5.0)));
    const Vector x = vec({1.0, 0.3});
    SUBCASE("small vectors stay close to the base point") {
        for (double e : {1e-2, 1e-4, 1e-6}) CHECK((exp_map(cone, x, e * vec({0.3, 0.8})) - x).norm() < 2.0 * e);
    }
    SUBCASE("radial vector of length 1/2 from t = 1 lands at t = 1/2") {
        const Vector y = exp_map(cone, x, vec({-0.5, 0.0}));
        CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(y[1] == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("a vector tangent to one factor of a product stays in its fiber") {
        const auto w = WeylStructure::levi_civita(charts::product(charts::sphere_polar(), charts::flat(1)));
        const Vector p = vec({1.0, 0.2, 3.0});
        const Vector y = exp_map(w, p, vec({0.3, -0.4, 0.0}));
        CHECK(y[2] == doctest::Approx(3.0).epsilon(1e-12));
        const Vector z = exp_map(w, p, vec({0.0, 0.0, 0.7}));
        CHECK((z.head(2) - p.head(2)).norm() < 1e-12);
        CHECK(z[2] == doctest::Approx(3.7));
    }
    SUBCASE("a geodesic dying before parameter 1 is an incompleteness error") {
        try {
            exp_map(cone, x, vec({-2.0, 0.0}));
            FAIL("no error");
        } catch (const IncompletenessError& e) {
            CHECK(e.lifetime() == doctest::Approx(0.5).epsilon(1e-6));
        }
    }
}

TEST_CASE("lifetime") {
    SUBCASE("flat plane geodesics are complete to any horizon") {
        const auto w = WeylStructure::levi_civita(charts::flat(2));
        for (double h : {1.0, 100.0, 1e4}) {
            const auto rec = lifetime(w, vec({0.0, 0.0}), vec({0.6, 0.8}), h);
            CHECK(rec.status == LifetimeStatus::complete_to_horizon);
            CHECK(!rec.lifetime);
        }
    }
    SUBCASE("radial inward unit vector at t = 3") {
        const auto w = WeylStructure::levi_civita(charts::cone(charts::circle(2.0)));
        CHECK(*lifetime(w, vec({3.0, 1.0}), vec({-1.0, 0.0}), 100.0).lifetime == doctest::Approx(3.0).epsilon(1e-3));
    }
    SUBCASE("strip: lines from (2, 0) die on x²y² = 1") {
        const auto w = WeylStructure::levi_civita(catalog::build_strip_S());
        for (double a : {0.05, 0.2, 0.7}) {
            // (2 + t cos a)(t sin a) = 1
            const double c = std::cos(a), s = std::sin(a);
            const double oracle = (-2.0 * s + std::sqrt(4.0 * s * s + 4.0 * s * c)) / (2.0 * s * c);
            const auto rec = lifetime(w, vec({2.0, 0.0}), vec({c, s}), 1e3);
            REQUIRE(rec.status == LifetimeStatus::incomplete);
            CHECK(*rec.lifetime == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("F/H series") {
    const auto cone = catalog::cone_over_circle(5.0);
    SUBCASE("incomplete cone geodesic obeys the estimate H ≤ −√ε/F") {
        const Trajectory tr = integrate(cone.weyl, vec({0.2, 0.0}), vec({-0.9, 0.0}), 50.0);
        REQUIRE(tr.incomplete());
        const auto fh = fh_series(tr, cone.weyl, 0.5);
        CHECK(fh.residual < 1e-4);
        REQUIRE(fh.est_margin);
        CHECK(*fh.est_margin <= 0.0);
        CHECK(*fh.tame_margin <= 1e-4);
    }
    SUBCASE("Levi-Civita geodesics have H ≡ 0 and constant F") {
        const auto w = WeylStructure::levi_civita(charts::sphere_polar());
        const auto fh = fh_series(integrate(w, vec({1.0, 0.0}), vec({0.3, 0.5}), 4.0), w);
        for (std::size_t i = 0; i < fh.F.size(); ++i) {
            CHECK(fh.H[i] == 0.0);
            CHECK(fh.F[i] == doctest::Approx(fh.F.front()).epsilon(1e-8));
        }
        CHECK(fh.residual < 1e-6);
    }
    SUBCASE("a complete Weyl geodesic has one interior minimum of F, where H changes sign") {
        // Moving towards the apex with an angular component: passes the point of
        // closest approach, then escapes.
        const Trajectory tr = integrate(cone.weyl, vec({0.5, 0.0}), vec({-0.6, 0.6}), 3.0);
        REQUIRE(tr.termination == Termination::horizon);
        const auto fh = fh_series(tr, cone.weyl);
        REQUIRE(fh.h_sign_changes.size() == 1);
        const auto it = std::min_element(fh.F.begin(), fh.F.end());
        const double t_min = fh.t[static_cast<std::size_t>(it - fh.F.begin())];
        CHECK(t_min == doctest::Approx(fh.h_sign_changes.front()).epsilon(1e-2));
        CHECK(it != fh.F.begin());
        CHECK(it != fh.F.end() - 1);
    }
    SUBCASE("too short a trajectory is an argument error") {
        const Trajectory tr = integrate(cone.weyl, vec({0.0, 0.0}), vec({1.0, 0.0}), 1e-4);
        CHECK_THROWS_AS(fh_series(tr, cone.weyl), ArgumentError);
    }
}

TEST_CASE("lifetime bound") {
    const auto cone = catalog::cone_over_circle(5.0);
    const Vector x = vec({0.4, 1.0});
    CHECK(lifetime_bound(cone.weyl, 0.5, x, vec({1.0, 0.0})) == doctest::Approx(std::sqrt(2.0)));
    CHECK(lifetime_bound(cone.weyl, 0.5, x, vec({4.0, 0.0})) == doctest::Approx(std::sqrt(2.0) / 4.0));
    CHECK_THROWS_AS(lifetime_bound(cone.weyl, 0.0, x, vec({1.0, 0.0})), ArgumentError);

    // In s = log t the radial geodesic from s₀ with ṡ = −a dies at 1/a: the bound √2/a holds.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        const Vector p = vec({u(rng), 3.0 * u(rng)});
        const Vector X = vec({-std::exp(u(rng)), 0.0});  // only radial geodesics reach the apex
        const auto rec = lifetime(cone.weyl, p, X, 1e3);
        if (rec.status != LifetimeStatus::incomplete) continue;
        ++checked;
        CHECK(*rec.lifetime <= lifetime_bound(cone.weyl, 0.5, p, X) * (1.0 + 1e-9));
    }
    CHECK(checked > 0);
}

TEST_CASE("leaf exponentiation") {
    GeodesicOptions opt;
    opt.product_split = 1;
    SUBCASE("flat product plane: a translation") {
        const auto w = WeylStructure::levi_civita(charts::flat(2));
        std::vector<Vector> leaf;
        for (double x : {-1.0, 0.0, 0.5, 2.0}) leaf.push_back(vec({x, 0.0}));
        const auto r = leaf_exponentiation(w, leaf, vec({0.0, 1.3}), [](const Vector& a, const Vector& b) { return (a - b).norm(); }, opt);
        CHECK(r.residual < 1e-12);
    }
    SUBCASE("cylinder times a line") {
        // (s, φ, z) with ds² + c²dφ² + dz²; the leaf is a patch of the cylinder.
        const double c = 3.0 / (2.0 * std::numbers::pi);
        const auto w = WeylStructure::levi_civita(charts::product(charts::cylinder(charts::circle(3.0)), charts::flat(1)));
        auto dist = [c](const Vector& a, const Vector& b) {
            return std::sqrt(std::pow(a[0] - b[0], 2) + std::pow(c * (a[1] - b[1]), 2) + std::pow(a[2] - b[2], 2));
        };
        std::vector<Vector> leaf;
        for (double s : {-0.5, 0.0, 0.7})
            for (double phi : {0.1, 0.6}) leaf.push_back(vec({s, phi, 0.0}));
        opt.product_split = 2;
        CHECK(leaf_exponentiation(w, leaf, vec({0.0, 0.0, 0.8}), dist, opt).residual < 1e-5);
    }
    SUBCASE("shear geodesics split into unit and |X| components") {
        const auto w = WeylStructure::levi_civita(charts::product(charts::sphere_polar(), charts::flat(1)));
        const Trajectory base = integrate(w, vec({1.2, 0.0, 0.0}), vec({0.6, 0.8 / std::sin(1.2), 0.0}), 2.0);
        for (const auto& [n1, n2] : shear_projection_norms(w, 2, base, vec({0.0, 0.0, 0.7}), {0.3, 0.9, 1.5})) {
            CHECK(n1 == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(n2 == doctest::Approx(0.7).epsilon(1e-5));
        }
    }
}

TEST_CASE("property: lifetime is homogeneous of degree −1") {
    const auto cone = catalog::cone_over_circle(5.0);
    const auto strip = WeylStructure::levi_civita(catalog::build_strip_S());
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const bool on_cone = k % 2 == 0;
        const auto& w = on_cone ? cone.weyl : strip;
        const Vector x = on_cone ? vec({u(rng), u(rng)}) : vec({2.0, 0.4});
        const Vector X = on_cone ? vec({-1.0 - 0.5 * u(rng), 0.0}) : vec({std::cos(3.0 * u(rng)), std::sin(3.0 * u(rng))});
        const auto base = lifetime(w, x, X, 1e4);
        if (base.status != LifetimeStatus::incomplete) continue;
        for (double s : {0.5, 2.0, 10.0}) {
            const auto scaled = lifetime(w, x, s * X, 1e4);
            REQUIRE(scaled.lifetime);
            CHECK(std::abs(*scaled.lifetime - *base.lifetime / s) <= 1e-3 * *base.lifetime / s);
        }
    }
}

TEST_CASE("property: lifetime is lower semicontinuous on incomplete vectors") {
    const auto w = WeylStructure::levi_civita(catalog::build_strip_S());
    const Vector x = vec({2.0, 0.4});
    for (double a = 0.1; a < 6.2; a += 0.37) {
        const auto rec = lifetime(w, x, vec({std::cos(a), std::sin(a)}), 1e3);
        if (!rec.lifetime) continue;
        for (double d : {-1e-5, 1e-5}) {
            const auto near = lifetime(w, x, vec({std::cos(a + d), std::sin(a + d)}), 1e3);
            CHECK(near.lifetime.value_or(1e3) >= *rec.lifetime - 1e-3);
        }
    }
}

TEST_CASE("property: conserved speeds") {
    SUBCASE("g(v, v) along Levi-Civita geodesics") {
        const auto w = WeylStructure::levi_civita(induced_chart(charts::ellipsoid(1.0, 1.5, 2.0)));
        const Trajectory tr = integrate(w, vec({1.0, 0.3}), vec({0.4, 0.5}), 3.0);
        const double e0 = tr.states.front().v.dot(metric_at(w.reference(), tr.states.front().x) * tr.states.front().v);
        for (const auto& s : tr.states) CHECK(s.v.dot(metric_at(w.reference(), s.x) * s.v) == doctest::Approx(e0).epsilon(1e-8));
    }
    SUBCASE("φ²g(v, v) along Weyl geodesics of a closed structure") {
        const auto cone = catalog::cone_over_sphere();
        const Trajectory tr = integrate(cone.weyl, vec({0.0, 0.2, 0.1}), vec({-0.3, 0.4, -0.2}), 3.0);
        auto g0 = [&](const GeodesicState& s) {
            return std::pow(cone.weyl.potential(s.x), 2) * s.v.dot(metric_at(cone.weyl.reference(), s.x) * s.v);
        };
        const double e0 = g0(tr.states.front());
        for (const auto& s : tr.states) CHECK(g0(s) == doctest::Approx(e0).epsilon(1e-7));
    }
}

TEST_CASE("property: incomplete geodesics drive F below any bound") {
    const auto cone = catalog::cone_over_circle(5.0);
    for (double a : {0.0, 0.001, -0.002}) {
        const Trajectory tr = integrate(cone.weyl, vec({0.0, 0.0}), vec({-1.0, a}), 100.0);
        if (!tr.incomplete()) continue;
        double min_f = tr.states.front().F;
        for (const auto& s : tr.states) min_f = std::min(min_f, s.F);
        CHECK(min_f < 1e-5 * tr.states.front().F);
    }
}

TEST_CASE("product slope is constant along product geodesics") {
    const auto w = WeylStructure::levi_civita(charts::product(charts::flat(2), charts::flat(1)));
    GeodesicOptions opt;
    opt.product_split = 2;
    const Trajectory tr = integrate(w, vec({0, 0, 0}), vec({0.3, 0.4, 2.0}), 2.0, opt);
    for (const auto& s : tr.states) {
        REQUIRE(s.slope);
        CHECK(*s.slope == doctest::Approx(0.25));
    }
}
