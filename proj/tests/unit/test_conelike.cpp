#include <doctest.h>

#include "helpers.hpp"
#include "weyllab/catalog.hpp"
#include "weyllab/charts.hpp"

#include <cmath>
#include <numbers>

using namespace weyllab;
using testing::vec;

namespace {

constexpr double pi = std::numbers::pi;

// Distance on the flat cone over a circle of length L: unroll onto a sector of
// angle L, law of cosines when the unrolled angle is below π.
double cone_distance(double L, const Vector& p, const Vector& q) {
    double dphi = std::fmod(std::abs(p[1] - q[1]), 2.0 * pi);
    dphi = std::min(dphi, 2.0 * pi - dphi) * L / (2.0 * pi);
    if (dphi >= pi) return p[0] + q[0];
    return std::sqrt(p[0] * p[0] + q[0] * q[0] - 2.0 * p[0] * q[0] * std::cos(dphi));
}

Generator scaling(double rho, double turn = 0.0) {
    return {"scale", rho, [rho, turn](const Vector& x) { return vec({rho * x[0], x[1] + turn}); },
            [rho, turn](const Vector& x) { return vec({x[0] / rho, x[1] - turn}); }};
}

HomothetyGroup cone_group(std::vector<Generator> gens, double L = 2.0 * pi) {
    return HomothetyGroup(std::move(gens), [L](const Vector& a, const Vector& b) { return cone_distance(L, a, b); });
}

Vector random_cone_point(std::mt19937_64& rng) {
    return testing::uniform(rng, vec({0.2, -pi}), vec({5.0, pi}));
}

}  // namespace

TEST_CASE("ratio is a homomorphism") {
    const auto g = catalog::two_generator_group();
    CHECK(g.ratio({}) == 1.0);
    CHECK(cone_group({scaling(2.0)}).ratio({{0, -3}}) == 0.125);
    CHECK(g.ratio(word_from_exponents({2, -1})) == doctest::Approx(4.0 / 3.0));

    const auto words = random_contracting_words(g, 50, 5, 3);
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        CHECK(g.ratio(concat(words[i], words[i + 1])) == doctest::Approx(g.ratio(words[i]) * g.ratio(words[i + 1])));
        CHECK(g.ratio(inverse(words[i])) == doctest::Approx(1.0 / g.ratio(words[i])));
        CHECK(g.ratio(words[i]) < 1.0);
    }
}

TEST_CASE("generators are homotheties; no ratio-one word other than the identity") {
    const auto g = catalog::two_generator_group();
    std::mt19937_64 rng(1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<std::pair<Vector, Vector>> pairs;
        for (int k = 0; k < 100; ++k) pairs.emplace_back(random_cone_point(rng), random_cone_point(rng));
        CHECK(homothety_residual(g, i, pairs) < 1e-4);
    }
    std::vector<Word> words;
    for (long a = -3; a <= 3; ++a)
        for (long b = -3; b <= 3; ++b) words.push_back(word_from_exponents({a, b}));
    const std::vector<Vector> points{vec({1.0, 0.2}), vec({2.5, -1.0})};
    CHECK(isometry_free(g, words, points));
    // Two generators of the same ratio differing by a rotation: a∘b⁻¹ is an isometry.
    const auto bad = cone_group({scaling(2.0), scaling(2.0, 1.0)});
    CHECK(!isometry_free(bad, {word_from_exponents({1, -1})}, points));
}

TEST_CASE("contracting words stay within K_x") {
    const auto one = cone_group({scaling(2.0)});
    const auto two = catalog::two_generator_group();
    const Vector x = vec({1.3, 0.4});
    CHECK(k_bound(one, x) == doctest::Approx(3.0 * one.displacement(x)));
    CHECK(k_bound(two, x) == doctest::Approx(4.0 * two.displacement(x)));
    // D_x for the two generators: max of d(x, 2x) = t and d(x, 3x ⋅ turn 1).
    CHECK(two.displacement(x) == doctest::Approx(std::max(1.3, cone_distance(2.0 * pi, x, vec({3.9, 1.4})))));
    CHECK_THROWS_AS(k_bound(cone_group({scaling(1.0)}), x), ArgumentError);

    std::mt19937_64 rng(5);
    std::size_t violations = 0;
    for (const auto& f : random_contracting_words(two, 200, 6, 7)) {
        const Vector p = random_cone_point(rng);
        const auto c = contraction_check(two, p, f);
        CHECK(c.measured == doctest::Approx(cone_distance(2.0 * pi, p, two.apply(f, p))));
        if (!c.holds()) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("word bound") {
    const auto one = cone_group({scaling(2.0)});
    const auto two = catalog::two_generator_group();
    const Vector x = vec({0.8, 1.0});
    CHECK(word_bound(two, x, {0, 0}) == doctest::Approx(two.displacement(x)));
    CHECK(word_bound(one, x, {3}) == doctest::Approx(15.0 * one.displacement(x)));
    CHECK_THROWS_AS(word_bound(two, x, {1, -1}), ArgumentError);

    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> e(0, 4);
    for (int k = 0; k < 100; ++k) {
        const std::vector<long> a{e(rng), e(rng)};
        const Vector p = random_cone_point(rng);
        CHECK(cone_distance(2.0 * pi, p, two.apply(word_from_exponents(a), p)) <= word_bound(two, p, a));
    }
}

TEST_CASE("Cauchy estimate for contracting orbits") {
    const auto cone = catalog::cone_over_circle(2.0 * pi);
    const Word f{{0, -1}};
    SUBCASE("m = n measures zero") {
        const auto c = cauchy_contraction(cone.group, vec({1.0, 0.0}), f, 3, 3);
        CHECK(c.measured == 0.0);
        CHECK(c.holds());
    }
    SUBCASE("radial worked example") {
        const auto c = cauchy_contraction(cone.group, vec({1.0, 0.0}), f, 2, 5);
        CHECK(c.measured == doctest::Approx(0.21875).epsilon(1e-15));
        CHECK(c.bound == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(c.holds());
    }
    SUBCASE("ratio 0.9 at m = 10") {
        const auto g = cone_group({scaling(1.0 / 0.9, 0.05)});
        std::mt19937_64 rng(13);
        for (int k = 0; k < 50; ++k) {
            const Vector p = random_cone_point(rng);
            for (int n = 11; n <= 20; ++n) {
                const auto c = cauchy_contraction(g, p, f, 10, n);
                CHECK(c.bound == doctest::Approx(g.distance(p, g.apply(f, p)) * std::pow(0.9, 10) / 0.1));
                CHECK(c.holds());
            }
        }
    }
    SUBCASE("non-contracting words are refused") {
        CHECK_THROWS_AS(cauchy_contraction(cone.group, vec({1.0, 0.0}), Word{{0, 1}}, 1, 2), ArgumentError);
    }
}

TEST_CASE("equivariant extension") {
    const auto cone = catalog::cone_over_circle(2.0 * pi);
    const auto omega = cone.fundamental_domain();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> logt(-20.0, 20.0);

    SUBCASE("constant one on Ω is the dyadic step function") {
        const auto psi = equivariant_extend(cone.group, omega, [](const Vector&) { return 1.0; });
        for (int k = 0; k < 100; ++k) {
            const Vector x = vec({std::exp2(logt(rng)), 0.3});
            CHECK(psi(x) == doctest::Approx(std::exp2(std::floor(std::log2(x[0])))).epsilon(1e-14));
            const double ratio = psi(x) / cone.model.delta(x);
            CHECK(ratio > 0.5);
            CHECK(ratio <= 1.0 + 1e-15);
        }
    }
    SUBCASE("δ restricted to Ω extends to δ") {
        const auto psi = equivariant_extend(cone.group, omega, cone.model.delta);
        for (int k = 0; k < 100; ++k) {
            const Vector x = vec({std::exp2(logt(rng)), 1.0});
            CHECK(psi(x) == doctest::Approx(x[0]).epsilon(1e-14));
        }
    }
    SUBCASE("weight one and quasi-linear with the constants read off Ω") {
        // values in [0.7, 1.9] on Ω where δ ∈ [1, 2): ratio to δ within [0.35, 1.9]
        auto values = [](const Vector& x) { return 1.3 + 0.6 * std::sin(5.0 * x[0] + x[1]); };
        const auto psi = equivariant_extend(cone.group, omega, values);
        for (int k = 0; k < 100; ++k) {
            const Vector x = vec({std::exp2(logt(rng)), 0.7});
            CHECK(psi(cone.group.apply({{0, 1}}, x)) == doctest::Approx(2.0 * psi(x)).epsilon(1e-14));
            const double ratio = psi(x) / x[0];
            CHECK(ratio >= 0.35);
            CHECK(ratio <= 1.9);
        }
    }
    SUBCASE("points beyond the word budget are a coverage error") {
        const auto psi = equivariant_extend(cone.group, omega, cone.model.delta, 64);
        CHECK_THROWS_AS(psi(vec({std::exp2(-100.0), 0.0})), CoverageError);
    }
}

TEST_CASE("small g-balls lie in g₀-balls") {
    // Cylinder metric ds² + dφ² with t = eˢ; flat cone g₀ = dt² + t²dφ².
    const auto cone = catalog::cone_over_circle(2.0 * pi);
    auto g_sphere = [](const Vector& x, double rho) {
        std::vector<Vector> out;
        for (int i = 0; i < 32; ++i) {
            const double a = 2.0 * pi * i / 32.0;
            out.push_back(vec({x[0] * std::exp(rho * std::cos(a)), x[1] + rho * std::sin(a)}));
        }
        return out;
    };
    auto d0 = [](const Vector& a, const Vector& b) { return cone_distance(2.0 * pi, a, b); };
    std::mt19937_64 rng(19);
    for (int k = 0; k < 20; ++k) {
        const Vector x = random_cone_point(rng);
        const double r = std::exp(std::uniform_real_distribution<double>(-4.0, 2.0)(rng));
        const auto b = ball_inclusion_check(x, r, cone.model, g_sphere, d0);
        CHECK(b.samples == 32);
        CHECK(b.holds());
    }
    CHECK(ball_inclusion_check(vec({1.0, 0.0}), 1e-12, cone.model, g_sphere, d0).r_tilde < 1e-11);
}

TEST_CASE("balls along a radial geodesic are disjoint for admissible (ρ, q)") {
    const auto cone = catalog::cone_over_circle(2.0 * pi);
    auto gamma = [](double t) { return vec({t, 0.0}); };
    auto d0 = [](const Vector& a, const Vector& b) { return cone_distance(2.0 * pi, a, b); };
    for (double rho : {0.1, 0.3, 0.6}) {
        const double q = 0.9 * disjointness_q_limit(cone.model, rho);
        CHECK(q == doctest::Approx(0.9 * (1.0 - rho) / (1.0 + rho)));
        CHECK(disjointness_scan(gamma, rho, q, 10, d0).disjoint());
    }
}

TEST_CASE("shooting distance bounds the closed form from above") {
    const double L = 5.0;
    const auto cone = charts::cone(charts::circle(L));
    for (const auto& [p, q] : std::vector<std::pair<Vector, Vector>>{
             {vec({1.0, 0.0}), vec({1.5, 0.8})}, {vec({2.0, 0.5}), vec({0.7, -0.3})}, {vec({1.0, 1.0}), vec({1.0, 2.0})}}) {
        const auto s = shooting_distance(cone, p, q);
        const double exact = catalog::development_distance(L, p, q);
        CHECK(s.residual < 1e-6);
        CHECK(s.distance >= exact - 1e-6);
        CHECK(s.distance == doctest::Approx(exact).epsilon(1e-4));
    }
}
