#include <doctest.h>

#include "helpers.hpp"
#include "weyllab/catalog.hpp"
#include "weyllab/charts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace weyllab;
using testing::vec;

namespace {

constexpr double pi = std::numbers::pi;

double rotation_angle(const Matrix& R) { return std::atan2(R(1, 0), R(0, 0)); }

Matrix rotation3(const Vector& axis, double angle) {
    return Eigen::AngleAxisd(angle, Eigen::Vector3d(axis).normalized()).toRotationMatrix();
}

}  // namespace

TEST_CASE("parallel transport") {
    SUBCASE("flat plane: identity along any path") {
        const auto w = WeylStructure::levi_civita(charts::flat(2));
        const Path p = Path::polyline({vec({0, 0}), vec({1, 2}), vec({-3, 1})}).then(
            Path::arc(vec({-3, 0}), vec({1, 0}), vec({0, 1}), 1.0, pi / 2, 2.5 * pi));
        CHECK((parallel_transport(w, p) - Matrix::Identity(2, 2)).norm() < 1e-10);
    }
    SUBCASE("sphere: the octant triangle rotates by its area π/2") {
        // Stereographic images of the great circles through (0,0,1), (1,0,0), (0,1,0).
        const auto w = WeylStructure::levi_civita(charts::sphere_stereographic());
        const Path tri = Path::polyline({vec({0, 0}), vec({1, 0})})
                             .then(Path::arc(vec({0, 0}), vec({1, 0}), vec({0, 1}), 1.0, 0.0, pi / 2))
                             .then(Path::polyline({vec({0, 1}), vec({0, 0})}));
        CHECK(std::abs(rotation_angle(holonomy_element(w, tri))) == doctest::Approx(pi / 2).epsilon(1e-8));
    }
    SUBCASE("cone over a circle of length L: once around the apex rotates by 2π − L") {
        for (double L : {2.0, 5.0, 2.0 * pi}) {
            const auto w = WeylStructure::levi_civita(charts::cone(charts::circle(L)));
            // (t, φ) and (t, φ + 2π) are the same point with the same coordinate frame.
            const Matrix P = parallel_transport(w, Path::polyline({vec({1.0, 0.0}), vec({1.0, 2.0 * pi})}));
            const Matrix F = orthonormal_frame(w, vec({1.0, 0.0}));
            const double angle = rotation_angle(F.inverse() * P * F);
            const double expect = std::remainder(2.0 * pi - L, 2.0 * pi);
            CHECK(std::abs(std::remainder(std::abs(angle) - std::abs(expect), 2.0 * pi)) < 1e-8);
        }
    }
    SUBCASE("entering the apex guard band is a singularity error") {
        const auto w = WeylStructure::levi_civita(charts::cone(charts::circle(5.0), 1e-3));
        CHECK_THROWS_AS(parallel_transport(w, Path::polyline({vec({1.0, 0.0}), vec({1e-4, 0.0})})), SingularityError);
    }
}

TEST_CASE("property: a path followed by its reversal transports trivially") {
    const auto cone = catalog::cone_over_ellipsoid(1.0, 1.3, 1.7);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 5; ++k) {
        const Vector a = testing::uniform(rng, vec({-1, 0.4, -3}), vec({1, 2.7, 3}));
        const Vector b = testing::uniform(rng, vec({-1, 0.4, -3}), vec({1, 2.7, 3}));
        const Path p = Path::polyline({a, b});
        CHECK((parallel_transport(cone.weyl, p.then(p.reversed())) - Matrix::Identity(3, 3)).norm() < 2e-9);
    }
}

TEST_CASE("property: concatenated loops compose") {
    const auto w = WeylStructure::levi_civita(charts::sphere_polar());
    const Vector base = vec({1.0, 0.0});
    const Path l1 = Path::polyline({base, vec({1.3, 0.2}), vec({1.1, 0.5}), base});
    const Path l2 = Path::polyline({base, vec({0.7, -0.3}), vec({0.8, 0.4}), base});
    const Matrix A = parallel_transport(w, l1), B = parallel_transport(w, l2);
    CHECK((parallel_transport(w, l1.then(l2)) - B * A).norm() < 1e-9);
}

TEST_CASE("property: holonomy of a small circuit scales with its area") {
    // On the unit sphere a geodesic-circle-like loop of coordinate radius r at
    // the equator encloses area ≈ πr², the rotation angle.
    const auto w = WeylStructure::levi_civita(charts::sphere_polar());
    const Vector c = vec({pi / 2, 0.0});
    double previous = 0.0;
    for (double r : {0.08, 0.04, 0.02}) {
        const Path loop = Path::arc(c, vec({1, 0}), vec({0, 1}), r, 0.0, 2.0 * pi);
        const double angle = std::abs(rotation_angle(holonomy_element(w, loop)));
        CHECK(angle == doctest::Approx(pi * r * r).epsilon(2e-3));
        if (previous > 0.0) CHECK(previous / angle == doctest::Approx(4.0).epsilon(1e-2));
        previous = angle;
    }
}

TEST_CASE("holonomy scans") {
    LoopFamily fam;
    SUBCASE("flat cone: every element is the identity") {
        const auto cone = catalog::cone_over_circle(2.0 * pi);
        const auto s = holonomy_scan(cone.weyl, vec({0.0, 0.3}), fam, 8);
        CHECK(s.elements.size() == 8);
        for (const auto& A : s.elements) CHECK((A - Matrix::Identity(2, 2)).norm() < 1e-4);
        const auto d = invariant_subspaces(s);
        CHECK(d.trivial);
        CHECK(d.label == HolonomyLabel::trivial);
    }
    SUBCASE("cone over the round sphere is flat ℝ³ minus a point") {
        const auto cone = catalog::cone_over_sphere();
        const auto s = holonomy_scan(cone.weyl, vec({0.0, 0.2, -0.4}), fam, 6);
        for (const auto& A : s.elements) CHECK((A - Matrix::Identity(3, 3)).norm() < 1e-4);
    }
    SUBCASE("product S² × ℝ: block diagonal, dims [2, 1]") {
        const auto w = WeylStructure::levi_civita(charts::product(charts::sphere_polar(), charts::flat(1)));
        const auto s = holonomy_scan(w, vec({1.2, 0.3, 0.0}), fam, 10, 4);
        CHECK(s.orthogonality_residual < 1e-5);
        for (const auto& A : s.elements) {
            CHECK(std::abs(A(2, 2) - 1.0) < 1e-8);
            CHECK(A.block(0, 2, 2, 1).norm() < 1e-8);
            CHECK(A.block(2, 0, 1, 2).norm() < 1e-8);
        }
        const auto d = invariant_subspaces(s);
        CHECK(d.dims == std::vector<int>{2, 1});
        CHECK(d.label == HolonomyLabel::reducible);
    }
    SUBCASE("cone over an ellipsoid: irreducible and curved") {
        const auto cone = catalog::cone_over_ellipsoid(1.0, 1.3, 1.7);
        const Vector base = vec({0.0, 1.2, 0.4});
        const auto s = holonomy_scan(cone.weyl, base, fam, 12, 7);
        CHECK(s.orthogonality_residual < 1e-5);
        const auto d = invariant_subspaces(s);
        CHECK(d.dims == std::vector<int>{3});
        CHECK(d.label == HolonomyLabel::irreducible_generic);
        CHECK(!flatness_certificate(cone.weyl, {base}).flat);
    }
    SUBCASE("results do not depend on the worker count") {
        const auto cone = catalog::cone_over_ellipsoid(1.0, 1.3, 1.7);
        const auto a = holonomy_scan(cone.weyl, vec({0.0, 1.2, 0.4}), fam, 6, 9, 1);
        const auto b = holonomy_scan(cone.weyl, vec({0.0, 1.2, 0.4}), fam, 6, 9, 3);
        for (std::size_t i = 0; i < a.elements.size(); ++i) CHECK(a.elements[i] == b.elements[i]);
    }
}

TEST_CASE("invariant subspaces of constructed samples") {
    std::mt19937_64 rng(11);
    auto random_block_sample = [&](int n) {
        std::vector<Matrix> out;
        for (int k = 0; k < n; ++k) {
            Matrix A = Matrix::Identity(3, 3);
            A.topLeftCorner(2, 2) = Eigen::Rotation2Dd(std::uniform_real_distribution<double>(0.1, 3.0)(rng)).toRotationMatrix();
            A(2, 2) = k % 2 == 0 ? 1.0 : -1.0;
            out.push_back(A);
        }
        return out;
    };
    SUBCASE("blocks 2 + 1 give dims [2, 1]") {
        const auto d = invariant_subspaces(random_block_sample(5));
        CHECK(d.dims == std::vector<int>{2, 1});
        CHECK(d.residual < 1e-10);
        // the 1-dimensional factor is the third axis
        CHECK(std::abs(std::abs(d.bases[1](2, 0)) - 1.0) < 1e-10);
    }
    SUBCASE("identity sample is trivial with a full flat factor") {
        const auto d = invariant_subspaces(std::vector<Matrix>(3, Matrix::Identity(3, 3)));
        CHECK(d.trivial);
        CHECK(d.dims == std::vector<int>{3});
    }
    SUBCASE("generic rotations are irreducible") {
        std::vector<Matrix> sample;
        for (int k = 0; k < 4; ++k) sample.push_back(rotation3(testing::gaussian(rng, 3), 0.7 + 0.3 * k));
        CHECK(invariant_subspaces(sample).dims == std::vector<int>{3});
    }
    SUBCASE("planar rotations preserve a complex structure") {
        std::vector<Matrix> sample;
        for (double a : {0.3, 1.1, 2.0}) sample.push_back(Eigen::Rotation2Dd(a).toRotationMatrix());
        const auto d = invariant_subspaces(sample);
        CHECK(d.label == HolonomyLabel::complex_candidate);
        REQUIRE(d.complex_structure);
        const Matrix& J = *d.complex_structure;
        CHECK((J * J + Matrix::Identity(2, 2)).norm() < 1e-8);
        for (const auto& A : sample) CHECK((A * J - J * A).norm() < 1e-8);
    }
    SUBCASE("property: shuffling the sample keeps the dims") {
        auto sample = random_block_sample(6);
        const auto dims = invariant_subspaces(sample).dims;
        for (int k = 0; k < 5; ++k) {
            std::shuffle(sample.begin(), sample.end(), rng);
            CHECK(invariant_subspaces(sample).dims == dims);
        }
    }
}

TEST_CASE("full holonomy of the flat cone around the apex") {
    const double L = 5.0;
    const auto cone = catalog::cone_over_circle(L);
    const DeckTransformation turn{"phi+2pi", [](const Vector& x) { return vec({x[0], x[1] + 2.0 * pi}); },
                                  [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); }};
    const Matrix A = full_holonomy_element(cone.weyl, Path::polyline({vec({0.2, 0.0}), vec({0.2, 2.0 * pi})}), turn);
    CHECK(std::abs(std::abs(rotation_angle(A)) - (2.0 * pi - L)) < 1e-8);
}

TEST_CASE("flatness certificate") {
    const auto flat_cone = catalog::cone_over_circle(5.0);
    std::vector<Vector> pts;
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) pts.push_back(testing::uniform(rng, vec({-2, -3}), vec({2, 3})));
    const auto c = flatness_certificate(flat_cone.weyl, pts);
    CHECK(c.flat);
    CHECK(c.max_norm < 1e-6);

    const auto sphere = WeylStructure::levi_civita(charts::sphere_polar());
    std::vector<Vector> sp{vec({0.5, 0.0}), vec({1.5, 1.0}), vec({2.5, -2.0})};
    const auto s = flatness_certificate(sphere, sp);
    CHECK(!s.flat);
    CHECK(s.max_norm == doctest::Approx(2.0).epsilon(1e-4));  // |R| = 2K on the unit sphere
}
