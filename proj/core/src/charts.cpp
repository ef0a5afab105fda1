#include "weyllab/charts.hpp"

#include <cmath>
#include <numbers>

namespace weyllab::charts {

namespace {

Christoffel zero_christoffel(int n) { return Christoffel(n); }

/// Re-express constraints of a factor acting on coordinates [offset, offset+dim).
std::vector<Constraint> lift(const std::vector<Constraint>& cs, int offset, int dim, const std::string& prefix) {
    std::vector<Constraint> out;
    for (const auto& c : cs) {
        Constraint l = c;
        l.name = prefix + c.name;
        auto m = c.margin;
        l.margin = [m, offset, dim](const Vector& x) { return m(x.segment(offset, dim)); };
        out.push_back(std::move(l));
    }
    return out;
}

}  // namespace

ChartMetric flat(int dim, std::vector<Constraint> constraints, std::string name) {
    ChartDefinition def;
    def.name = std::move(name);
    def.dim = dim;
    def.metric = [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); };
    def.christoffel = [dim](const Vector&) { return zero_christoffel(dim); };
    def.constraints = std::move(constraints);
    return ChartMetric(std::move(def));
}

ChartMetric circle(double length) {
    if (!(length > 0.0)) throw ArgumentError("circle length must be positive");
    const double c = length / (2.0 * std::numbers::pi);
    ChartDefinition def;
    def.name = "circle(L=" + std::to_string(length) + ")";
    def.dim = 1;
    def.metric = [c](const Vector&) -> Matrix { return Matrix::Constant(1, 1, c * c); };
    def.christoffel = [](const Vector&) { return zero_christoffel(1); };
    return ChartMetric(std::move(def));
}

ChartMetric sphere_stereographic(double radius) {
    // g = 4r² / (1+|u|²)² δ, conformally flat with factor e^{2f}, f = log(2r) − log(1+|u|²)
    ChartDefinition def;
    def.name = "sphere-stereo(r=" + std::to_string(radius) + ")";
    def.dim = 2;
    def.metric = [radius](const Vector& u) -> Matrix {
        const double w = 2.0 * radius / (1.0 + u.squaredNorm());
        return Matrix::Identity(2, 2) * (w * w);
    };
    def.christoffel = [](const Vector& u) {
        const double q = 1.0 + u.squaredNorm();
        const Eigen::Vector2d df(-2.0 * u[0] / q, -2.0 * u[1] / q);
        Christoffel G(2);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    G(k, i, j) = (k == i ? df[j] : 0.0) + (k == j ? df[i] : 0.0) - (i == j ? df[k] : 0.0);
        return G;
    };
    def.scale = [](const Vector& u) { return 1.0 + u.squaredNorm(); };
    return ChartMetric(std::move(def));
}

ChartMetric sphere_polar(double radius) {
    ChartDefinition def;
    def.name = "sphere-polar(r=" + std::to_string(radius) + ")";
    def.dim = 2;
    const double r2 = radius * radius;
    def.metric = [r2](const Vector& x) -> Matrix {
        Matrix g = Matrix::Zero(2, 2);
        g(0, 0) = r2;
        g(1, 1) = r2 * std::sin(x[0]) * std::sin(x[0]);
        return g;
    };
    def.christoffel = [](const Vector& x) {
        Christoffel G(2);
        const double s = std::sin(x[0]), c = std::cos(x[0]);
        G(0, 1, 1) = -s * c;
        G(1, 0, 1) = G(1, 1, 0) = c / s;
        return G;
    };
    def.constraints.push_back({"north-pole", LocusKind::chart_edge, [](const Vector& x) { return x[0]; }, 0.0, false});
    def.constraints.push_back(
        {"south-pole", LocusKind::chart_edge, [](const Vector& x) { return std::numbers::pi - x[0]; }, 0.0, false});
    return ChartMetric(std::move(def));
}

EmbeddedSurface ellipsoid(double a, double b, double c) {
    EmbeddedSurface s;
    s.name = "ellipsoid";
    s.immersion = [a, b, c](const Param2& u) -> Point3 {
        return {a * std::sin(u[0]) * std::cos(u[1]), b * std::sin(u[0]) * std::sin(u[1]), c * std::cos(u[0])};
    };
    s.jacobian = [a, b, c](const Param2& u) -> Jacobian32 {
        Jacobian32 J;
        const double st = std::sin(u[0]), ct = std::cos(u[0]), sp = std::sin(u[1]), cp = std::cos(u[1]);
        J << a * ct * cp, -a * st * sp, b * ct * sp, b * st * cp, -c * st, 0.0;
        return J;
    };
    s.atlas.push_back({"polar", Param2(0.0, -1e9), Param2(std::numbers::pi, 1e9)});
    s.symmetries.push_back({"z-reflection", [](const Point3& p) { return Point3(p[0], p[1], -p[2]); },
                            [](const Param2& u) { return Param2(std::numbers::pi - u[0], u[1]); }});
    s.symmetries.push_back({"y-reflection", [](const Point3& p) { return Point3(p[0], -p[1], p[2]); },
                            [](const Param2& u) { return Param2(u[0], -u[1]); }});
    return s;
}

EmbeddedSurface rotation_cone() {
    EmbeddedSurface s;
    s.name = "rotation-cone";
    const double r = 1.0 / std::numbers::sqrt2;
    s.immersion = [r](const Param2& u) -> Point3 {
        return {r * u[0] * std::cos(u[1]), r * u[0] * std::sin(u[1]), r * u[0]};
    };
    s.jacobian = [r](const Param2& u) -> Jacobian32 {
        Jacobian32 J;
        J << r * std::cos(u[1]), -r * u[0] * std::sin(u[1]), r * std::sin(u[1]), r * u[0] * std::cos(u[1]), r, 0.0;
        return J;
    };
    s.atlas.push_back({"generator-azimuth", Param2(0.0, -1e9), Param2(1e9, 1e9)});
    s.symmetries.push_back({"Sx", [](const Point3& p) { return Point3(-p[0], p[1], p[2]); },
                            [](const Param2& u) { return Param2(u[0], std::numbers::pi - u[1]); }});
    s.symmetries.push_back({"Sy", [](const Point3& p) { return Point3(p[0], -p[1], p[2]); },
                            [](const Param2& u) { return Param2(u[0], -u[1]); }});
    s.singular.push_back({"apex", LocusKind::apex, [](const Vector& x) { return x[0]; }, 1e-6, true});
    return s;
}

Warp linear_warp() {
    return {"linear", [](double r) { return r; }, [](double) { return 1.0; }, 0.0};
}

Warp exponential_warp() {
    return {"exp", [](double r) { return std::exp(r); }, [](double r) { return std::exp(r); }};
}

Warp constant_warp(double c) {
    return {"const", [c](double) { return c; }, [](double) { return 0.0; }};
}

ChartMetric warped(const ChartMetric& fiber, const Warp& warp, double apex_guard) {
    const int m = fiber.dim();
    const int n = m + 1;
    ChartDefinition def;
    def.name = "warped[" + warp.name + "](" + fiber.name() + ")";
    def.dim = n;
    auto f = warp.f;
    auto df = warp.df;
    def.metric = [fiber, f, n, m](const Vector& x) -> Matrix {
        Matrix g = Matrix::Zero(n, n);
        g(0, 0) = 1.0;
        const double fr = f(x[0]);
        g.bottomRightCorner(m, m) = fr * fr * fiber.metric(x.tail(m));
        return g;
    };
    if (fiber.has_analytic_christoffel()) {
        def.christoffel = [fiber, f, df, n, m](const Vector& x) {
            Christoffel G(n);
            const double fr = f(x[0]), dfr = df(x[0]);
            const Vector y = x.tail(m);
            const Matrix h = fiber.metric(y);
            const Christoffel Gf = fiber.analytic_christoffel(y);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) G(0, a + 1, b + 1) = -fr * dfr * h(a, b);
            for (int a = 0; a < m; ++a) {
                G(a + 1, 0, a + 1) = dfr / fr;
                G(a + 1, a + 1, 0) = dfr / fr;
            }
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    for (int c = 0; c < m; ++c) G(a + 1, b + 1, c + 1) = Gf(a, b, c);
            return G;
        };
    }
    if (std::isfinite(warp.r_min)) {
        const double r0 = warp.r_min;
        def.constraints.push_back({"apex", LocusKind::apex, [r0](const Vector& x) { return x[0] - r0; }, apex_guard, true});
        def.scale = [r0, fiber, m](const Vector& x) { return std::min(x[0] - r0, fiber.scale(x.tail(m))); };
    } else {
        def.scale = [fiber, m](const Vector& x) { return fiber.scale(x.tail(m)); };
    }
    for (auto& c : lift(fiber.constraints(), 1, m, "base.")) def.constraints.push_back(std::move(c));
    return ChartMetric(std::move(def));
}

ChartMetric cone(const ChartMetric& base, double apex_guard) {
    ChartMetric c = warped(base, linear_warp(), apex_guard);
    ChartDefinition def = c.definition();
    def.name = "cone(" + base.name() + ")";
    return ChartMetric(std::move(def));
}

ChartMetric product(const ChartMetric& a, const ChartMetric& b) {
    const int na = a.dim(), nb = b.dim(), n = na + nb;
    ChartDefinition def;
    def.name = a.name() + "x" + b.name();
    def.dim = n;
    def.metric = [a, b, na, nb, n](const Vector& x) -> Matrix {
        Matrix g = Matrix::Zero(n, n);
        g.topLeftCorner(na, na) = a.metric(x.head(na));
        g.bottomRightCorner(nb, nb) = b.metric(x.tail(nb));
        return g;
    };
    if (a.has_analytic_christoffel() && b.has_analytic_christoffel()) {
        def.christoffel = [a, b, na, nb, n](const Vector& x) {
            Christoffel G(n);
            const Christoffel Ga = a.analytic_christoffel(x.head(na));
            const Christoffel Gb = b.analytic_christoffel(x.tail(nb));
            for (int k = 0; k < na; ++k)
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j) G(k, i, j) = Ga(k, i, j);
            for (int k = 0; k < nb; ++k)
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) G(na + k, na + i, na + j) = Gb(k, i, j);
            return G;
        };
    }
    def.scale = [a, b, na, nb](const Vector& x) { return std::min(a.scale(x.head(na)), b.scale(x.tail(nb))); };
    def.constraints = lift(a.constraints(), 0, na, "A.");
    for (auto& c : lift(b.constraints(), na, nb, "B.")) def.constraints.push_back(std::move(c));
    return ChartMetric(std::move(def));
}

ChartMetric cylinder(const ChartMetric& base) {
    ChartMetric p = product(flat(1, {}, "line"), base);
    ChartDefinition def = p.definition();
    def.name = "cylinder(" + base.name() + ")";
    return ChartMetric(std::move(def));
}

}  // namespace weyllab::charts
