#include "weyllab/catalog.hpp"

#include "weyllab/charts.hpp"

#include <cmath>
#include <numbers>

namespace weyllab::catalog {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Points at which a base chart is probed for positive-definiteness.
void require_positive_definite(const ChartMetric& base) {
    const int n = base.dim();
    std::vector<Vector> probes{Vector::Zero(n), Vector::Constant(n, 0.5)};
    Vector polar = Vector::Zero(n);
    polar[0] = std::numbers::pi / 2.0;
    probes.push_back(polar);
    bool probed = false;
    for (const auto& x : probes) {
        if (!base.contains(x)) continue;
        probed = true;
        if (!(min_eigenvalue(base.metric(x)) > 0.0))
            throw ArgumentError("base metric '" + base.name() + "' is not positive definite");
    }
    if (!probed) throw ArgumentError("could not find a point of the base chart '" + base.name() + "' to probe");
}

double wrapped_angle(double a) {
    double w = std::fmod(std::abs(a), two_pi);
    return std::min(w, two_pi - w);
}

}  // namespace

Vector Cone::to_cone(const Vector& cyl) const {
    Vector c = cyl;
    c[0] = std::exp(cyl[0]);
    return c;
}

Vector Cone::to_cylinder(const Vector& c) const {
    if (!(c[0] > 0.0)) throw ArgumentError("cone point with t <= 0");
    Vector s = c;
    s[0] = std::log(c[0]);
    return s;
}

FundamentalDomain Cone::fundamental_domain() const {
    const double hi = 1.0 / k;
    return {[hi](const Vector& x) { return x[0] >= 1.0 && x[0] < hi; }, [](const Vector& x) { return std::log(x[0]); },
            0.0, std::log(hi)};
}

Cone build_cone(const ChartMetric& base, double k, BaseDistance base_distance, double apex_guard) {
    if (!(k > 0.0 && k < 1.0)) throw ArgumentError("cone scaling k must lie in (0, 1)");
    require_positive_definite(base);
    Cone c;
    c.k = k;
    c.cone = charts::cone(base, apex_guard);
    c.cylinder = charts::cylinder(base);
    c.weyl = WeylStructure(c.cylinder, coordinate_lee_form(c.cylinder.dim(), 0));
    c.exact = WeylStructure::levi_civita(c.cone);

    Generator expand{"eta^-1", 1.0 / k,
                     [k](const Vector& x) {
                         Vector y = x;
                         y[0] /= k;
                         return y;
                     },
                     [k](const Vector& x) {
                         Vector y = x;
                         y[0] *= k;
                         return y;
                     }};
    if (base_distance) {
        DistanceFn d = [base_distance](const Vector& p, const Vector& q) {
            const double a = std::min(base_distance(p.tail(p.size() - 1), q.tail(q.size() - 1)), std::numbers::pi);
            return std::sqrt(std::max(0.0, p[0] * p[0] + q[0] * q[0] - 2.0 * p[0] * q[0] * std::cos(a)));
        };
        c.group = HomothetyGroup({expand}, d, "closed-form");
    } else {
        const ChartMetric metric = c.cone;
        DistanceFn d = [metric](const Vector& p, const Vector& q) {
            return shooting_distance(metric, p, q).distance;
        };
        c.group = HomothetyGroup({expand}, d, "shooting-upper-bound");
    }

    c.model.omega = "t = 0";
    c.model.delta = [](const Vector& x) { return x[0]; };
    c.model.kappa = 1.0;
    c.model.sigma = [](const Vector& x) { return 0.5 * x[0]; };
    c.model.k1 = 1.0;
    c.model.k2 = 1.0;
    c.model.phi = [](const Vector& x) { return x[0]; };
    return c;
}

Cone cone_over_circle(double length, double k) {
    const double c = length / two_pi;
    return build_cone(charts::circle(length), k,
                      [c](const Vector& a, const Vector& b) { return c * wrapped_angle(a[0] - b[0]); });
}

namespace {

Eigen::Vector3d stereographic_point(const Vector& u) {
    const double q = u.squaredNorm();
    return Eigen::Vector3d(2.0 * u[0], 2.0 * u[1], 1.0 - q) / (1.0 + q);
}

}  // namespace

Cone cone_over_sphere(double k) {
    return build_cone(charts::sphere_stereographic(1.0), k, [](const Vector& a, const Vector& b) {
        const double d = stereographic_point(a).dot(stereographic_point(b));
        return std::acos(std::clamp(d, -1.0, 1.0));
    });
}

Cone cone_over_ellipsoid(double a, double b, double c, double k) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw ArgumentError("ellipsoid semi-axes must be positive");
    return build_cone(induced_chart(charts::ellipsoid(a, b, c)), k);
}

double development_distance(double length, const Vector& p, const Vector& q) {
    const double c = length / two_pi;
    double delta = std::fmod(std::abs(c * (p[1] - q[1])), length);
    delta = std::min(delta, length - delta);
    if (delta >= std::numbers::pi) return p[0] + q[0];
    return std::sqrt(std::max(0.0, p[0] * p[0] + q[0] * q[0] - 2.0 * p[0] * q[0] * std::cos(delta)));
}

Eigen::Vector2d develop(double length, const Vector& p) {
    const double a = p[1] * length / two_pi;
    return {p[0] * std::cos(a), p[0] * std::sin(a)};
}

HomothetyGroup two_generator_group(double length) {
    Generator h1{"h1", 2.0, [](const Vector& x) { return Vector{{2.0 * x[0], x[1]}}; },
                 [](const Vector& x) { return Vector{{0.5 * x[0], x[1]}}; }};
    Generator h2{"h2", 3.0, [](const Vector& x) { return Vector{{3.0 * x[0], x[1] + 1.0}}; },
                 [](const Vector& x) { return Vector{{x[0] / 3.0, x[1] - 1.0}}; }};
    return HomothetyGroup({h1, h2}, [length](const Vector& p, const Vector& q) {
        return development_distance(length, p, q);
    });
}

ChartMetric build_strip_S(double puncture_guard) {
    std::vector<Constraint> cs;
    cs.push_back({"x>1", LocusKind::boundary, [](const Vector& x) { return x[0] - 1.0; }, 0.0, false});
    cs.push_back({"x^2y^2<1", LocusKind::boundary,
                  [](const Vector& x) { return 1.0 - x[0] * x[0] * x[1] * x[1]; }, 0.0, false});
    cs.push_back({"punctures(n,0),n>=4", LocusKind::puncture,
                  [](const Vector& x) {
                      const double n = std::max(4.0, std::round(x[0]));
                      return std::hypot(x[0] - n, x[1]);
                  },
                  puncture_guard, true});
    return charts::flat(2, std::move(cs), "strip-s");
}

ChartMetric build_cylinder_Z(double a, double b) {
    if (!(a < b)) throw ArgumentError("cylinder needs a < b");
    std::vector<Constraint> cs;
    cs.push_back({"y>a", LocusKind::boundary, [a](const Vector& x) { return x[1] - a; }, 0.0, false});
    cs.push_back({"y<b", LocusKind::boundary, [b](const Vector& x) { return b - x[1]; }, 0.0, false});
    return charts::flat(2, std::move(cs), "cylinder-z");
}

ChartMetric build_punctured_torus(const Eigen::Vector2d& puncture, double guard) {
    std::vector<Constraint> cs;
    cs.push_back({"puncture", LocusKind::puncture,
                  [puncture](const Vector& x) {
                      const double dx = x[0] - puncture[0], dy = x[1] - puncture[1];
                      return std::hypot(dx - std::round(dx), dy - std::round(dy));
                  },
                  guard, true});
    return charts::flat(2, std::move(cs), "punctured-torus");
}

namespace {

Matrix numerical_jacobian(const PointMap& f, const Vector& x, double h = 1e-6) {
    const Vector fx = f(x);
    Matrix J(fx.size(), x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        Vector xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        J.col(a) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

// Newton inversion of a local diffeomorphism, started at x itself.
Vector invert(const PointMap& f, const Vector& y) {
    Vector x = y;
    for (int it = 0; it < 50; ++it) {
        const Vector r = f(x) - y;
        if (r.norm() < 1e-13 * std::max(1.0, y.norm())) return x;
        x -= numerical_jacobian(f, x).partialPivLu().solve(r);
    }
    throw ArgumentError("could not invert the isometry");
}

}  // namespace

MappingTorus build_mapping_torus(const ChartMetric& base, PointMap isometry, double rho,
                                 const std::vector<Vector>& samples, double tol) {
    if (!(rho > 1.0)) throw ArgumentError("mapping torus needs a ratio above 1");
    if (!isometry) throw ArgumentError("mapping torus needs an isometry");
    if (samples.empty()) throw ArgumentError("mapping torus needs sample points to verify the isometry");
    MappingTorus m;
    m.base = base;
    m.isometry = isometry;
    m.rho = rho;
    for (const auto& x : samples) {
        const Matrix J = numerical_jacobian(isometry, x);
        const Matrix g = metric_at(base, x);
        const Matrix pulled = J.transpose() * metric_at(base, isometry(x)) * J;
        m.isometry_residual = std::max(m.isometry_residual, (pulled - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
    }
    if (m.isometry_residual > tol)
        throw ArgumentError("map is not an isometry of the base (residual " + std::to_string(m.isometry_residual) + ")");

    m.cone = build_cone(base, 1.0 / rho);
    const int n = base.dim();
    auto on_base = [isometry, n](const Vector& x) -> Vector { return isometry(x.tail(n)); };
    Generator gen{"mapping-torus", rho,
                  [rho, on_base](const Vector& x) {
                      Vector y(x.size());
                      y << rho * x[0], on_base(x);
                      return y;
                  },
                  [rho, isometry, n](const Vector& x) {
                      Vector y(x.size());
                      y << x[0] / rho, invert(isometry, x.tail(n));
                      return y;
                  }};
    m.cone.group = HomothetyGroup({gen}, m.cone.group.distance_fn(), m.cone.group.distance_tag());
    const double shift = std::log(rho);
    m.deck.name = "mapping-torus";
    m.deck.map = [shift, on_base](const Vector& x) {
        Vector y(x.size());
        y << x[0] + shift, on_base(x);
        return y;
    };
    m.deck.jacobian = [isometry, n](const Vector& x) {
        Matrix J = Matrix::Zero(n + 1, n + 1);
        J(0, 0) = 1.0;
        J.bottomRightCorner(n, n) = numerical_jacobian(isometry, Vector(x.tail(n)));
        return J;
    };
    return m;
}

}  // namespace weyllab::catalog
