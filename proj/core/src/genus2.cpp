#include "weyllab/catalog.hpp"

#include "weyllab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace weyllab::catalog {

namespace {

constexpr double sqrt1_2 = 0.70710678118654752440;
constexpr double tube_height = 1.5;

// S(u) = u⁶ − 3u⁵ + 5u⁴/2, the antiderivative of the quintic smoothstep.
double S(double u) { return u * u * u * u * (u * u - 3.0 * u + 2.5); }
double S1(double u) { return u * u * u * (6.0 * u * u - 15.0 * u + 10.0); }
double S2(double u) { return 30.0 * u * u * (u - 1.0) * (u - 1.0); }

// Copy index m with 2ᵐ ≤ z < 2ᵐ⁺¹.
int copy_index(double z) { return static_cast<int>(std::floor(std::log2(z))); }

}  // namespace

Genus2Surface::Genus2Surface(Genus2Profile profile) : profile_(profile) {
    const double r0 = profile.tube_radius, k = profile.blend;
    if (!(r0 > 0.0) || !(k > 0.0)) throw ConstructionError("tube radius and blend width must be positive");
    if (!(r0 + k < std::sqrt(1.0 / 8.0)))
        throw ConstructionError("tube radius + blend width must stay below sqrt(1/8) so that only the part "
                                "inside the cylinder y^2 + (z - 3/2)^2 <= 1/8 changes");
}

double Genus2Surface::cone_level(const Point3& p) { return (p.z() - std::hypot(p.x(), p.y())) * sqrt1_2; }

double Genus2Surface::F0(const Point3& p, Point3* grad, Eigen::Matrix3d* hess) const {
    const double r0 = profile_.tube_radius, k = profile_.blend;
    const double r = std::hypot(p.x(), p.y());
    const double a = (p.z() - r) * sqrt1_2;
    const double dz = p.z() - tube_height;
    const double rho = std::hypot(p.y(), dz);
    const double b = rho - r0;
    const double d = a - b;

    auto cone_derivatives = [&](Point3& ga, Eigen::Matrix3d& Ha) {
        ga = Point3(-p.x() / r, -p.y() / r, 1.0) * sqrt1_2;
        Ha.setZero();
        const Eigen::Vector2d q(p.x(), p.y());
        Ha.topLeftCorner<2, 2>() = -sqrt1_2 * (Eigen::Matrix2d::Identity() - q * q.transpose() / (r * r)) / r;
    };
    auto tube_derivatives = [&](Point3& gb, Eigen::Matrix3d& Hb) {
        gb = Point3(0.0, p.y() / rho, dz / rho);
        Hb.setZero();
        const Eigen::Vector2d q(p.y(), dz);
        Hb.bottomRightCorner<2, 2>() = (Eigen::Matrix2d::Identity() - q * q.transpose() / (rho * rho)) / rho;
    };

    if (d <= -k) {
        if (grad || hess) {
            Point3 ga;
            Eigen::Matrix3d Ha;
            cone_derivatives(ga, Ha);
            if (grad) *grad = ga;
            if (hess) *hess = Ha;
        }
        return a;
    }
    if (d >= k) {
        if (grad || hess) {
            Point3 gb;
            Eigen::Matrix3d Hb;
            tube_derivatives(gb, Hb);
            if (grad) *grad = gb;
            if (hess) *hess = Hb;
        }
        return b;
    }
    // Smooth minimum (a + b − σ(a − b))/2 with σ(d) = 4k S((d + k)/2k) − d, a C³ stand-in for |d|.
    const double u = (d + k) / (2.0 * k);
    const double sigma = 4.0 * k * S(u) - d;
    if (grad || hess) {
        Point3 ga, gb;
        Eigen::Matrix3d Ha, Hb;
        cone_derivatives(ga, Ha);
        tube_derivatives(gb, Hb);
        const double s1 = 2.0 * S1(u) - 1.0;
        const double s2 = S2(u) / k;
        const Point3 gd = ga - gb;
        if (grad) *grad = 0.5 * (ga + gb - s1 * gd);
        if (hess) *hess = 0.5 * (Ha + Hb - s2 * gd * gd.transpose() - s1 * (Ha - Hb));
    }
    return 0.5 * (a + b - sigma);
}

double Genus2Surface::eval(const Point3& p, Point3* grad, Eigen::Matrix3d* hess) const {
    if (!(p.z() > 0.0)) {
        // Below the apex only the cone matters; the surface lives in z > 0.
        const double r = std::hypot(p.x(), p.y());
        if (grad) *grad = Point3(-p.x() / r, -p.y() / r, 1.0) * sqrt1_2;
        if (hess) hess->setZero();
        return cone_level(p);
    }
    const int m = copy_index(p.z());
    const double scale = std::ldexp(1.0, m);
    const double value = F0(p / scale, grad, hess);
    if (hess) *hess /= scale;
    return scale * value;
}

double Genus2Surface::level(const Point3& p) const { return eval(p, nullptr, nullptr); }

Point3 Genus2Surface::gradient(const Point3& p) const {
    Point3 g;
    eval(p, &g, nullptr);
    return g;
}

Eigen::Matrix3d Genus2Surface::hessian(const Point3& p) const {
    Eigen::Matrix3d H;
    eval(p, nullptr, &H);
    return H;
}

bool Genus2Surface::modified(const Point3& p) const {
    if (!(p.z() > 0.0)) return false;
    const double scale = std::ldexp(1.0, copy_index(p.z()));
    const Point3 q = p / scale;
    const double a = cone_level(q);
    const double b = std::hypot(q.y(), q.z() - tube_height) - profile_.tube_radius;
    return a - b > -profile_.blend;
}

Point3 Genus2Surface::project(const Point3& p, double tol) const {
    Point3 q = p;
    for (int it = 0; it < 60; ++it) {
        Point3 g;
        const double f = eval(q, &g, nullptr);
        const double g2 = g.squaredNorm();
        if (std::abs(f) <= tol * std::max(1.0, q.norm()) * std::sqrt(g2)) return q;
        q -= f * g / g2;
    }
    throw ConstructionError("projection onto the surface did not converge");
}

Point3 Genus2Surface::P(int n) const {
    return {0.0, 0.0, std::ldexp(tube_height + profile_.tube_radius, n)};
}

Point3 Genus2Surface::Q(int n) const {
    return {0.0, 0.0, std::ldexp(tube_height - profile_.tube_radius, n)};
}

Point3 Genus2Surface::k_circle(int n, double angle) const {
    const double s = std::ldexp(1.0, n);
    return {0.0, s * profile_.tube_radius * std::sin(angle), s * (tube_height + profile_.tube_radius * std::cos(angle))};
}

Point3 Genus2Surface::c_half_line(int sign, double t) { return {0.0, sign >= 0 ? t : -t, t}; }

namespace {

struct TangentFrame {
    Point3 e1, e2, n;
};

TangentFrame tangent_frame(const Point3& normal) {
    TangentFrame f;
    f.n = normal.normalized();
    const Point3 seed = std::abs(f.n.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
    f.e1 = (seed - seed.dot(f.n) * f.n).normalized();
    f.e2 = f.n.cross(f.e1);
    return f;
}

}  // namespace

Point3 Genus2Surface::local_chart_point(const Point3& p0, const Vector& uv) const {
    const TangentFrame f = tangent_frame(gradient(p0));
    const Point3 base = p0 + uv[0] * f.e1 + uv[1] * f.e2;
    double h = 0.0;
    for (int it = 0; it < 60; ++it) {
        Point3 g;
        const double v = eval(base + h * f.n, &g, nullptr);
        const double slope = g.dot(f.n);
        if (std::abs(slope) < 1e-12) break;
        const double step = v / slope;
        h -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, p0.norm())) return base + h * f.n;
    }
    throw DomainError("monge-patch", "the surface is not a graph over the tangent plane here");
}

ChartMetric Genus2Surface::local_chart(const Point3& p0) const {
    const Genus2Surface self = *this;
    const TangentFrame f = tangent_frame(gradient(p0));
    const double size = p0.norm();
    ChartDefinition def;
    def.name = "genus2-monge";
    def.dim = 2;
    def.metric = [self, p0, f](const Vector& uv) -> Matrix {
        const Point3 p = self.local_chart_point(p0, uv);
        const Point3 g = self.gradient(p);
        const double gn = g.dot(f.n);
        const Eigen::Vector2d dh(-g.dot(f.e1) / gn, -g.dot(f.e2) / gn);
        return Matrix::Identity(2, 2) + dh * dh.transpose();
    };
    def.scale = [self, p0](const Vector& uv) {
        try {
            return 0.05 * self.local_chart_point(p0, uv).norm();
        } catch (const DomainError&) {
            return 0.05 * p0.norm();
        }
    };
    def.constraints.push_back({"graph", LocusKind::chart_edge,
                               [self, p0, f](const Vector& uv) {
                                   try {
                                       const Point3 g = self.gradient(self.local_chart_point(p0, uv));
                                       return std::abs(g.dot(f.n)) / g.norm() - 0.3;
                                   } catch (const DomainError&) {
                                       return -1.0;
                                   }
                               },
                               0.0, false});
    def.constraints.push_back({"apex", LocusKind::apex,
                               [self, p0](const Vector& uv) {
                                   try {
                                       return self.local_chart_point(p0, uv).norm();
                                   } catch (const DomainError&) {
                                       return -1.0;
                                   }
                               },
                               1e-6 * size, true});
    return ChartMetric(std::move(def));
}

ChartMetric Genus2Surface::cone_chart() const {
    const Genus2Surface self = *this;
    ChartDefinition def;
    def.name = "genus2-cone";
    def.dim = 2;
    def.metric = [](const Vector& x) -> Matrix {
        Matrix g = Matrix::Identity(2, 2);
        g(1, 1) = 0.5 * x[0] * x[0];
        return g;
    };
    def.scale = [](const Vector& x) { return x[0]; };
    def.constraints.push_back({"apex", LocusKind::apex, [](const Vector& x) { return x[0]; }, 1e-6, true});
    def.constraints.push_back({"unmodified", LocusKind::chart_edge,
                               [self](const Vector& x) {
                                   const Point3 p(x[0] * sqrt1_2 * std::cos(x[1]), x[0] * sqrt1_2 * std::sin(x[1]),
                                                  x[0] * sqrt1_2);
                                   const double scale = std::ldexp(1.0, copy_index(p.z()));
                                   const Point3 q = p / scale;
                                   const double b = std::hypot(q.y(), q.z() - tube_height) - self.profile().tube_radius;
                                   return b - cone_level(q) - self.profile().blend;
                               },
                               0.0, false});
    return ChartMetric(std::move(def));
}

std::vector<Point3> Genus2Surface::sample(std::size_t count, std::uint64_t seed, bool modified_only) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point3> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 200 * count + 1000) throw ConstructionError("could not draw surface samples");
        Point3 guess;
        if (modified_only || unit(rng) < 0.5) {
            // Near the tunnel and its fillets.
            const double x = -1.9 + 3.8 * unit(rng);
            const double psi = 2.0 * std::numbers::pi * unit(rng);
            const double rad = profile_.tube_radius + profile_.blend * unit(rng);
            guess = Point3(x, rad * std::sin(psi), tube_height + rad * std::cos(psi));
        } else {
            const double z = 1.0 + unit(rng);
            const double phi = 2.0 * std::numbers::pi * unit(rng);
            guess = Point3(z * std::cos(phi), z * std::sin(phi), z);
        }
        Point3 p;
        try {
            p = project(guess);
        } catch (const ConstructionError&) {
            continue;
        }
        if (!(p.z() >= 1.0 && p.z() < 2.0)) continue;
        if ((p - guess).norm() > 0.5) continue;
        if (modified_only && !modified(p)) continue;
        out.push_back(p);
    }
    return out;
}

SymmetryReport genus2_symmetry_report(const Genus2Surface& s, std::size_t samples, std::uint64_t seed) {
    SymmetryReport rep;
    const auto pts = s.sample(samples, seed);
    rep.samples = pts.size();
    auto off_surface = [&](const Point3& q) { return std::abs(s.level(q)) / s.gradient(q).norm(); };
    for (const auto& p : pts) {
        rep.sx = std::max(rep.sx, off_surface(Genus2Surface::sx(p)));
        rep.sy = std::max(rep.sy, off_surface(Genus2Surface::sy(p)));
        const Point3 hp = Genus2Surface::homothety(p);
        rep.homothety = std::max(rep.homothety, off_surface(hp) / hp.norm());
        if (!s.modified(p))
            rep.cone_agreement = std::max(rep.cone_agreement, std::abs(s.level(p) - Genus2Surface::cone_level(p)));
        const ChartMetric c1 = s.local_chart(p), c2 = s.local_chart(hp);
        const Vector uv{{0.01, -0.02}};
        if (c1.contains(uv) && c2.contains(2.0 * uv)) {
            const Matrix g1 = c1.metric(uv), g2 = c2.metric(2.0 * uv);
            rep.homothety_metric = std::max(rep.homothety_metric, (g1 - g2).norm() / g1.norm());
        }
    }
    return rep;
}

Genus2 build_genus2(Genus2Profile profile) {
    Genus2 out{Genus2Surface(profile), {}, {}};
    out.weyl = WeylStructure::levi_civita(out.surface.local_chart(out.surface.P(0)));
    Generator h{"X->2X", 2.0, [](const Vector& x) -> Vector { return 2.0 * x; },
                [](const Vector& x) -> Vector { return 0.5 * x; }};
    out.group = HomothetyGroup({h}, [](const Vector& a, const Vector& b) { return (a - b).norm(); },
                               "ambient-lower-bound");
    return out;
}

// ---------------------------------------------------------------------------
// Geodesics in ambient coordinates

std::string to_string(SurfaceTermination t) {
    switch (t) {
        case SurfaceTermination::reached_apex: return "reached-apex";
        case SurfaceTermination::escaped: return "escaped";
        case SurfaceTermination::horizon: return "horizon";
        case SurfaceTermination::step_failure: return "step-failure";
    }
    return "unknown";
}

SurfaceTrajectory surface_geodesic(const Genus2Surface& s, const Point3& p0, const Point3& v0, double t_max,
                                   const SurfaceGeodesicOptions& opt) {
    if (!(t_max > 0.0)) throw ArgumentError("horizon must be positive");
    const double size = p0.norm();
    if (!(size > 0.0)) throw ArgumentError("start point is the apex");
    const Point3 g0 = s.gradient(p0);
    if (std::abs(s.level(p0)) > 1e-9 * size * g0.norm()) throw ArgumentError("start point is not on the surface");
    // Unit speed, tangent to the surface.
    Point3 v = v0 - v0.dot(g0) / g0.squaredNorm() * g0;
    if (!(v.norm() > 0.0)) throw ArgumentError("initial velocity is normal to the surface");
    v.normalize();

    const double alpha0 = opt.stabilization;
    ode::Rhs rhs = [&s, alpha0](double, const Vector& y, Vector& dy) {
        const Point3 p = y.head<3>(), u = y.tail<3>();
        Point3 g;
        Eigen::Matrix3d H;
        const double f = s.evaluate(p, &g, &H);
        const double alpha = alpha0 * u.norm() / p.norm();
        const double lambda = u.dot(H * u) + 2.0 * alpha * g.dot(u) + alpha * alpha * f;
        dy.head<3>() = u;
        dy.tail<3>() = -lambda * g / g.squaredNorm();
    };

    const double floor = opt.depth_floor * size, escape = opt.escape * size;
    std::vector<ode::Event> events{
        {"apex", [floor](double, const Vector& y) { return y.head<3>().norm() - floor; }},
        {"escape", [escape](double, const Vector& y) { return escape - y.head<3>().norm(); }},
    };
    ode::StepLimit limit = [](double, const Vector& y) { return 0.25 * y.head<3>().norm() / y.tail<3>().norm(); };

    ode::Options o;
    o.rtol = opt.tol;
    o.atol = opt.tol * size;
    o.max_steps = opt.max_steps;
    o.store_dense = true;
    Vector y0(6);
    y0 << p0, v;
    ode::Result r = ode::dopri5(rhs, 0.0, y0, t_max, o, events, limit);

    SurfaceTrajectory traj;
    traj.t = r.ts;
    traj.t_end = r.t;
    for (const auto& y : r.ys) {
        const Point3 p = y.head<3>();
        traj.p.push_back(p);
        traj.v.push_back(y.tail<3>());
        traj.min_depth = std::min(traj.min_depth, p.norm());
        traj.drift = std::max(traj.drift, std::abs(s.level(p)) / s.gradient(p).norm());
    }

    // First crossings of |p| = |p₀|·2⁻ʲ, located on the dense output.
    auto depth = [&](double t) { return Vector(r.dense(t)).head<3>().norm(); };
    int j = 1;
    for (std::size_t i = 1; i < traj.t.size(); ++i) {
        while (traj.p[i].norm() < std::ldexp(size, -j)) {
            const double target = std::ldexp(size, -j);
            double lo = traj.t[i - 1], hi = traj.t[i];
            if (traj.p[i - 1].norm() < target) lo = hi;  // already below at the previous step
            for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (depth(mid) < target ? hi : lo) = mid;
            }
            traj.level_times.push_back(hi);
            ++j;
        }
    }

    switch (r.status) {
        case ode::Status::reached_end: traj.termination = SurfaceTermination::horizon; break;
        case ode::Status::step_failure:
        case ode::Status::max_steps:
            traj.termination = SurfaceTermination::step_failure;
            traj.detail = r.status == ode::Status::max_steps ? "step budget exhausted" : r.failure;
            break;
        case ode::Status::event:
            if (r.event_index == 0) {
                traj.termination = SurfaceTermination::reached_apex;
                traj.detail = "apex";
                const Point3 p = r.y.head<3>(), u = r.y.tail<3>();
                const double rate = p.dot(u) / p.norm();  // d|p|/dt
                traj.lifetime = rate < 0.0 ? r.t + p.norm() / (-rate) : r.t;
                // Self-similar descents: Aitken on the last three level-crossing times.
                const auto& lt = traj.level_times;
                if (lt.size() >= 3) {
                    const double a = lt[lt.size() - 3], b = lt[lt.size() - 2], c = lt[lt.size() - 1];
                    const double den = (c - b) - (b - a);
                    if (std::abs(den) > 0.0) {
                        const double aitken = c - (c - b) * (c - b) / den;
                        if (std::isfinite(aitken) && aitken >= r.t) traj.lifetime = std::min(traj.lifetime, aitken);
                    }
                }
            } else {
                traj.termination = SurfaceTermination::escaped;
                traj.detail = "escape";
            }
            break;
    }
    if (opt.store_dense) traj.dense = std::move(r.dense);
    return traj;
}

// ---------------------------------------------------------------------------
// The non-tame witness

WitnessRecord non_tame_witness(const Genus2Surface& s, int n, const std::vector<double>& eps_list,
                               const WitnessOptions& opt) {
    if (n < 0) throw ArgumentError("witness level n must be non-negative");
    if (opt.scan < 2 || opt.per_round < 2 || opt.rounds < 1) throw ArgumentError("witness search sizes too small");
    for (double e : eps_list)
        if (!(e > 0.0)) throw ArgumentError("eps values must be positive");

    WitnessRecord rec;
    rec.n = n;
    rec.base = s.P(n);
    const double size = rec.base.norm();
    const double horizon = opt.horizon * size;
    const TangentFrame f = tangent_frame(s.gradient(rec.base));
    // The plane y = 0 is fixed by Sʸ; β measures the angle from it.
    const Point3 ex = (Point3::UnitX() - Point3::UnitX().dot(f.n) * f.n).normalized();
    const Point3 ey = f.n.cross(ex);
    auto direction = [&](double beta) { return Point3(std::cos(beta) * ex + std::sin(beta) * ey); };

    SurfaceGeodesicOptions go = opt.geodesic;
    go.store_dense = false;
    auto evaluate = [&](const std::vector<double>& betas) {
        std::vector<SurfaceTrajectory> out(betas.size());
        parallel_for(betas.size(), opt.workers,
                     [&](std::size_t i) { out[i] = surface_geodesic(s, rec.base, direction(betas[i]), horizon, go); });
        rec.evaluations += betas.size();
        return out;
    };

    std::vector<double> betas(static_cast<std::size_t>(opt.scan));
    for (int i = 0; i < opt.scan; ++i) betas[static_cast<std::size_t>(i)] = (i + 0.5) / opt.scan * std::numbers::pi / 2.0;
    const auto scanned = evaluate(betas);
    std::vector<std::size_t> order(betas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scanned[a].min_depth < scanned[b].min_depth; });

    double best_beta = betas[order.front()], best_depth = scanned[order.front()].min_depth;
    bool reached = false;
    const int tries = std::min<int>(opt.candidates, static_cast<int>(order.size()));
    for (int c = 0; c < tries && !reached; ++c) {
        double beta = betas[order[static_cast<std::size_t>(c)]];
        double depth = scanned[order[static_cast<std::size_t>(c)]].min_depth;
        reached = scanned[order[static_cast<std::size_t>(c)]].termination == SurfaceTermination::reached_apex;
        double width = std::numbers::pi / 2.0 / opt.scan;
        for (int round = 0; round < opt.rounds && !reached; ++round) {
            std::vector<double> zoom(static_cast<std::size_t>(opt.per_round));
            for (int j = 0; j < opt.per_round; ++j)
                zoom[static_cast<std::size_t>(j)] = beta - width + 2.0 * width * (j + 0.5) / opt.per_round;
            const auto res = evaluate(zoom);
            for (std::size_t j = 0; j < res.size(); ++j) {
                if (res[j].min_depth < depth) {
                    depth = res[j].min_depth;
                    beta = zoom[j];
                    reached = res[j].termination == SurfaceTermination::reached_apex;
                }
            }
            width *= 3.0 / opt.per_round;
        }
        if (depth < best_depth || reached) {
            best_depth = depth;
            best_beta = beta;
        }
    }
    rec.beta = best_beta;
    rec.direction = direction(best_beta);
    rec.depth = best_depth;
    if (!reached) {
        rec.diagnostics = "no direction reached the singularity: deepest approach " + std::to_string(best_depth) +
                          " at beta = " + std::to_string(best_beta);
        return rec;
    }

    go.store_dense = true;
    const SurfaceTrajectory forward = surface_geodesic(s, rec.base, rec.direction, horizon, go);
    const SurfaceTrajectory backward = surface_geodesic(s, rec.base, -rec.direction, horizon, go);
    rec.evaluations += 2;
    if (forward.termination != SurfaceTermination::reached_apex ||
        backward.termination != SurfaceTermination::reached_apex) {
        rec.diagnostics = "branches did not both reach the singularity (forward: " + to_string(forward.termination) +
                          ", backward: " + to_string(backward.termination) + ")";
        return rec;
    }
    rec.found = true;
    rec.t_plus = forward.lifetime;
    rec.t_minus = backward.lifetime;
    rec.symmetry_defect = std::abs(rec.t_minus - rec.t_plus) / rec.t_plus;

    const double T = rec.t_plus;
    std::vector<QuasiLinearity> levels;
    for (double e : eps_list) {
        const double eps = opt.eps_relative ? e * T : e;
        if (!(eps < T)) throw ArgumentError("eps must be smaller than the lifetime");
        WitnessRatio r{eps, eps, 2.0 * T - eps, (2.0 * T - eps) / eps};
        rec.ratios.push_back(r);
        const Vector y = forward.dense(std::min(T - eps, forward.t_end));
        WitnessLevel lvl{eps, 2.0 * T - eps, eps, Point3(y.head<3>())};
        rec.levels.push_back(lvl);
        const Vector p = lvl.point;
        levels.push_back(quasi_linearity_test({{p, lvl.mu_lower}}, {{p, lvl.delta_upper}}));
    }
    if (!levels.empty()) {
        double k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
        for (const auto& q : levels) {
            k1 = std::min(k1, q.k1);
            k2 = std::max(k2, q.k2);
        }
        rec.quasi_linearity = {k1, k2, k2 / k1};
    }
    rec.verdict = classify(levels);
    return rec;
}

}  // namespace weyllab::catalog
