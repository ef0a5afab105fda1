#include "weyllab/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace weyllab {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::hit_singular_set: return "hit-singular-set";
        case Termination::f_collapse: return "F-collapse";
        case Termination::horizon: return "horizon";
        case Termination::chart_exit: return "left-chart";
        case Termination::step_failure: return "step-failure";
    }
    return "unknown";
}

std::string to_string(LifetimeStatus s) {
    switch (s) {
        case LifetimeStatus::incomplete: return "incomplete";
        case LifetimeStatus::complete_to_horizon: return "complete-to-horizon";
        case LifetimeStatus::undetermined: return "undetermined";
    }
    return "unknown";
}

Termination termination_from_string(const std::string& s) {
    for (auto t : {Termination::hit_singular_set, Termination::f_collapse, Termination::horizon,
                   Termination::chart_exit, Termination::step_failure})
        if (to_string(t) == s) return t;
    throw ArgumentError("unknown termination '" + s + "'");
}

LifetimeStatus lifetime_status_from_string(const std::string& s) {
    for (auto t : {LifetimeStatus::incomplete, LifetimeStatus::complete_to_horizon, LifetimeStatus::undetermined})
        if (to_string(t) == s) return t;
    throw ArgumentError("unknown lifetime status '" + s + "'");
}

std::pair<Vector, Vector> Trajectory::at(double t) const {
    if (dense.empty()) throw ArgumentError("trajectory was integrated without dense output");
    const Vector y = dense(t);
    const Eigen::Index n = y.size() / 2;
    return {y.head(n), y.tail(n)};
}

namespace {

double g_speed(const Matrix& g, const Vector& v) { return std::sqrt(std::max(v.dot(g * v), 0.0)); }

bool point_locus(LocusKind k) { return k == LocusKind::puncture || k == LocusKind::apex; }

}  // namespace

GeodesicState make_state(const WeylStructure& w, double t, const Vector& x, const Vector& v, int split) {
    GeodesicState s;
    s.t = t;
    s.x = x;
    s.v = v;
    const Matrix g = w.reference().metric(x);
    s.F = 1.0 / g_speed(g, v);
    s.H = w.theta(x).dot(v);
    if (split > 0 && split < w.dim()) {
        const int m = w.dim() - split;
        const Vector v1 = v.head(split), v2 = v.tail(m);
        const double n1 = std::sqrt(v1.dot(g.topLeftCorner(split, split) * v1));
        const double n2 = std::sqrt(v2.dot(g.bottomRightCorner(m, m) * v2));
        if (n2 > 0.0) s.slope = n1 / n2;
    }
    return s;
}

Trajectory integrate(const WeylStructure& w, const Vector& x0, const Vector& v0, double t_max,
                     const GeodesicOptions& opt) {
    const int n = w.dim();
    if (x0.size() != n || v0.size() != n) throw ArgumentError("initial data has the wrong dimension");
    if (!(t_max > 0.0)) throw ArgumentError("integration horizon must be positive");
    if (!v0.allFinite() || v0.isZero(0.0)) throw ArgumentError("initial velocity must be finite and non-zero");
    if (auto bad = w.reference().violated(x0)) throw ArgumentError("initial point violates '" + *bad + "'");
    const auto& constraints = w.reference().constraints();
    for (const auto& c : constraints)
        if (c.margin(x0) <= c.guard) throw ArgumentError("initial point lies in the guard band of '" + c.name + "'");

    const Matrix g0 = w.reference().metric(x0);
    const double F0 = 1.0 / g_speed(g0, v0);
    const bool weyl = !w.is_levi_civita();
    const FiniteDifference fd = opt.fd;

    // The metric is regular across boundary loci and patch edges, so the
    // right-hand side may be evaluated there; events alone decide where the
    // geodesic stops.
    ChartDefinition rhs_def = w.reference().definition();
    std::erase_if(rhs_def.constraints, [](const Constraint& c) {
        return c.kind == LocusKind::boundary || c.kind == LocusKind::chart_edge;
    });
    const WeylStructure w_rhs(ChartMetric(std::move(rhs_def)), w.lee(), w.sign());
    ode::Rhs rhs = [&w_rhs, n, fd](double, const Vector& y, Vector& dy) {
        const Vector x = y.head(n), v = y.tail(n);
        dy.head(n) = v;
        dy.tail(n) = -weyl_christoffel(w_rhs, x, fd).contract(v, v);
    };

    std::vector<ode::Event> events;
    for (const auto& c : constraints) {
        auto margin = c.margin;
        const double guard = c.guard;
        events.push_back({c.name, [margin, guard, n](double, const Vector& y) { return margin(y.head(n)) - guard; }});
    }
    const int fcollapse_index = static_cast<int>(events.size());
    if (weyl) {
        const double floor = opt.f_floor;
        events.push_back({"F-collapse", [&w, n, F0, floor](double, const Vector& y) {
                              const Vector x = y.head(n), v = y.tail(n);
                              const double F = 1.0 / g_speed(w.reference().metric(x), v);
                              return F / F0 - floor;
                          }});
    }

    // Distance-like margins bound the step directly. For the others the
    // first-order distance |m|/|∇m|_g to the zero set stands in, so that a
    // geodesic grazing a boundary cannot step across a thin crossing.
    ode::StepLimit limit;
    if (!constraints.empty()) {
        const double frac = opt.step_fraction;
        limit = [&w, &constraints, n, frac](double, const Vector& y) {
            const Vector x = y.head(n), v = y.tail(n);
            const Matrix g = w.reference().metric(x);
            const double speed = g_speed(g, v);
            double cap = std::numeric_limits<double>::infinity();
            for (const auto& c : constraints) {
                const double m = c.margin(x);
                if (c.distance_like) {
                    cap = std::min(cap, frac * m / speed);
                    continue;
                }
                const double h = 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff());
                Vector grad(n);
                for (int a = 0; a < n; ++a) {
                    Vector xp = x, xm = x;
                    xp[a] += h;
                    xm[a] -= h;
                    grad[a] = (c.margin(xp) - c.margin(xm)) / (2.0 * h);
                }
                const double gnorm = std::sqrt(std::max(0.0, grad.dot(g.ldlt().solve(grad))));
                // The floor lets the step cross the locus instead of approaching it forever.
                if (gnorm > 0.0 && std::isfinite(gnorm))
                    cap = std::min(cap, frac * std::max(std::abs(m - c.guard) / gnorm, 1e3 * h) / speed);
            }
            return cap;
        };
    }

    ode::Options o;
    o.rtol = opt.tol;
    o.atol = opt.tol;
    o.max_steps = opt.max_steps;
    o.store_dense = opt.store_dense;
    Vector y0(2 * n);
    y0 << x0, v0;
    ode::Result r = ode::dopri5(rhs, 0.0, y0, t_max, o, events, limit);

    Trajectory traj;
    traj.rejected = r.rejected;
    traj.dense = std::move(r.dense);
    traj.states.reserve(r.ts.size());
    for (std::size_t i = 0; i < r.ts.size(); ++i)
        traj.states.push_back(make_state(w, r.ts[i], r.ys[i].head(n), r.ys[i].tail(n), opt.product_split));
    traj.t_end = r.t;

    for (const auto& s : traj.states) {
        for (const auto& c : constraints)
            if (point_locus(c.kind)) traj.approach = std::min(traj.approach, c.margin(s.x));
        if (weyl) traj.approach = std::min(traj.approach, s.F / F0);
    }

    switch (r.status) {
        case ode::Status::reached_end: traj.termination = Termination::horizon; break;
        case ode::Status::step_failure:
        case ode::Status::max_steps:
            traj.termination = Termination::step_failure;
            traj.detail = r.status == ode::Status::max_steps ? "step budget exhausted" : r.failure;
            break;
        case ode::Status::event: {
            const GeodesicState& e = traj.states.back();
            if (r.event_index == fcollapse_index) {
                traj.termination = Termination::f_collapse;
                traj.detail = "F-collapse";
                // F ≈ c(T − t) near the limit, so T ≈ t − 1/H.
                traj.lifetime = e.H < 0.0 ? e.t - 1.0 / e.H : e.t;
            } else {
                const Constraint& c = constraints[static_cast<std::size_t>(r.event_index)];
                if (c.kind == LocusKind::chart_edge) {
                    traj.termination = Termination::chart_exit;
                    traj.detail = c.name;
                    break;
                }
                traj.termination = Termination::hit_singular_set;
                traj.detail = c.name;
                traj.lifetime = e.t;
                if (c.guard > 0.0) {
                    // Linear extrapolation of the margin to zero across the guard band.
                    const double m = c.margin(e.x);
                    const double speed = g_speed(w.reference().metric(e.x), e.v);
                    double dt = std::min(0.5 * m / speed, 0.5 * e.t);
                    if (!traj.dense.empty() && dt > 0.0) {
                        const auto [xb, vb] = traj.at(e.t - dt);
                        const double rate = (m - c.margin(xb)) / dt;
                        if (rate < 0.0) traj.lifetime = e.t + m / (-rate);
                    } else {
                        const double rate = -speed;  // distance-like margins shrink at most at unit g-speed
                        traj.lifetime = e.t + m / (-rate);
                    }
                }
            }
            break;
        }
    }
    return traj;
}

Vector exp_map(const WeylStructure& w, const Vector& x, const Vector& X, const GeodesicOptions& opt) {
    if (X.isZero(0.0)) return x;
    GeodesicOptions o = opt;
    o.store_dense = false;
    const Trajectory traj = integrate(w, x, X, 1.0, o);
    if (traj.termination != Termination::horizon) {
        const double life = traj.incomplete() ? traj.lifetime : traj.t_end;
        throw IncompletenessError(life, "geodesic dies at parameter " + std::to_string(life) + " (" +
                                            to_string(traj.termination) + ": " + traj.detail + ")");
    }
    return traj.back().x;
}

LifetimeRecord lifetime(const WeylStructure& w, const Vector& x, const Vector& X, double horizon,
                        GeodesicOptions opt) {
    if (!(horizon > 0.0)) throw ArgumentError("horizon must be positive");
    opt.store_dense = true;  // needed for the extrapolation across guard bands
    const Trajectory traj = integrate(w, x, X, horizon, opt);
    LifetimeRecord rec;
    rec.x = x;
    rec.X = X;
    rec.horizon = horizon;
    rec.termination = traj.termination;
    rec.detail = traj.detail;
    rec.approach = traj.approach;
    if (traj.incomplete()) {
        rec.status = LifetimeStatus::incomplete;
        rec.lifetime = traj.lifetime;
    } else if (traj.termination == Termination::horizon) {
        rec.status = LifetimeStatus::complete_to_horizon;
    } else {
        rec.status = LifetimeStatus::undetermined;
        rec.lifetime = traj.t_end;
    }
    return rec;
}

FHSeries fh_series(const Trajectory& traj, const WeylStructure& w, std::optional<double> eps, double spacing) {
    if (traj.dense.empty()) throw ArgumentError("fh_series needs a trajectory with dense output");
    const double t0 = traj.dense.t_begin(), t1 = traj.dense.t_end();
    const auto count = static_cast<long>(std::floor((t1 - t0) / spacing));
    if (count < 3) throw ArgumentError("trajectory too short for F/H differencing");

    auto FH = [&](double t) {
        const auto [x, v] = traj.at(t);
        const GeodesicState s = make_state(w, t, x, v);
        return std::pair{s.F, s.H};
    };

    FHSeries out;
    double est = -std::numeric_limits<double>::infinity();
    double tame = -std::numeric_limits<double>::infinity();
    for (long i = 1; i < count; ++i) {
        const double t = t0 + spacing * static_cast<double>(i);
        if (t + spacing > t1) break;
        const auto [F, H] = FH(t);
        const auto [Fp, Hp] = FH(t + spacing);
        const auto [Fm, Hm] = FH(t - spacing);
        const double dF = (Fp - Fm) / (2.0 * spacing);
        const double dH = (Hp - Hm) / (2.0 * spacing);
        out.residual = std::max(out.residual, std::abs(dF - F * H));
        if (eps) {
            est = std::max(est, H + std::sqrt(*eps) / F);
            // Scaled by F² so that it stays O(1) as F → 0; H' is only trusted
            // where the spacing resolves the log-rate H of F.
            if (spacing * std::abs(H) < 1e-2) tame = std::max(tame, 2.0 * *eps - (2.0 * H * H + dH) * F * F);
        }
        if (!out.H.empty() && ((out.H.back() < 0.0) != (H < 0.0)))
            out.h_sign_changes.push_back(0.5 * (out.t.back() + t));
        out.t.push_back(t);
        out.F.push_back(F);
        out.H.push_back(H);
    }
    if (eps) {
        out.est_margin = est;
        out.tame_margin = tame;
    }
    return out;
}

double lifetime_bound(const WeylStructure& w, double eps, const Vector& x, const Vector& X) {
    if (!(eps > 0.0)) throw ArgumentError("lifetime bound needs eps > 0");
    const Matrix g = metric_at(w.reference(), x);
    return 1.0 / std::sqrt(eps * X.dot(g * X));
}

LeafExponentiation leaf_exponentiation(const WeylStructure& w, const std::vector<Vector>& leaf_points,
                                       const Vector& X, const DistanceFn& distance, const GeodesicOptions& opt) {
    LeafExponentiation out;
    out.images.reserve(leaf_points.size());
    for (const auto& p : leaf_points) out.images.push_back(exp_map(w, p, X, opt));
    for (std::size_t i = 0; i < leaf_points.size(); ++i)
        for (std::size_t j = i + 1; j < leaf_points.size(); ++j) {
            const double before = distance(leaf_points[i], leaf_points[j]);
            const double after = distance(out.images[i], out.images[j]);
            if (before > 0.0) out.residual = std::max(out.residual, std::abs(after - before) / before);
        }
    return out;
}

std::vector<std::pair<double, double>> shear_projection_norms(const WeylStructure& w, int split,
                                                              const Trajectory& base, const Vector& X,
                                                              const std::vector<double>& ts,
                                                              const GeodesicOptions& opt) {
    const int n = w.dim();
    const int m = n - split;
    if (split <= 0 || split >= n) throw ArgumentError("product split out of range");
    auto curve = [&](double t) { return exp_map(w, base.at(t).first, t * X, opt); };
    std::vector<std::pair<double, double>> out;
    for (double t : ts) {
        const double dt = 1e-5 * std::max(1.0, std::abs(t));
        const Vector c = curve(t);
        const Vector v = (curve(t + dt) - curve(t - dt)) / (2.0 * dt);
        const Matrix g = w.reference().metric(c);
        const Vector v1 = v.head(split), v2 = v.tail(m);
        out.emplace_back(std::sqrt(v1.dot(g.topLeftCorner(split, split) * v1)),
                         std::sqrt(v2.dot(g.bottomRightCorner(m, m) * v2)));
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.states.empty()) return;
    const Eigen::Index n = traj.states.front().x.size();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
    for (Eigen::Index i = 0; i < n; ++i) os << ",v" << i;
    os << ",F,H\n";
    os.precision(17);
    for (const auto& s : traj.states) {
        os << s.t;
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << s.x[i];
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << s.v[i];
        os << ',' << s.F << ',' << s.H << '\n';
    }
}

}  // namespace weyllab
