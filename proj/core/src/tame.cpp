#include "weyllab/tame.hpp"

#include "weyllab/optimize.hpp"
#include "weyllab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace weyllab {

DirectionFrame::DirectionFrame(const WeylStructure& w, const Vector& x) {
    const Matrix g = metric_at(w.reference(), x);
    const Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw DomainError("positive-definite", "metric is not positive definite");
    lt_ = llt.matrixU();
    inv_lt_ = lt_.inverse();
    phi_ = w.potential(x);
}

Vector DirectionFrame::operator()(const Vector& u) const {
    const double n = u.norm();
    if (!(n > 0.0)) throw ArgumentError("direction parameter must be non-zero");
    return inv_lt_ * (u / n) / phi_;
}

Vector DirectionFrame::at_angle(double alpha) const {
    if (dim() != 2) throw ArgumentError("angle parametrisation needs dimension 2");
    Vector u(2);
    u << std::cos(alpha), std::sin(alpha);
    return (*this)(u);
}

Vector DirectionFrame::coordinates(const Vector& X) const {
    const Vector u = phi_ * (lt_ * X);
    return u / u.norm();
}

std::vector<Vector> sphere_sample(int dim, int count, std::uint64_t seed) {
    if (count <= 0) throw ArgumentError("sample size must be positive");
    std::mt19937_64 rng(seed);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    if (dim == 1) {
        for (int k = 0; k < count; ++k) out.push_back(Vector::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
    } else if (dim == 2) {
        const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        for (int k = 0; k < count; ++k) {
            const double a = phase + 2.0 * std::numbers::pi * k / count;
            Vector u(2);
            u << std::cos(a), std::sin(a);
            out.push_back(u);
        }
    } else {
        std::normal_distribution<double> n01;
        for (int k = 0; k < count; ++k) {
            Vector u(dim);
            do {
                for (int i = 0; i < dim; ++i) u[i] = n01(rng);
            } while (u.norm() < 1e-12);
            out.push_back(u / u.norm());
        }
    }
    return out;
}

std::vector<LifetimeRecord> lifetime_scan(const WeylStructure& w, const std::vector<Vector>& points,
                                          const ScanOptions& opt) {
    if (opt.directions_per_point <= 0) throw ArgumentError("directions per point must be positive");
    const auto per = static_cast<std::size_t>(opt.directions_per_point);
    std::vector<Vector> dirs;
    dirs.reserve(points.size() * per);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const DirectionFrame frame(w, points[p]);
        for (const auto& u : sphere_sample(w.dim(), opt.directions_per_point, opt.seed + 0x9E3779B97F4A7C15ULL * p))
            dirs.push_back(frame(u));
    }
    std::vector<LifetimeRecord> out(dirs.size());
    parallel_for(dirs.size(), opt.workers, [&](std::size_t i) {
        out[i] = lifetime(w, points[i / per], dirs[i], opt.horizon, opt.geodesic);
    });
    return out;
}

namespace {

struct Probe {
    Vector X;
    LifetimeRecord rec;
};

// All evaluations made while searching directions at one point.
struct DirectionSearch {
    std::vector<Probe> sample;
    std::vector<Probe> refined;
};

bool is_incomplete(const LifetimeRecord& r) { return r.status == LifetimeStatus::incomplete; }

Matrix tangent_basis(const Vector& u0) {
    const auto n = u0.size();
    Eigen::HouseholderQR<Matrix> qr(u0);
    const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    return Q.rightCols(n - 1);
}

Vector cap_point(const Vector& u0, const Matrix& basis, const Vector& xi, double radius) {
    double a = xi.norm();
    if (a == 0.0) return u0;
    const Vector dir = basis * (xi / a);
    a = std::min(a, radius);
    return std::cos(a) * u0 + std::sin(a) * dir;
}

DirectionSearch search_directions(const WeylStructure& w, const Vector& x, const MuOptions& opt) {
    if (opt.n_directions <= 0) throw ArgumentError("direction count must be positive");
    const DirectionFrame frame(w, x);
    const int n = w.dim();
    const auto us = sphere_sample(n, opt.n_directions, opt.seed);

    DirectionSearch out;
    out.sample.resize(us.size());
    parallel_for(us.size(), opt.workers, [&](std::size_t k) {
        out.sample[k].X = frame(us[k]);
        out.sample[k].rec = lifetime(w, x, out.sample[k].X, opt.horizon, opt.geodesic);
    });
    if (opt.refine_iterations == 0 || n == 1) return out;

    auto evaluate = [&](const Vector& u) -> const Probe& {
        Probe p;
        p.X = frame(u);
        p.rec = lifetime(w, x, p.X, opt.horizon, opt.geodesic);
        out.refined.push_back(std::move(p));
        return out.refined.back();
    };
    // Maximise incomplete life-time, or, with no incomplete direction yet,
    // minimise the closest approach to a singular locus.
    auto lifetime_score = [](const LifetimeRecord& r) { return is_incomplete(r) ? -*r.lifetime : 0.0; };
    auto approach_score = [](const LifetimeRecord& r) { return is_incomplete(r) ? -1.0 : r.approach; };

    auto refine = [&](std::size_t start, double width, auto score) {
        const Vector u0 = us[start];
        if (n == 2) {
            const double a0 = std::atan2(u0[1], u0[0]);
            minimize_1d(
                [&](double a) {
                    Vector u(2);
                    u << std::cos(a), std::sin(a);
                    return score(evaluate(u).rec);
                },
                a0 - width, a0 + width, opt.refine_iterations);
        } else {
            // Coordinates on the tangent plane of the sphere at u0; restarts
            // with a shrinking simplex reach the thin sets where geodesics
            // hit a point locus.
            const Matrix basis = tangent_basis(u0);
            Vector xi = Vector::Zero(n - 1);
            double step = width;
            std::size_t used = 0;
            for (int restart = 0; restart < 8 && used < opt.refine_iterations; ++restart) {
                const MinimumND m = minimize_nd(
                    [&](const Vector& z) { return score(evaluate(cap_point(u0, basis, z, std::numbers::pi)).rec); },
                    xi, step, opt.refine_iterations - used);
                used += std::max<std::size_t>(m.evaluations, 1);
                xi = m.x;
                step = std::max(step * 0.05, 1e-12);
            }
        }
    };

    const double spacing = n == 2 ? 2.0 * std::numbers::pi / opt.n_directions
                                  : std::pow(4.0 * std::numbers::pi / opt.n_directions, 1.0 / (n - 1));
    std::optional<std::size_t> best_life, best_approach;
    for (std::size_t k = 0; k < out.sample.size(); ++k) {
        const auto& r = out.sample[k].rec;
        if (is_incomplete(r)) {
            if (!best_life || *r.lifetime > *out.sample[*best_life].rec.lifetime) best_life = k;
        } else if (std::isfinite(r.approach)) {
            if (!best_approach || r.approach < out.sample[*best_approach].rec.approach) best_approach = k;
        }
    }
    if (best_life) {
        refine(*best_life, spacing, lifetime_score);
    } else if (best_approach) {
        refine(*best_approach, spacing, approach_score);
    }
    return out;
}

template <class Fn>
void for_each_probe(const DirectionSearch& s, Fn&& fn) {
    for (const auto& p : s.sample) fn(p, true);
    for (const auto& p : s.refined) fn(p, false);
}

}  // namespace

MuEstimate mu_estimate(const WeylStructure& w, const Vector& x, const MuOptions& opt) {
    const DirectionSearch s = search_directions(w, x, opt);
    MuEstimate out;
    for_each_probe(s, [&](const Probe& p, bool sampled) {
        ++out.evaluations;
        if (!is_incomplete(p.rec)) return;
        const double life = *p.rec.lifetime;
        if (sampled) {
            ++out.incomplete;
            if (!out.sampled || life > *out.sampled) out.sampled = life;
        }
        if (!out.value || life > *out.value) {
            out.value = life;
            out.direction = p.X;
        }
    });
    return out;
}

std::optional<DeltaEstimate> delta_from_lifetimes(const WeylStructure& w, const Vector& x, const MuOptions& opt) {
    const DirectionSearch s = search_directions(w, x, opt);
    std::optional<DeltaEstimate> out;
    for_each_probe(s, [&](const Probe& p, bool) {
        if (!is_incomplete(p.rec)) return;
        if (!out || *p.rec.lifetime < out->value) out = DeltaEstimate{*p.rec.lifetime, true};
    });
    return out;
}

QuasiLinearity quasi_linearity_test(const std::vector<PointValue>& values, const std::vector<PointValue>& delta,
                                    double point_tol) {
    if (values.size() != delta.size()) throw ArgumentError("values and delta have different sizes");
    if (values.empty()) throw ArgumentError("quasi-linearity test needs at least one sample");
    QuasiLinearity q{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& [p, v] = values[i];
        const auto& [pd, d] = delta[i];
        if (p.size() != pd.size() || (p - pd).norm() > point_tol)
            throw ArgumentError("sample " + std::to_string(i) + " pairs different points");
        if (!(d > 0.0)) throw ArgumentError("delta must be positive");
        const double r = v / d;
        q.k1 = std::min(q.k1, r);
        q.k2 = std::max(q.k2, r);
    }
    q.spread = q.k2 / q.k1;
    return q;
}

std::string to_string(TameVerdict v) {
    switch (v) {
        case TameVerdict::tame_consistent: return "tame-consistent";
        case TameVerdict::non_tame_witness: return "non-tame-witness";
        case TameVerdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

TameVerdict classify(const std::vector<QuasiLinearity>& levels, const VerdictThresholds& th) {
    if (levels.size() < th.min_levels) return TameVerdict::inconclusive;
    double k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
    bool levels_tight = true;
    for (const auto& q : levels) {
        k1 = std::min(k1, q.k1);
        k2 = std::max(k2, q.k2);
        levels_tight = levels_tight && q.spread < th.tame_spread;
    }
    const double spread = k2 / k1;
    if (spread > th.non_tame_spread) return TameVerdict::non_tame_witness;
    if (levels_tight && spread < th.tame_spread) return TameVerdict::tame_consistent;
    return TameVerdict::inconclusive;
}

TameReport tame_report(const WeylStructure& w, const std::vector<std::vector<Vector>>& levels, const DeltaFn& delta,
                       const MuOptions& opt, const VerdictThresholds& th) {
    TameReport rep;
    double k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
    std::vector<double> cumulative;
    Vector worst_point, worst_dir;
    double worst_ratio = 0.0;
    for (const auto& level : levels) {
        std::vector<PointValue> mu, dl;
        for (const auto& x : level) {
            const MuEstimate m = mu_estimate(w, x, opt);
            if (m.censored()) {
                ++rep.censored;
                continue;
            }
            double d = 0.0;
            if (delta) {
                d = delta(x);
            } else {
                const auto est = delta_from_lifetimes(w, x, opt);
                if (!est) continue;
                d = est->value;
                rep.delta_upper_bound = true;
            }
            mu.emplace_back(x, *m.value);
            dl.emplace_back(x, d);
            if (*m.value / d > worst_ratio) {
                worst_ratio = *m.value / d;
                worst_point = x;
                worst_dir = m.direction;
            }
        }
        if (mu.empty()) continue;
        const QuasiLinearity q = quasi_linearity_test(mu, dl);
        rep.levels.push_back(q);
        k1 = std::min(k1, q.k1);
        k2 = std::max(k2, q.k2);
        cumulative.push_back(k2 / k1);
        rep.mu_samples.insert(rep.mu_samples.end(), mu.begin(), mu.end());
        rep.delta_samples.insert(rep.delta_samples.end(), dl.begin(), dl.end());
    }
    if (!rep.levels.empty()) rep.ratio_bounds = {k1, k2};
    rep.verdict = classify(rep.levels, th);
    if (rep.verdict == TameVerdict::non_tame_witness) {
        TameWitness wit;
        wit.kind = "divergent-ratio";
        wit.spreads = cumulative;
        wit.point = worst_point;
        wit.direction = worst_dir;
        rep.witness = wit;
    }
    return rep;
}

namespace {

// Orthonormal basis of the Euclidean complement of the unit vector u0.
}  // namespace

WeakTameProbe weak_tame_probe(const WeylStructure& w, const Vector& x, const Vector& X,
                              const std::vector<double>& radii, const ProbeOptions& opt) {
    const LifetimeRecord base = lifetime(w, x, X, opt.horizon, opt.geodesic);
    if (base.status != LifetimeStatus::complete_to_horizon)
        throw ArgumentError("probe vector is not complete to the horizon (" + to_string(base.status) + ")");
    if (opt.samples_per_cap <= 0) throw ArgumentError("samples per cap must be positive");

    const int n = w.dim();
    const DirectionFrame frame(w, x);
    const Vector u0 = frame.coordinates(X);
    const double length = (X.norm()) / frame(u0).norm();
    const Matrix basis = n > 1 ? tangent_basis(u0) : Matrix();

    WeakTameProbe out;
    out.x = x;
    out.X = X;
    std::mt19937_64 rng(opt.seed);
    for (double r : radii) {
        ProbeLevel level;
        level.radius = r;
        if (n == 1 || !(r > 0.0)) {
            out.levels.push_back(level);
            continue;
        }
        const auto m = static_cast<std::size_t>(opt.samples_per_cap);
        std::vector<Vector> xis(m);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> n01;
        for (std::size_t k = 0; k < m; ++k) {
            Vector xi(n - 1);
            if (n == 2) {
                xi[0] = r * (-1.0 + 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(m));
            } else {
                for (int i = 0; i < n - 1; ++i) xi[i] = n01(rng);
                xi *= r * std::pow(u01(rng), 1.0 / (n - 1)) / xi.norm();
            }
            xis[k] = xi;
        }
        std::vector<Probe> probes(m);
        parallel_for(m, opt.workers, [&](std::size_t k) {
            probes[k].X = length * frame(cap_point(u0, basis, xis[k], r));
            probes[k].rec = lifetime(w, x, probes[k].X, opt.horizon, opt.geodesic);
        });
        level.evaluations = m;

        auto accept = [&](const Probe& p, const Vector& xi) {
            if (level.found || !is_incomplete(p.rec)) return;
            level.found = true;
            level.vector = p.X;
            level.angle = std::min(xi.norm(), r);
            level.lifetime = p.rec.lifetime;
        };
        std::optional<std::size_t> closest;
        for (std::size_t k = 0; k < m; ++k) {
            accept(probes[k], xis[k]);
            if (std::isfinite(probes[k].rec.approach) &&
                (!closest || probes[k].rec.approach < probes[*closest].rec.approach))
                closest = k;
        }
        if (!level.found && closest && opt.refine_iterations > 0) {
            auto score = [&](const Vector& xi) {
                if (level.found) return -1.0;
                Probe p;
                p.X = length * frame(cap_point(u0, basis, xi, r));
                p.rec = lifetime(w, x, p.X, opt.horizon, opt.geodesic);
                ++level.evaluations;
                accept(p, xi);
                return is_incomplete(p.rec) ? -1.0 : p.rec.approach;
            };
            const Vector& xi0 = xis[*closest];
            if (n == 2) {
                // Over long horizons the approach is the minimum over many
                // passes and has many kinks, so zoom on the best sample instead
                // of trusting a single bracket.
                double centre = xi0[0], spacing = 2.0 * r / static_cast<double>(m), best = probes[*closest].rec.approach;
                const std::size_t per_round = std::max<std::size_t>(m, 8);
                while (!level.found && level.evaluations - m + per_round <= opt.refine_iterations && spacing > 1e-15) {
                    const double lo = std::max(-r, centre - 3.0 * spacing), hi = std::min(r, centre + 3.0 * spacing);
                    double next = centre;
                    for (std::size_t k = 0; k < per_round && !level.found; ++k) {
                        const double a = lo + (hi - lo) * (static_cast<double>(k) + 0.5) / static_cast<double>(per_round);
                        const double sc = score(Vector::Constant(1, a));
                        if (sc >= 0.0 && sc < best) {
                            best = sc;
                            next = a;
                        }
                    }
                    centre = next;
                    spacing = (hi - lo) / static_cast<double>(per_round);
                }
            } else {
                minimize_nd(score, xi0, r / 4.0, opt.refine_iterations);
            }
        }
        out.levels.push_back(level);
    }
    return out;
}

}  // namespace weyllab
