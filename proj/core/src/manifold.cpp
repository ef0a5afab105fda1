#include "weyllab/manifold.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace weyllab {

std::string to_string(LocusKind kind) {
    switch (kind) {
        case LocusKind::boundary: return "boundary";
        case LocusKind::puncture: return "puncture";
        case LocusKind::apex: return "apex";
        case LocusKind::chart_edge: return "chart-edge";
    }
    return "boundary";
}

LocusKind locus_kind_from_string(const std::string& name) {
    if (name == "boundary") return LocusKind::boundary;
    if (name == "puncture") return LocusKind::puncture;
    if (name == "apex") return LocusKind::apex;
    if (name == "chart-edge") return LocusKind::chart_edge;
    throw ArgumentError("unknown locus kind '" + name + "'");
}

ChartMetric::ChartMetric(ChartDefinition def) : def_(std::move(def)) {
    if (def_.dim <= 0 || def_.dim > kMaxDim)
        throw ArgumentError("chart dimension must lie in [1, 8], got " + std::to_string(def_.dim));
    if (!def_.metric) throw ArgumentError("chart '" + def_.name + "' has no metric evaluator");
    for (const auto& c : def_.constraints)
        if (!c.margin) throw ArgumentError("constraint '" + c.name + "' has no margin function");
}

std::optional<std::string> ChartMetric::violated(const Vector& x) const {
    if (x.size() != def_.dim) return std::string("dimension");
    for (const auto& c : def_.constraints)
        if (!(c.margin(x) > 0.0)) return c.name;
    return std::nullopt;
}

namespace {

std::string format_point(const Vector& x) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

void require_inside(const ChartMetric& chart, const Vector& x) {
    if (auto bad = chart.violated(x))
        throw DomainError(*bad, "point " + format_point(x) + " violates '" + *bad + "' of chart '" +
                                    chart.name() + "'");
}

double condition_number(const Matrix& g) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    return ev.maxCoeff() / ev.minCoeff();
}

}  // namespace

Matrix metric_at(const ChartMetric& chart, const Vector& x) {
    require_inside(chart, x);
    return chart.metric(x);
}

std::vector<Matrix> metric_derivatives(const ChartMetric& chart, const Vector& x, double h) {
    const int n = chart.dim();
    std::vector<Matrix> dg(static_cast<std::size_t>(n));
    Vector xp = x, xm = x;
    for (int a = 0; a < n; ++a) {
        xp[a] = x[a] + h;
        xm[a] = x[a] - h;
        dg[static_cast<std::size_t>(a)] = (chart.metric(xp) - chart.metric(xm)) / (2.0 * h);
        xp[a] = x[a];
        xm[a] = x[a];
    }
    return dg;
}

Christoffel levi_civita(const Matrix& g, const std::vector<Matrix>& dg) {
    const int n = static_cast<int>(g.rows());
    const Matrix ginv = g.inverse();
    Christoffel gamma(n);
    // first kind: Γ_{l i j} = ½(∂ᵢg_{jl} + ∂ⱼg_{il} − ∂ₗg_{ij})
    std::vector<double> first(static_cast<std::size_t>(n * n * n));
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                first[static_cast<std::size_t>((l * n + i) * n + j)] =
                    0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int l = 0; l < n; ++l) acc += ginv(k, l) * first[static_cast<std::size_t>((l * n + i) * n + j)];
                gamma(k, i, j) = acc;
            }
    return gamma;
}

Christoffel christoffel_fd(const ChartMetric& chart, const Vector& x, double h, const FiniteDifference& fd) {
    require_inside(chart, x);
    if (h <= 0.0) h = fd.rel_step * chart.scale(x);
    const int n = chart.dim();
    Vector probe = x;
    for (int a = 0; a < n; ++a) {
        for (double s : {-2.0, 2.0}) {
            probe[a] = x[a] + s * h;
            if (auto bad = chart.violated(probe))
                throw DomainError(*bad, "finite-difference stencil of " + format_point(x) + " leaves the domain ('" +
                                            *bad + "')");
        }
        probe[a] = x[a];
    }
    const Matrix g = chart.metric(x);
    const double cond = condition_number(g);
    if (!(cond <= fd.max_condition))
        throw ConditioningError(cond, "metric condition number " + std::to_string(cond) + " at " + format_point(x));
    return levi_civita(g, metric_derivatives(chart, x, h));
}

Christoffel christoffel(const ChartMetric& chart, const Vector& x, const FiniteDifference& fd) {
    if (chart.has_analytic_christoffel()) {
        require_inside(chart, x);
        return chart.analytic_christoffel(x);
    }
    return christoffel_fd(chart, x, 0.0, fd);
}

double metric_compatibility_residual(const ChartMetric& chart, const Vector& x, const Christoffel& gamma) {
    const int n = chart.dim();
    const double h = 1e-4 * chart.scale(x);
    const auto dg = metric_derivatives(chart, x, h);
    const Matrix g = chart.metric(x);
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double r = dg[k](i, j);
                for (int m = 0; m < n; ++m) r -= gamma(m, k, i) * g(m, j) + gamma(m, k, j) * g(i, m);
                worst = std::max(worst, std::abs(r));
            }
    return worst / std::max(g.cwiseAbs().maxCoeff(), 1e-300);
}

Riemann riemann_of(const ConnectionFn& connection, const Vector& x, double h) {
    const int n = static_cast<int>(x.size());
    const Christoffel G = connection(x);
    std::vector<Christoffel> dG;  // ∂ₐΓ
    dG.reserve(static_cast<std::size_t>(n));
    Vector xp = x, xm = x;
    for (int a = 0; a < n; ++a) {
        xp[a] = x[a] + h;
        xm[a] = x[a] - h;
        const Christoffel gp = connection(xp), gm = connection(xm);
        Christoffel d(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
        dG.push_back(std::move(d));
        xp[a] = x[a];
        xm[a] = x[a];
    }
    Riemann R(n);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = dG[i](l, j, k) - dG[j](l, i, k);
                    for (int m = 0; m < n; ++m) v += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
                    R(l, k, i, j) = v;
                }
    return R;
}

Riemann riemann(const ChartMetric& chart, const Vector& x, const FiniteDifference& fd) {
    require_inside(chart, x);
    const double h = 10.0 * fd.rel_step * chart.scale(x);
    ConnectionFn conn = [&chart, fd](const Vector& p) -> Christoffel {
        if (chart.has_analytic_christoffel()) return chart.analytic_christoffel(p);
        return levi_civita(chart.metric(p), metric_derivatives(chart, p, fd.rel_step * chart.scale(p)));
    };
    // Probe the outer stencil too: the inner one is checked inside christoffel_fd.
    (void)christoffel(chart, x, fd);
    Vector probe = x;
    for (int a = 0; a < chart.dim(); ++a) {
        for (double s : {-1.0, 1.0}) {
            probe[a] = x[a] + s * (h + 2.0 * fd.rel_step * chart.scale(x));
            if (auto bad = chart.violated(probe))
                throw DomainError(*bad, "curvature stencil leaves the domain ('" + *bad + "')");
        }
        probe[a] = x[a];
    }
    return riemann_of(conn, x, h);
}

double curvature_norm(const Riemann& r, const Matrix& g) {
    const int n = r.dim();
    const Matrix gi = g.inverse();
    // lower the first index, then contract against the fully raised copy
    Riemann low(n);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = 0.0;
                    for (int l = 0; l < n; ++l) v += g(a, l) * r(l, k, i, j);
                    low(a, k, i, j) = v;
                }
    // raise one slot at a time
    Riemann up = low;
    for (int slot = 0; slot < 4; ++slot) {
        Riemann next(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        int idx[4] = {a, b, c, d};
                        const int free = idx[slot];
                        double v = 0.0;
                        for (int p = 0; p < n; ++p) {
                            idx[slot] = p;
                            v += gi(free, p) * up(idx[0], idx[1], idx[2], idx[3]);
                        }
                        next(a, b, c, d) = v;
                    }
        up = std::move(next);
    }
    double total = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) total += low(a, b, c, d) * up(a, b, c, d);
    return std::max(total, 0.0);
}

double curvature_norm(const ChartMetric& chart, const Vector& x, const FiniteDifference& fd) {
    return curvature_norm(riemann(chart, x, fd), chart.metric(x));
}

double sectional_curvature(const Riemann& r, const Matrix& g, const Vector& X, const Vector& Y) {
    const int n = r.dim();
    // R(X,Y)Y
    Vector v = Vector::Zero(n);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) v[l] += r(l, k, i, j) * Y[k] * X[i] * Y[j];
    const double num = X.dot(g * v);
    const double den = X.dot(g * X) * Y.dot(g * Y) - std::pow(X.dot(g * Y), 2);
    if (den <= 0.0) throw ArgumentError("sectional curvature needs linearly independent vectors");
    return num / den;
}

double min_eigenvalue(const Matrix& g) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double symmetry_defect(const Matrix& g) { return (g - g.transpose()).cwiseAbs().maxCoeff(); }

ChartMetric rescaled(const ChartMetric& chart, double lambda) {
    if (!(lambda > 0.0)) throw ArgumentError("rescale factor must be positive");
    ChartDefinition def = chart.definition();
    def.name = chart.name() + "*" + std::to_string(lambda);
    auto base = chart.definition().metric;
    def.metric = [base, lambda](const Vector& x) -> Matrix { return lambda * lambda * base(x); };
    // Levi-Civita coefficients are invariant under constant rescaling.
    auto sc = chart.definition().scale;
    def.scale = [sc, lambda](const Vector& x) { return sc ? sc(x) : 1.0; };
    return ChartMetric(std::move(def));
}

// ---------------------------------------------------------------------------

Jacobian32 numerical_jacobian(const EmbeddedSurface& s, const Param2& u, double h) {
    Jacobian32 J;
    for (int a = 0; a < 2; ++a) {
        Param2 up = u, um = u;
        up[a] += h;
        um[a] -= h;
        J.col(a) = (s.immersion(up) - s.immersion(um)) / (2.0 * h);
    }
    return J;
}

Matrix first_fundamental_form(const EmbeddedSurface& s, const Param2& u) {
    const Jacobian32 J = s.jacobian ? s.jacobian(u) : numerical_jacobian(s, u);
    return J.transpose() * J;
}

ChartMetric induced_chart(const EmbeddedSurface& s, std::size_t patch) {
    if (patch >= s.atlas.size()) throw ArgumentError("surface '" + s.name + "' has no patch " + std::to_string(patch));
    const ParameterPatch box = s.atlas[patch];
    ChartDefinition def;
    def.name = s.name + ":" + box.name;
    def.dim = 2;
    EmbeddedSurface copy = s;
    def.metric = [copy](const Vector& x) -> Matrix { return first_fundamental_form(copy, Param2(x[0], x[1])); };
    for (int a = 0; a < 2; ++a) {
        def.constraints.push_back({box.name + ".lower" + std::to_string(a), LocusKind::chart_edge,
                                   [a, lo = box.lower[a]](const Vector& x) { return x[a] - lo; }, 0.0, false});
        def.constraints.push_back({box.name + ".upper" + std::to_string(a), LocusKind::chart_edge,
                                   [a, hi = box.upper[a]](const Vector& x) { return hi - x[a]; }, 0.0, false});
    }
    for (const auto& c : s.singular) def.constraints.push_back(c);
    return ChartMetric(std::move(def));
}

SymmetryResidual symmetry_residual(const EmbeddedSurface& s, const SurfaceSymmetry& sym, const Param2& u) {
    SymmetryResidual r;
    const Param2 v = sym.on_params(u);
    r.position = (s.immersion(v) - sym.ambient(s.immersion(u))).norm();
    // dσ by central differences
    Eigen::Matrix2d ds;
    const double h = 1e-6;
    for (int a = 0; a < 2; ++a) {
        Param2 up = u, um = u;
        up[a] += h;
        um[a] -= h;
        ds.col(a) = (sym.on_params(up) - sym.on_params(um)) / (2.0 * h);
    }
    const Matrix pulled = ds.transpose() * first_fundamental_form(s, v) * ds;
    r.metric = (pulled - first_fundamental_form(s, u)).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace weyllab
