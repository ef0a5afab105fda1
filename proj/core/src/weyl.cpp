#include "weyllab/weyl.hpp"

#include "weyllab/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace weyllab {

std::string to_string(LeeSign sign) { return sign == LeeSign::consistent ? "consistent" : "flipped"; }

LeeSign lee_sign_from_string(const std::string& name) {
    if (name == "consistent") return LeeSign::consistent;
    if (name == "flipped") return LeeSign::flipped;
    throw ArgumentError("unknown Lee-form sign convention '" + name + "'");
}

LeeForm zero_lee_form(int dim) {
    LeeForm f;
    f.kind = "zero";
    f.value = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
    f.jacobian = [dim](const Vector&) -> Matrix { return Matrix::Zero(dim, dim); };
    f.potential = [](const Vector&) { return 1.0; };
    return f;
}

LeeForm constant_lee_form(const Vector& c) {
    LeeForm f;
    f.kind = "constant";
    const int n = static_cast<int>(c.size());
    f.value = [c](const Vector&) -> Vector { return c; };
    f.jacobian = [n](const Vector&) -> Matrix { return Matrix::Zero(n, n); };
    f.potential = [c](const Vector& x) { return std::exp(c.dot(x)); };
    return f;
}

LeeForm coordinate_lee_form(int dim, int axis) {
    if (axis < 0 || axis >= dim) throw ArgumentError("Lee-form axis out of range");
    LeeForm f = constant_lee_form(Vector::Unit(dim, axis));
    f.kind = axis == 0 ? "ds" : "dx" + std::to_string(axis);
    return f;
}

LeeForm cosine_gradient_lee_form(const Vector& a) {
    LeeForm f;
    f.kind = "cosine-gradient";
    const int n = static_cast<int>(a.size());
    f.value = [a, n](const Vector& x) -> Vector {
        Vector t(n);
        for (int i = 0; i < n; ++i) t[i] = -a[i] * std::sin(x[i]);
        return t;
    };
    f.jacobian = [a, n](const Vector& x) -> Matrix {
        Matrix J = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) J(i, i) = -a[i] * std::cos(x[i]);
        return J;
    };
    f.potential = [a, n](const Vector& x) {
        double psi = 0.0;
        for (int i = 0; i < n; ++i) psi += a[i] * std::cos(x[i]);
        return std::exp(psi);
    };
    return f;
}

WeylStructure::WeylStructure(ChartMetric reference, LeeForm lee, LeeSign sign)
    : reference_(std::move(reference)), lee_(std::move(lee)), sign_(sign) {
    if (!lee_.value) throw ArgumentError("Lee form without an evaluator");
}

WeylStructure WeylStructure::levi_civita(ChartMetric reference) {
    const int n = reference.dim();
    return WeylStructure(std::move(reference), zero_lee_form(n));
}

Matrix lee_jacobian(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    if (w.lee().jacobian) return w.lee().jacobian(x);
    const int n = w.dim();
    const double h = fd.rel_step * w.reference().scale(x);
    Matrix J(n, n);
    Vector xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        J.row(i) = ((w.theta(xp) - w.theta(xm)) / (2.0 * h)).transpose();
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return J;
}

Matrix lee_covariant_derivative(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    const int n = w.dim();
    const Christoffel G = christoffel(w.reference(), x, fd);
    const Vector th = w.theta(x);
    Matrix N = lee_jacobian(w, x, fd);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) N(i, j) -= G(k, i, j) * th[k];
    return N;
}

Christoffel weyl_christoffel(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    Christoffel G = christoffel(w.reference(), x, fd);
    if (w.is_levi_civita()) return G;
    const int n = w.dim();
    const Vector th = w.theta(x);
    const Matrix g = w.reference().metric(x);
    const Vector sharp = g.ldlt().solve(th);
    const double s = w.sign() == LeeSign::consistent ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                G(k, i, j) += (k == j ? th[i] : 0.0) + (k == i ? th[j] : 0.0) + s * g(i, j) * sharp[k];
    return G;
}

double check_parallel_metric(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    const int n = w.dim();
    const Christoffel G = weyl_christoffel(w, x, fd);
    const Matrix g = metric_at(w.reference(), x);
    const auto dg = metric_derivatives(w.reference(), x, fd.rel_step * w.reference().scale(x));
    const Vector th = w.theta(x);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        // (D_k g)_{ij} = ∂ₖg_{ij} − Γ̃ᵐₖᵢ g_{mj} − Γ̃ᵐₖⱼ g_{im}
        Matrix r = dg[static_cast<std::size_t>(k)] + 2.0 * th[k] * g;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) r(i, j) -= G(m, k, i) * g(m, j) + G(m, k, j) * g(i, m);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

double closedness_residual(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    const Matrix J = lee_jacobian(w, x, fd);
    return (J - J.transpose()).cwiseAbs().maxCoeff();
}

double potential_residual(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    if (!w.has_potential()) return 0.0;
    const int n = w.dim();
    const double h = fd.rel_step * w.reference().scale(x);
    const Vector th = w.theta(x);
    double worst = 0.0;
    Vector xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const double d = (std::log(w.potential(xp)) - std::log(w.potential(xm))) / (2.0 * h);
        worst = std::max(worst, std::abs(d - th[i]));
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return worst;
}

WeylStructure conformal_change(const WeylStructure& w, std::function<double(const Vector&)> f,
                               std::function<Vector(const Vector&)> df) {
    const ChartMetric& ref = w.reference();
    ChartDefinition def = ref.definition();
    def.name = "conformal(" + ref.name() + ")";
    def.metric = [ref, f](const Vector& x) -> Matrix { return std::exp(2.0 * f(x)) * ref.metric(x); };
    def.christoffel = nullptr;
    LeeForm lee;
    lee.kind = "conformal(" + w.lee().kind + ")";
    lee.closed = w.lee().closed;
    const LeeForm old = w.lee();
    lee.value = [old, df](const Vector& x) -> Vector { return old.value(x) - df(x); };
    if (old.potential) lee.potential = [old, f](const Vector& x) { return old.potential(x) * std::exp(-f(x)); };
    return WeylStructure(ChartMetric(std::move(def)), std::move(lee), w.sign());
}

Riemann weyl_riemann(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    const double h = 10.0 * fd.rel_step * w.reference().scale(x);
    ConnectionFn conn = [&w, fd](const Vector& p) { return weyl_christoffel(w, p, fd); };
    return riemann_of(conn, x, h);
}

Matrix tame_form(const WeylStructure& w, const Vector& x, const FiniteDifference& fd) {
    const Matrix g = metric_at(w.reference(), x);
    const Vector th = w.theta(x);
    const double norm2 = th.dot(g.ldlt().solve(th));
    const Matrix N = lee_covariant_derivative(w, x, fd);
    return norm2 * g + 0.5 * (N + N.transpose());
}

std::vector<Vector> unit_directions(const Matrix& g, int count, std::mt19937_64& rng) {
    if (count <= 0) throw ArgumentError("direction count must be positive");
    const int n = static_cast<int>(g.rows());
    const Eigen::LLT<Matrix> llt(g);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double phase = uni(rng);
    for (int c = 0; c < count; ++c) {
        Vector u(n);
        if (n == 1) {
            u[0] = c % 2 == 0 ? 1.0 : -1.0;
        } else if (n == 2) {
            const double a = 2.0 * std::numbers::pi * (c + phase) / count;
            u << std::cos(a), std::sin(a);
        } else {
            for (int i = 0; i < n; ++i) u[i] = gauss(rng);
            u.normalize();
        }
        // g = LLᵀ ⇒ X = L⁻ᵀu has g(X,X) = |u|² = 1
        out.push_back(llt.matrixU().solve(u));
    }
    return out;
}

AnalyticTameReport analytic_tame_check(const WeylStructure& w, const SphereBundleSample& sample, unsigned workers,
                                       const FiniteDifference& fd) {
    if (sample.points.empty() || sample.directions_per_point <= 0)
        throw ArgumentError("analytic tameness check needs a non-empty sphere-bundle sample");
    struct Local {
        double q = std::numeric_limits<double>::infinity();
        Vector direction;
    };
    std::vector<Local> best(sample.points.size());
    parallel_for(sample.points.size(), workers, [&](std::size_t p) {
        const Vector& x = sample.points[p];
        std::mt19937_64 rng(sample.seed + 0x9e3779b97f4a7c15ULL * (p + 1));
        const Matrix A = tame_form(w, x, fd);
        const Matrix g = w.reference().metric(x);
        for (const Vector& X : unit_directions(g, sample.directions_per_point, rng)) {
            const double q = X.dot(A * X);
            if (q < best[p].q) best[p] = {q, X};
        }
    });
    AnalyticTameReport report;
    report.sample_size = sample.points.size() * static_cast<std::size_t>(sample.directions_per_point);
    std::size_t arg = 0;
    for (std::size_t p = 1; p < best.size(); ++p)
        if (best[p].q < best[arg].q) arg = p;
    report.min_margin = best[arg].q;
    report.epsilon_best = 0.5 * best[arg].q;
    report.argmin_point = sample.points[arg];
    report.argmin_direction = best[arg].direction;
    if (report.min_margin <= 0.0) report.violating_point = TameViolation{report.argmin_point, report.argmin_direction};
    return report;
}

Tame2Comparison tame2_check(const WeylStructure& w, const Vector& x, const Vector& X, double eps,
                            const FiniteDifference& fd) {
    const int n = w.dim();
    const Matrix g = metric_at(w.reference(), x);
    const Vector th = w.theta(x);
    const double gXX = X.dot(g * X);
    const double thX = th.dot(X);

    Tame2Comparison out;
    out.margin_tame = X.dot(tame_form(w, x, fd) * X) - 2.0 * eps * gXX;

    // (D_Xθ)(X) = Xⁱ Xʲ (∂ᵢθⱼ − Γ̃ᵏᵢⱼθₖ)
    const Christoffel Gt = weyl_christoffel(w, x, fd);
    const Matrix J = lee_jacobian(w, x, fd);
    double dth = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double c = J(i, j);
            for (int k = 0; k < n; ++k) c -= Gt(k, i, j) * th[k];
            dth += X[i] * X[j] * c;
        }
    out.margin_tame2 = dth - 2.0 * eps * gXX + 2.0 * thX * thX;
    out.residual = std::abs(out.margin_tame - out.margin_tame2);
    return out;
}

}  // namespace weyllab
