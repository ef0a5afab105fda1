#pragma once

#include "weyllab/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace weyllab {

/// What kind of excluded locus a constraint describes.
enum class LocusKind {
    boundary,  // a hypersurface; the metric stays regular on the far side
    puncture,  // an isolated removed point (or lattice of points)
    apex,      // a metric singularity (cone tip); the metric degenerates there
    chart_edge,  // the edge of a coordinate patch; leaving it says nothing about completeness
};

std::string to_string(LocusKind kind);
LocusKind locus_kind_from_string(const std::string& name);

/// One predicate of a chart domain. A point is admissible iff every margin is
/// strictly positive. Geodesic integration terminates when a margin drops to
/// `guard`.
struct Constraint {
    std::string name;
    LocusKind kind = LocusKind::boundary;
    std::function<double(const Vector&)> margin;
    double guard = 0.0;
    /// margin(x) is a lower bound for the metric distance from x to the locus;
    /// integrators use it to bound step lengths so that no crossing is skipped.
    bool distance_like = false;
};

/// Everything needed to build a ChartMetric.
struct ChartDefinition {
    std::string name;
    int dim = 0;
    std::function<Matrix(const Vector&)> metric;
    std::function<Christoffel(const Vector&)> christoffel;  // optional
    std::function<double(const Vector&)> scale;              // optional local length scale
    std::vector<Constraint> constraints;
};

/// A coordinate chart carrying a Riemannian metric. Immutable once built.
class ChartMetric {
public:
    ChartMetric() = default;
    explicit ChartMetric(ChartDefinition def);

    int dim() const { return def_.dim; }
    const std::string& name() const { return def_.name; }

    /// Raw metric evaluation, no domain check.
    Matrix metric(const Vector& x) const { return def_.metric(x); }

    bool has_analytic_christoffel() const { return static_cast<bool>(def_.christoffel); }
    Christoffel analytic_christoffel(const Vector& x) const { return def_.christoffel(x); }

    /// Local metric length scale used to size finite-difference steps.
    double scale(const Vector& x) const { return def_.scale ? def_.scale(x) : 1.0; }

    const std::vector<Constraint>& constraints() const { return def_.constraints; }

    /// Name of the first violated constraint, if any.
    std::optional<std::string> violated(const Vector& x) const;
    bool contains(const Vector& x) const { return !violated(x).has_value(); }

    const ChartDefinition& definition() const { return def_; }

private:
    ChartDefinition def_;
};

struct FiniteDifference {
    /// Relative step; the absolute step is rel_step * chart.scale(x).
    double rel_step = 1e-4;
    /// Condition number of g beyond which differencing is refused.
    double max_condition = 1e12;
};

/// g(x); throws DomainError naming the violated predicate.
Matrix metric_at(const ChartMetric& chart, const Vector& x);

/// Partial derivatives ∂ₐg by central differences, one matrix per coordinate.
std::vector<Matrix> metric_derivatives(const ChartMetric& chart, const Vector& x, double h);

/// Levi-Civita coefficients from central differences of the metric with step h
/// (h <= 0 selects rel_step * scale). Requires x ± 2h·eₐ inside the domain.
Christoffel christoffel_fd(const ChartMetric& chart, const Vector& x, double h = 0.0,
                           const FiniteDifference& fd = {});

/// Analytic coefficients when the chart provides them, finite differences otherwise.
Christoffel christoffel(const ChartMetric& chart, const Vector& x, const FiniteDifference& fd = {});

/// Levi-Civita coefficients from a metric and its derivatives.
Christoffel levi_civita(const Matrix& g, const std::vector<Matrix>& dg);

/// max |∇ₖgᵢⱼ| / max|g| for the given coefficients.
double metric_compatibility_residual(const ChartMetric& chart, const Vector& x, const Christoffel& gamma);

/// Riemann tensor Rˡₖᵢⱼ with R(∂ᵢ,∂ⱼ)∂ₖ = Rˡₖᵢⱼ ∂ₗ.
class Riemann {
public:
    explicit Riemann(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
    int dim() const { return dim_; }
    double& operator()(int l, int k, int i, int j) { return data_[idx(l, k, i, j)]; }
    double operator()(int l, int k, int i, int j) const { return data_[idx(l, k, i, j)]; }

private:
    std::size_t idx(int l, int k, int i, int j) const {
        return static_cast<std::size_t>(((l * dim_ + k) * dim_ + i) * dim_ + j);
    }
    int dim_;
    std::vector<double> data_;
};

using ConnectionFn = std::function<Christoffel(const Vector&)>;

/// Curvature of an arbitrary torsion-free connection, differentiating its
/// coefficients with central differences of step h.
Riemann riemann_of(const ConnectionFn& connection, const Vector& x, double h);

Riemann riemann(const ChartMetric& chart, const Vector& x, const FiniteDifference& fd = {});

/// |R|² = R_{lkij} R^{lkij}, indices moved with g.
double curvature_norm(const Riemann& r, const Matrix& g);
double curvature_norm(const ChartMetric& chart, const Vector& x, const FiniteDifference& fd = {});

/// g(R(X,Y)Y, X) / (|X|²|Y|² − g(X,Y)²)
double sectional_curvature(const Riemann& r, const Matrix& g, const Vector& X, const Vector& Y);

/// Smallest eigenvalue of the symmetrised metric; positive iff positive-definite.
double min_eigenvalue(const Matrix& g);
double symmetry_defect(const Matrix& g);

/// Chart with a metric multiplied by lambda² (lengths scale by lambda).
ChartMetric rescaled(const ChartMetric& chart, double lambda);

// ---------------------------------------------------------------------------
// Embedded surfaces

using Point3 = Eigen::Vector3d;
using Param2 = Eigen::Vector2d;
using Jacobian32 = Eigen::Matrix<double, 3, 2>;

/// A rectangle of parameter space on which the immersion is regular.
struct ParameterPatch {
    std::string name;
    Param2 lower;
    Param2 upper;
    bool contains(const Param2& u) const {
        return (u.array() > lower.array()).all() && (u.array() < upper.array()).all();
    }
};

/// An ambient isometry together with its action on parameters, so that
/// immersion(on_params(u)) == ambient(immersion(u)).
struct SurfaceSymmetry {
    std::string name;
    std::function<Point3(const Point3&)> ambient;
    std::function<Param2(const Param2&)> on_params;
};

struct EmbeddedSurface {
    std::string name;
    std::function<Point3(const Param2&)> immersion;
    std::function<Jacobian32(const Param2&)> jacobian;  // optional analytic derivative
    std::vector<ParameterPatch> atlas;
    std::vector<SurfaceSymmetry> symmetries;
    /// Parameter-space predicates excluded from every patch (declared singular loci).
    std::vector<Constraint> singular;
};

/// Central-difference Jacobian of the immersion.
Jacobian32 numerical_jacobian(const EmbeddedSurface& s, const Param2& u, double h = 1e-6);

/// Gram matrix JᵀJ of the immersion; analytic Jacobian when provided.
Matrix first_fundamental_form(const EmbeddedSurface& s, const Param2& u);

/// The induced metric on patch `patch` as a chart (constraints: patch box + singular set).
ChartMetric induced_chart(const EmbeddedSurface& s, std::size_t patch = 0);

struct SymmetryResidual {
    double position = 0.0;  // |immersion(σu) − S(immersion(u))|
    double metric = 0.0;    // |dσᵀ I(σu) dσ − I(u)|
};

SymmetryResidual symmetry_residual(const EmbeddedSurface& s, const SurfaceSymmetry& sym, const Param2& u);

}  // namespace weyllab
