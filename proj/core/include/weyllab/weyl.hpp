#pragma once

#include "weyllab/manifold.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace weyllab {

/// Sign of the g(X,Y)θ♯ term in the Weyl connection. `consistent` is the one
/// for which D_X g = −2θ(X)g holds; `flipped` is kept for comparison.
enum class LeeSign { consistent, flipped };

std::string to_string(LeeSign sign);
LeeSign lee_sign_from_string(const std::string& name);

struct LeeForm {
    std::string kind = "zero";  // descriptive tag, carried into reports
    std::function<Vector(const Vector&)> value;
    /// J(i, j) = ∂ᵢθⱼ; finite differences when absent.
    std::function<Matrix(const Vector&)> jacobian;
    /// φ with θ = d log φ on the chart (the local parallel metric is φ²g).
    std::function<double(const Vector&)> potential;
    bool closed = true;
};

LeeForm zero_lee_form(int dim);
/// θ = c (constant components); exact with potential exp(c·x).
LeeForm constant_lee_form(const Vector& c);
/// θ = dxᵃ, e.g. ds on a cylinder ℝ × N.
LeeForm coordinate_lee_form(int dim, int axis);
/// θ = dψ for ψ = Σ aᵢ cos(xᵢ); exact with potential exp(ψ).
LeeForm cosine_gradient_lee_form(const Vector& amplitudes);

/// A reference metric g in the conformal class together with the Lee form of
/// the Weyl connection D with respect to g.
class WeylStructure {
public:
    WeylStructure() = default;
    WeylStructure(ChartMetric reference, LeeForm lee, LeeSign sign = LeeSign::consistent);

    /// The Levi-Civita connection of g (θ = 0).
    static WeylStructure levi_civita(ChartMetric reference);

    const ChartMetric& reference() const { return reference_; }
    const LeeForm& lee() const { return lee_; }
    LeeSign sign() const { return sign_; }
    int dim() const { return reference_.dim(); }
    bool closed() const { return lee_.closed; }
    bool has_potential() const { return static_cast<bool>(lee_.potential); }
    /// True when θ vanishes identically (D is the Levi-Civita connection of g).
    bool is_levi_civita() const { return lee_.kind == "zero"; }

    Vector theta(const Vector& x) const { return lee_.value(x); }
    double potential(const Vector& x) const { return lee_.potential ? lee_.potential(x) : 1.0; }

    WeylStructure with_sign(LeeSign sign) const { return WeylStructure(reference_, lee_, sign); }

private:
    ChartMetric reference_;
    LeeForm lee_;
    LeeSign sign_ = LeeSign::consistent;
};

/// ∂ᵢθⱼ, analytic when available.
Matrix lee_jacobian(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// (∇ᵢθ)ⱼ = ∂ᵢθⱼ − Γᵏᵢⱼθₖ for the Levi-Civita connection of g.
Matrix lee_covariant_derivative(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// Γ̃ᵏᵢⱼ = Γᵏᵢⱼ + δᵏⱼθᵢ + δᵏᵢθⱼ ∓ gᵢⱼθᵏ.
Christoffel weyl_christoffel(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// max over coordinate directions of max|D_X g + 2θ(X)g|.
double check_parallel_metric(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// max |∂ᵢθⱼ − ∂ⱼθᵢ|
double closedness_residual(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// max |∂ log φ − θ| when a potential is declared, 0 otherwise.
double potential_residual(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// The same connection described with respect to g' = e^{2f}g: θ' = θ − df.
WeylStructure conformal_change(const WeylStructure& w, std::function<double(const Vector&)> f,
                               std::function<Vector(const Vector&)> df);

/// Curvature tensor of D.
Riemann weyl_riemann(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

// ---------------------------------------------------------------------------
// Analytic tameness

/// Symmetric matrix A with Q(X) = XᵀAX = |θ|²g(X,X) + (∇_Xθ)(X).
Matrix tame_form(const WeylStructure& w, const Vector& x, const FiniteDifference& fd = {});

/// g-unit vectors at a point: evenly spaced angles with a random phase in
/// dimension 2, normalised Gaussian samples otherwise.
std::vector<Vector> unit_directions(const Matrix& g, int count, std::mt19937_64& rng);

struct SphereBundleSample {
    std::vector<Vector> points;
    int directions_per_point = 64;
    std::uint64_t seed = 1;
};

struct TameViolation {
    Vector point;
    Vector direction;
};

struct AnalyticTameReport {
    double epsilon_best = 0.0;  // ½ min Q over the sample
    double min_margin = 0.0;    // min Q over the sample
    std::size_t sample_size = 0;
    Vector argmin_point;
    Vector argmin_direction;
    /// Set when min_margin <= 0.
    std::optional<TameViolation> violating_point;
    bool positive() const { return min_margin > 0.0; }
};

/// Samples Q over unit vectors. The caller asserts that the reference metric
/// is complete.
AnalyticTameReport analytic_tame_check(const WeylStructure& w, const SphereBundleSample& sample,
                                       unsigned workers = 1, const FiniteDifference& fd = {});

struct Tame2Comparison {
    double margin_tame = 0.0;   // |θ|²g(X,X) + (∇_Xθ)(X) − 2εg(X,X)
    double margin_tame2 = 0.0;  // (D_Xθ)(X) − 2εg(X,X) + 2θ(X)²
    double residual = 0.0;      // |margin_tame − margin_tame2|
};

/// Evaluates both forms of the tameness inequality, the second through the
/// Weyl connection, so that their agreement checks the connection.
Tame2Comparison tame2_check(const WeylStructure& w, const Vector& x, const Vector& X, double eps = 0.0,
                            const FiniteDifference& fd = {});

}  // namespace weyllab
