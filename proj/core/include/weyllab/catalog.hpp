#pragma once

#include "weyllab/conelike.hpp"
#include "weyllab/holonomy.hpp"
#include "weyllab/tame.hpp"

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

namespace weyllab::catalog {

// ---------------------------------------------------------------------------
// Metric cones and their quotients

/// Everything attached to the cone over a base (N, g_N): the cone chart
/// (t, x) carrying g₀ = dt² + t²g_N, the cylinder chart (s, x) carrying
/// g = ds² + g_N with t = eˢ, the Weyl structure θ = ds on the cylinder, and
/// the group generated by the expansion (t, x) ↦ (t/k, x).
struct Cone {
    ChartMetric cone;
    ChartMetric cylinder;
    WeylStructure weyl;   // on the cylinder chart
    WeylStructure exact;  // Levi-Civita of g₀ on the cone chart
    HomothetyGroup group; // acts on cone coordinates
    SingularityModel model;
    double k = 0.5;

    /// (s, x) ↦ (eˢ, x) and back.
    Vector to_cone(const Vector& cyl) const;
    Vector to_cylinder(const Vector& c) const;
    /// Ω = {1 ≤ t < 1/k} in cone coordinates.
    FundamentalDomain fundamental_domain() const;
};

/// Distance on the base; with it the cone distance has the closed form
/// √(t₁² + t₂² − 2t₁t₂ cos min(d_N, π)).
using BaseDistance = std::function<double(const Vector&, const Vector&)>;

/// ArgumentError unless 0 < k < 1 and the base metric is positive definite.
/// Without a base distance the group measures distances by shooting.
Cone build_cone(const ChartMetric& base, double k, BaseDistance base_distance = {},
                double apex_guard = 1e-6);

/// Cone over a circle of length L (coordinate φ of period 2π).
Cone cone_over_circle(double length, double k = 0.5);
/// Cone over the round unit sphere in stereographic coordinates: flat ℝ³∖{0}.
Cone cone_over_sphere(double k = 0.5);
/// Cone over the ellipsoid with semi-axes a, b, c in (θ, φ) coordinates.
Cone cone_over_ellipsoid(double a, double b, double c, double k = 0.5);

/// Distance on the flat cone over a circle of length L, through its
/// development: a sector of opening angle L.
double development_distance(double length, const Vector& p, const Vector& q);
/// Position of a cone point in the development plane (angle φ·L/2π).
Eigen::Vector2d develop(double length, const Vector& p);

/// Flat cone over a circle of length L with the two generators
/// (t, φ) ↦ (2t, φ) and (t, φ) ↦ (3t, φ + 1), development distances.
HomothetyGroup two_generator_group(double length = 2.0 * std::numbers::pi);

// ---------------------------------------------------------------------------
// Flat domains

/// S = {x > 1, x²y² < 1} with the punctures (n, 0), n ≥ 4, removed.
ChartMetric build_strip_S(double puncture_guard = 1e-6);

/// The flat cylinder S¹ × (a, b) in its cover coordinates (u, y).
ChartMetric build_cylinder_Z(double a, double b);

/// The flat unit-lattice torus punctured at ω, on the cover ℝ².
ChartMetric build_punctured_torus(const Eigen::Vector2d& puncture, double guard = 1e-6);

// ---------------------------------------------------------------------------
// Mapping tori

struct MappingTorus {
    ChartMetric base;
    Cone cone;                       // the cone over the base with the group replaced
    PointMap isometry;
    double rho = 2.0;                // the generator moves s by log ρ
    DeckTransformation deck;         // (s, x) ↦ (s + log ρ, isometry(x)) on the cylinder
    double isometry_residual = 0.0;  // max metric distortion measured on the samples
};

/// ArgumentError when the isometry distorts the base metric beyond `tol` on
/// the sample points.
MappingTorus build_mapping_torus(const ChartMetric& base, PointMap isometry, double rho,
                                 const std::vector<Vector>& samples, double tol = 1e-8);

// ---------------------------------------------------------------------------
// The genus-2 surface N₀

struct Genus2Profile {
    double tube_radius = 0.25;  // radius of the tunnel through each copy
    double blend = 0.08;        // width of the smooth-minimum fillet
};

/// The cone z = √(x² + y²) with, in every dyadic copy, a tunnel along the
/// x-direction at height 3/2·2ᵐ, filleted into the cone. Given implicitly by
/// F = 0 with F scale-covariant: F(2p) = 2F(p).
class Genus2Surface {
public:
    /// ConstructionError when the fillet leaves the cylinder y² + (z − 3/2)² ≤ 1/8.
    explicit Genus2Surface(Genus2Profile profile = {});

    const Genus2Profile& profile() const { return profile_; }

    double level(const Point3& p) const;
    Point3 gradient(const Point3& p) const;
    Eigen::Matrix3d hessian(const Point3& p) const;
    /// F with optional gradient and Hessian in one pass.
    double evaluate(const Point3& p, Point3* grad, Eigen::Matrix3d* hess) const { return eval(p, grad, hess); }
    /// (z − r)/√2: the level function of the raw cone.
    static double cone_level(const Point3& p);
    /// True where the surface may differ from the cone (inside a fillet/tube copy).
    bool modified(const Point3& p) const;

    /// Newton projection onto F = 0 along the gradient.
    Point3 project(const Point3& p, double tol = 1e-14) const;
    Point3 normal(const Point3& p) const { return gradient(p).normalized(); }

    Point3 P(int n) const;
    Point3 Q(int n) const;
    /// Circle kₙ: y² + (z − 3·2ⁿ⁻¹)² = r²4ⁿ in the plane x = 0.
    Point3 k_circle(int n, double angle) const;
    /// Half-lines c± = (0, ±t, t).
    static Point3 c_half_line(int sign, double t);

    static Point3 sx(const Point3& p) { return {-p.x(), p.y(), p.z()}; }
    static Point3 sy(const Point3& p) { return {p.x(), -p.y(), p.z()}; }
    static Point3 homothety(const Point3& p) { return 2.0 * p; }

    /// Monge patch over the tangent plane at p0: (u, v) ↦ p0 + u e₁ + v e₂ + h n.
    /// The apex and the loss of graph regularity bound the domain.
    ChartMetric local_chart(const Point3& p0) const;
    Point3 local_chart_point(const Point3& p0, const Vector& uv) const;
    /// Cone parametrisation (generator length t, azimuth φ) of the unmodified part.
    ChartMetric cone_chart() const;

    /// Random points of the fundamental copy (1 ≤ z < 2) on the surface.
    std::vector<Point3> sample(std::size_t count, std::uint64_t seed, bool modified_only = false) const;

private:
    Genus2Profile profile_;
    double F0(const Point3& p, Point3* grad, Eigen::Matrix3d* hess) const;
    double eval(const Point3& p, Point3* grad, Eigen::Matrix3d* hess) const;
};

struct SymmetryReport {
    double sx = 0.0;          // max distance of Sˣ(p) from the surface
    double sy = 0.0;
    double homothety = 0.0;   // max |F(2p)|/|∇F| over the sample
    double homothety_metric = 0.0;  // relative metric error between p and 2p local charts
    double cone_agreement = 0.0;    // max |F − cone level| outside the modified region
    std::size_t samples = 0;
};

SymmetryReport genus2_symmetry_report(const Genus2Surface& s, std::size_t samples, std::uint64_t seed);

/// The surface with its Levi-Civita structure on a local chart at P₀ and the
/// group generated by X ↦ 2X (ambient chord distances: lower bounds).
struct Genus2 {
    Genus2Surface surface;
    WeylStructure weyl;
    HomothetyGroup group;
};

Genus2 build_genus2(Genus2Profile profile = {});

struct SurfaceGeodesicOptions {
    double tol = 1e-12;
    double depth_floor = 1e-7;  // stop when |p| < depth_floor·|p₀|
    double escape = 8.0;        // stop when |p| > escape·|p₀|
    double stabilization = 1.0;  // constraint damping, in units of |v|/|p|
    std::size_t max_steps = 2'000'000;
    bool store_dense = false;
};

enum class SurfaceTermination { reached_apex, escaped, horizon, step_failure };
std::string to_string(SurfaceTermination t);

struct SurfaceTrajectory {
    std::vector<double> t;
    std::vector<Point3> p;
    std::vector<Point3> v;
    SurfaceTermination termination = SurfaceTermination::horizon;
    double t_end = 0.0;
    double min_depth = std::numeric_limits<double>::infinity();  // min |p|
    double lifetime = 0.0;        // extrapolated, reached_apex only
    std::vector<double> level_times;  // first time |p| < |p₀|·2⁻ʲ, j = 1, 2, ...
    double drift = 0.0;           // max |F(p)|/|∇F| along the path
    std::string detail;
    ode::DenseOutput dense;
};

/// Unit-speed geodesic of the embedded surface in ambient coordinates.
SurfaceTrajectory surface_geodesic(const Genus2Surface& s, const Point3& p0, const Point3& v0, double t_max,
                                   const SurfaceGeodesicOptions& opt = {});

struct WitnessOptions {
    double horizon = 40.0;       // in units of |Pₙ|
    int scan = 256;              // initial directions in (0, π/2)
    int rounds = 12;             // zoom rounds
    int per_round = 32;
    int candidates = 8;          // scan minima tried before giving up
    bool eps_relative = true;    // eps_list entries are fractions of T
    SurfaceGeodesicOptions geodesic;
    unsigned workers = 1;
};

struct WitnessRatio {
    double eps = 0.0;
    double short_length = 0.0;  // ε
    double long_length = 0.0;   // 2T − ε
    double ratio = 0.0;
};

struct WitnessLevel {
    double eps = 0.0;
    double mu_lower = 0.0;    // long-branch length from γ(T − ε): a lower bound for μ there
    double delta_upper = 0.0; // ε bounds the distance to ω from above
    Point3 point;
};

struct WitnessRecord {
    bool found = false;
    int n = 0;
    Point3 base;
    Point3 direction;
    double beta = 0.0;
    double t_plus = 0.0;
    double t_minus = 0.0;
    double depth = 0.0;             // min |p| reached by the forward branch
    double symmetry_defect = 0.0;   // |T₋ − T₊|/T₊
    std::vector<WitnessRatio> ratios;
    std::vector<WitnessLevel> levels;
    QuasiLinearity quasi_linearity;
    TameVerdict verdict = TameVerdict::inconclusive;
    std::size_t evaluations = 0;
    std::string diagnostics;
};

/// Aims the geodesic through Pₙ fixed by Sˣ∘Sʸ at the singularity, measures
/// both branch lifetimes and tabulates the length ratios (2T − ε)/ε.
WitnessRecord non_tame_witness(const Genus2Surface& s, int n, const std::vector<double>& eps_list,
                               const WitnessOptions& opt = {});

}  // namespace weyllab::catalog
