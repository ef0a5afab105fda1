#pragma once

#include "weyllab/ode.hpp"
#include "weyllab/weyl.hpp"

#include <iosfwd>
#include <optional>

namespace weyllab {

struct GeodesicState {
    double t = 0.0;
    Vector x;
    Vector v;
    double F = 0.0;  // g(v,v)^{-1/2}
    double H = 0.0;  // θ(v)
    std::optional<double> slope;
};

enum class Termination { hit_singular_set, f_collapse, horizon, chart_exit, step_failure };
enum class LifetimeStatus { incomplete, complete_to_horizon, undetermined };

std::string to_string(Termination t);
std::string to_string(LifetimeStatus s);
Termination termination_from_string(const std::string& s);
LifetimeStatus lifetime_status_from_string(const std::string& s);

struct GeodesicOptions {
    double tol = 1e-10;
    /// F-collapse fires when F/F(0) drops below this (Weyl structures with θ ≢ 0).
    double f_floor = 1e-6;
    /// Steps are capped at step_fraction · margin / |v|_g for distance-like constraints.
    double step_fraction = 0.5;
    FiniteDifference fd;
    std::size_t max_steps = 2'000'000;
    bool store_dense = true;
    /// For product charts: coordinates [0, product_split) form the first factor.
    int product_split = 0;
};

class Trajectory {
public:
    std::vector<GeodesicState> states;  // accepted steps
    ode::DenseOutput dense;
    Termination termination = Termination::horizon;
    std::string detail;       // name of the constraint that fired, or a failure message
    double t_end = 0.0;       // last integrated parameter
    double lifetime = 0.0;    // extrapolated parameter of the singular limit (incomplete only)
    /// min over steps of the point-locus margins and F/F(0): how close the path came to a singularity.
    double approach = std::numeric_limits<double>::infinity();
    std::size_t rejected = 0;

    bool incomplete() const {
        return termination == Termination::hit_singular_set || termination == Termination::f_collapse;
    }
    const GeodesicState& back() const { return states.back(); }
    /// (x, v) at parameter t from the dense output.
    std::pair<Vector, Vector> at(double t) const;
};

/// F, H (and slope when product_split > 0) at (x, v).
GeodesicState make_state(const WeylStructure& w, double t, const Vector& x, const Vector& v, int product_split = 0);

/// Solves ẍᵏ + Γ̃ᵏᵢⱼẋⁱẋʲ = 0 up to t_max or a termination event.
Trajectory integrate(const WeylStructure& w, const Vector& x0, const Vector& v0, double t_max,
                     const GeodesicOptions& opt = {});

/// γ(1) for γ(0) = x, γ̇(0) = X; IncompletenessError when the geodesic dies first.
Vector exp_map(const WeylStructure& w, const Vector& x, const Vector& X, const GeodesicOptions& opt = {});

struct LifetimeRecord {
    Vector x;
    Vector X;
    LifetimeStatus status = LifetimeStatus::complete_to_horizon;
    std::optional<double> lifetime;  // empty when censored at the horizon
    double horizon = 0.0;
    Termination termination = Termination::horizon;
    std::string detail;
    double approach = std::numeric_limits<double>::infinity();
};

LifetimeRecord lifetime(const WeylStructure& w, const Vector& x, const Vector& X, double horizon,
                        GeodesicOptions opt = {});

struct FHSeries {
    std::vector<double> t;
    std::vector<double> F;
    std::vector<double> H;
    double residual = 0.0;  // max |F' − FH|
    /// max of H + √ε/F (Lemma bound; ≤ 0 when it holds). Only with eps.
    std::optional<double> est_margin;
    /// max of F²·(2εF⁻² − 2H² − H') (≤ 0 when the tame inequality holds) over
    /// samples where spacing·|H| < 1e-2. Only with eps.
    std::optional<double> tame_margin;
    /// Interior parameters where H changes sign.
    std::vector<double> h_sign_changes;
};

/// Differentiates F along the dense output at uniform spacing.
FHSeries fh_series(const Trajectory& traj, const WeylStructure& w, std::optional<double> eps = std::nullopt,
                   double spacing = 1e-3);

/// (ε·g(X,X))^{-1/2}
double lifetime_bound(const WeylStructure& w, double eps, const Vector& x, const Vector& X);

using DistanceFn = std::function<double(const Vector&, const Vector&)>;

struct LeafExponentiation {
    std::vector<Vector> images;
    double residual = 0.0;  // max relative pairwise-distance distortion
};

/// Maps each sample point p to exp_p(X) and compares pairwise distances.
LeafExponentiation leaf_exponentiation(const WeylStructure& w, const std::vector<Vector>& leaf_points,
                                       const Vector& X, const DistanceFn& distance,
                                       const GeodesicOptions& opt = {});

/// For a unit-speed geodesic γ of the first factor and X parallel in the
/// second, the curve c(t) = exp_{γ(t)}(tX); returns the g-norms of the two
/// factor projections of ċ at each t (central differences).
std::vector<std::pair<double, double>> shear_projection_norms(const WeylStructure& w, int split,
                                                              const Trajectory& base, const Vector& X,
                                                              const std::vector<double>& ts,
                                                              const GeodesicOptions& opt = {});

/// CSV: t, x0.., v0.., F, H
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace weyllab
