#pragma once

#include "weyllab/geodesic.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

namespace weyllab {

/// Unit directions at x: g₀-unit (g₀ = φ²g) when the Lee form has a
/// potential, g-unit otherwise. Parametrised by points u of the Euclidean unit
/// sphere through X = φ⁻¹L⁻ᵀu with g = LLᵀ.
class DirectionFrame {
public:
    DirectionFrame(const WeylStructure& w, const Vector& x);
    Vector operator()(const Vector& u) const;
    /// Dimension 2: the direction at angle α.
    Vector at_angle(double alpha) const;
    /// Inverse map, u = φLᵀX / |φLᵀX|.
    Vector coordinates(const Vector& X) const;
    int dim() const { return static_cast<int>(inv_lt_.rows()); }

private:
    Matrix inv_lt_;
    Matrix lt_;
    double phi_ = 1.0;
};

/// Deterministic sphere sample: evenly spaced angles with a seeded phase in
/// dimension 2 (nested under doubling of count), seeded Gaussian otherwise.
std::vector<Vector> sphere_sample(int dim, int count, std::uint64_t seed);

struct ScanOptions {
    int directions_per_point = 64;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    GeodesicOptions geodesic;
};

/// One record per (point, unit direction), ordered point-major.
std::vector<LifetimeRecord> lifetime_scan(const WeylStructure& w, const std::vector<Vector>& points,
                                          const ScanOptions& opt = {});

struct MuOptions {
    int n_directions = 64;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    /// Refinement around the worst direction; 0 disables it.
    std::size_t refine_iterations = 60;
    GeodesicOptions geodesic;
};

struct MuEstimate {
    std::optional<double> sampled;  // max over the direction sample alone
    std::optional<double> value;    // after refinement (≥ sampled)
    Vector direction;               // direction realising `value`
    std::size_t incomplete = 0;     // incomplete directions in the sample
    std::size_t evaluations = 0;
    bool censored() const { return !value.has_value(); }
};

/// Supremum of incomplete life-times over unit directions at x.
MuEstimate mu_estimate(const WeylStructure& w, const Vector& x, const MuOptions& opt = {});

struct DeltaEstimate {
    double value = 0.0;
    bool upper_bound = false;  // true when estimated from life-times rather than a closed form
};

/// min of incomplete life-times over the direction sample; an upper bound for δ.
std::optional<DeltaEstimate> delta_from_lifetimes(const WeylStructure& w, const Vector& x, const MuOptions& opt = {});

using PointValue = std::pair<Vector, double>;

struct QuasiLinearity {
    double k1 = 0.0;  // min ratio
    double k2 = 0.0;  // max ratio
    double spread = 0.0;
};

/// Ratio bounds of values against δ on matching points.
QuasiLinearity quasi_linearity_test(const std::vector<PointValue>& values, const std::vector<PointValue>& delta,
                                    double point_tol = 1e-9);

enum class TameVerdict { tame_consistent, non_tame_witness, inconclusive };
std::string to_string(TameVerdict v);

struct VerdictThresholds {
    double non_tame_spread = 50.0;
    double tame_spread = 5.0;
    std::size_t min_levels = 3;
};

/// Verdict from per-level ratio bounds (levels are successive dyadic scales).
TameVerdict classify(const std::vector<QuasiLinearity>& levels, const VerdictThresholds& th = {});

struct TameWitness {
    std::string kind;            // "divergent-ratio" or "double-ended-geodesic"
    std::vector<double> spreads;  // cumulative spread after each level
    std::optional<double> t_minus;
    std::optional<double> t_plus;
    Vector point;
    Vector direction;
};

struct TameReport {
    std::vector<PointValue> mu_samples;
    std::vector<PointValue> delta_samples;
    std::vector<QuasiLinearity> levels;
    std::pair<double, double> ratio_bounds{0.0, 0.0};
    bool delta_upper_bound = false;
    TameVerdict verdict = TameVerdict::inconclusive;
    std::optional<TameWitness> witness;
    std::size_t censored = 0;  // points without any incomplete direction
};

using DeltaFn = std::function<double(const Vector&)>;

/// μ against δ over point sets at successive scales. δ comes from `delta`
/// when given, from life-times otherwise.
TameReport tame_report(const WeylStructure& w, const std::vector<std::vector<Vector>>& levels,
                       const DeltaFn& delta, const MuOptions& opt = {}, const VerdictThresholds& th = {});

struct ProbeOptions {
    int samples_per_cap = 64;
    /// Refinement budget in geodesic evaluations per radius; 0 disables it.
    std::size_t refine_iterations = 1024;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    GeodesicOptions geodesic;
};

struct ProbeLevel {
    double radius = 0.0;
    bool found = false;
    Vector vector;  // an incomplete vector within `radius` of X
    double angle = 0.0;  // its angular distance from X
    std::optional<double> lifetime;
    std::size_t evaluations = 0;
};

struct WeakTameProbe {
    Vector x;
    Vector X;
    std::vector<ProbeLevel> levels;
    /// Incomplete vectors found at every radius: evidence that ℐ accumulates at X.
    bool accumulates() const {
        return !levels.empty() && std::all_of(levels.begin(), levels.end(), [](const ProbeLevel& l) { return l.found; });
    }
};

/// Searches caps of decreasing angular radius around the complete vector X for
/// incomplete vectors of the same length.
WeakTameProbe weak_tame_probe(const WeylStructure& w, const Vector& x, const Vector& X,
                              const std::vector<double>& radii, const ProbeOptions& opt = {});

}  // namespace weyllab
