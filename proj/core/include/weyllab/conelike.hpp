#pragma once

#include "weyllab/geodesic.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace weyllab {

using PointMap = std::function<Vector(const Vector&)>;

/// A homothety of (M₀, g₀) given as a coordinate map with a declared ratio.
struct Generator {
    std::string name;
    double ratio = 2.0;  // must exceed 1
    PointMap forward;
    PointMap inverse;
};

struct Letter {
    int generator = 0;
    long exponent = 0;
};
/// Letters act right to left: {a, b} means a ∘ b.
using Word = std::vector<Letter>;

/// Finitely generated group of homotheties with a distance oracle.
class HomothetyGroup {
public:
    HomothetyGroup() = default;
    /// `distance_tag` documents where distances come from ("closed-form",
    /// "shooting-upper-bound", "ambient-lower-bound", ...).
    HomothetyGroup(std::vector<Generator> generators, DistanceFn distance, std::string distance_tag = "closed-form");

    const std::vector<Generator>& generators() const { return gens_; }
    std::size_t size() const { return gens_.size(); }
    double distance(const Vector& x, const Vector& y) const { return distance_(x, y); }
    const DistanceFn& distance_fn() const { return distance_; }
    const std::string& distance_tag() const { return tag_; }

    Vector apply(const Word& w, const Vector& x) const;
    /// ∏ ρᵢ^{aᵢ}
    double ratio(const Word& w) const;
    /// D_x = max over generators of d(x, hᵢ(x)).
    double displacement(const Vector& x) const;

private:
    std::vector<Generator> gens_;
    DistanceFn distance_;
    std::string tag_;
};

Word concat(const Word& a, const Word& b);
Word inverse(const Word& w);
/// Exponent sums per generator (the image of w in ℤⁿ for abelian groups).
std::vector<long> exponent_vector(const HomothetyGroup& g, const Word& w);

/// Measured distortion max |d(hx, hy)/(ρ d(x, y)) − 1| over the given pairs.
double homothety_residual(const HomothetyGroup& g, std::size_t generator,
                          const std::vector<std::pair<Vector, Vector>>& pairs);

/// True when every word with ratio 1 fixes every sample point (no isometries
/// besides the identity).
bool isometry_free(const HomothetyGroup& g, const std::vector<Word>& words, const std::vector<Vector>& points,
                   double tol = 1e-9);

/// K_x = D_x (∏ ρᵢ/(ρᵢ − 1) + 1)
double k_bound(const HomothetyGroup& g, const Vector& x);

/// D_x ∏ (ρᵢ^{aᵢ+1} − 1)/(ρᵢ − 1) for non-negative exponents.
double word_bound(const HomothetyGroup& g, const Vector& x, const std::vector<long>& exponents);

/// Word h₁^{a₁} ∘ … ∘ hₙ^{aₙ} from an exponent vector.
Word word_from_exponents(const std::vector<long>& exponents);

struct BoundCheck {
    Word word;
    double ratio = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double margin() const { return bound - measured; }
    bool holds() const { return measured < bound; }
};

/// d(f^m x, f^n x) against d(x, fx) ρ^m/(1 − ρ) for contracting f, 0 ≤ m ≤ n.
BoundCheck cauchy_contraction(const HomothetyGroup& g, const Vector& x, const Word& f, int m, int n);

/// d(x, fx) against K_x for a contracting word f.
BoundCheck contraction_check(const HomothetyGroup& g, const Vector& x, const Word& f);

/// Random words with ρ < 1: exponents uniform in [−max_exponent, max_exponent],
/// rejected until contracting.
std::vector<Word> random_contracting_words(const HomothetyGroup& g, std::size_t count, long max_exponent,
                                           std::uint64_t seed);

/// Where a point sits relative to the fundamental domain Ω. `level` must
/// increase by log ρᵢ under each generator; Ω ⊂ {lo ≤ level < hi}.
struct FundamentalDomain {
    std::function<bool(const Vector&)> contains;
    std::function<double(const Vector&)> level;
    double lo = 0.0;
    double hi = 1.0;
};

struct Reduction {
    Word word;  // word(x) ∈ Ω
    Vector image;
};

/// Greedy ratio normalisation into Ω; CoverageError beyond `budget` letters.
Reduction reduce_to_domain(const HomothetyGroup& g, const FundamentalDomain& omega, const Vector& x,
                           std::size_t budget = 64);

/// The weight-1 equivariant extension ψ(x) = ψ₀(f x)/ρ(f) of ψ₀ given on Ω.
class EquivariantExtension {
public:
    EquivariantExtension(HomothetyGroup g, FundamentalDomain omega, std::function<double(const Vector&)> values,
                         std::size_t budget = 64);
    double operator()(const Vector& x) const;
    Reduction reduce(const Vector& x) const { return reduce_to_domain(g_, omega_, x, budget_); }

private:
    HomothetyGroup g_;
    FundamentalDomain omega_;
    std::function<double(const Vector&)> values_;
    std::size_t budget_;
};

EquivariantExtension equivariant_extend(const HomothetyGroup& g, const FundamentalDomain& omega,
                                        std::function<double(const Vector&)> values, std::size_t budget = 64);

/// The completion point ω with the functions and constants attached to it.
struct SingularityModel {
    std::string omega;  // how ω appears in coordinates
    std::function<double(const Vector&)> delta;
    double kappa = 1.0;
    std::function<double(const Vector&)> sigma;
    double k1 = 1.0;
    double k2 = 1.0;
    std::function<double(const Vector&)> phi;  // conformal factor, g₀ = φ²g
};

struct BallInclusion {
    double r_tilde = 0.0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;  // max d₀(x, y)/r over the sample
    bool holds() const { return violations == 0; }
};

/// Points at g-distance just under r̃ = r/(k₂(δ(x) + r)); `g_sphere(x, ρ)`
/// returns points at g-distance ρ from x, `distance0` measures d₀.
BallInclusion ball_inclusion_check(const Vector& x, double r, const SingularityModel& model,
                                   const std::function<std::vector<Vector>(const Vector&, double)>& g_sphere,
                                   const DistanceFn& distance0);

struct Disjointness {
    std::size_t balls = 0;
    double min_gap = 0.0;  // min over pairs of d(cᵢ, cⱼ) − rᵢ − rⱼ
    bool disjoint() const { return min_gap > 0.0; }
};

/// Balls B_{γ(qⁿ)}(ρqⁿ), n = 1..n_max, along an arc-length curve γ ending at ω.
Disjointness disjointness_scan(const std::function<Vector(double)>& gamma, double rho, double q, int n_max,
                               const DistanceFn& distance);

/// Largest admissible q for a given ρ < κ: k₁(κ − ρ)/(k₂(ρ + 1)).
double disjointness_q_limit(const SingularityModel& model, double rho);

struct ShootingDistance {
    double distance = 0.0;  // length of the best connecting geodesic found
    double residual = 0.0;  // coordinate miss |exp_x(V) − y|
    std::string tag = "shooting-upper-bound";
};

/// Two-point shooting for the Levi-Civita connection of `metric`: minimises
/// |exp_x(V) − y| from several starts; the length of V bounds d(x, y) above.
ShootingDistance shooting_distance(const ChartMetric& metric, const Vector& x, const Vector& y,
                                   int restarts = 4, std::uint64_t seed = 1);

}  // namespace weyllab
