#pragma once

#include "weyllab/weyl.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace weyllab {

/// A C¹ curve piece parametrised over [0, 1].
struct PathSegment {
    std::function<Vector(double)> position;
    std::function<Vector(double)> velocity;
    std::string label;
};

class Path {
public:
    Path() = default;
    explicit Path(std::vector<PathSegment> segments) : segments_(std::move(segments)) {}

    static Path polyline(const std::vector<Vector>& points);
    /// Arc c + r(cos a e₁ + sin a e₂), a from a0 to a1.
    static Path arc(const Vector& center, const Vector& e1, const Vector& e2, double radius, double a0, double a1);

    Path then(const Path& next) const;
    Path reversed() const;
    Vector start() const;
    Vector end() const;
    const std::vector<PathSegment>& segments() const { return segments_; }
    /// Points at `per_segment` evenly spaced parameters of each segment.
    std::vector<Vector> sample(int per_segment = 16) const;
    std::string label() const;

private:
    std::vector<PathSegment> segments_;
};

/// Solves dVᵏ/dτ + Γ̃ᵏᵢⱼ ẋⁱ Vʲ = 0 along the path; returns the matrix P with
/// V(end) = P V(start) in coordinate components. SingularityError when the
/// path enters the guard band of a singular locus.
Matrix parallel_transport(const WeylStructure& w, const Path& path, double tol = 1e-11,
                          const FiniteDifference& fd = {});

struct HolonomySample {
    Vector base;
    Matrix frame;                   // columns: g-orthonormal basis at base (also g₀-orthogonal)
    std::vector<Matrix> elements;   // frame⁻¹ P frame
    std::vector<std::string> loops;  // provenance
    bool full = false;               // true when transports are composed with a group element
    double orthogonality_residual = 0.0;  // max |AᵀA − I| over elements (restricted mode)
};

/// g-orthonormal frame at x (columns).
Matrix orthonormal_frame(const WeylStructure& w, const Vector& x);

/// Holonomy element of a closed loop at its base, in the orthonormal frame.
Matrix holonomy_element(const WeylStructure& w, const Path& loop, double tol = 1e-11);

struct LoopFamily {
    double reach = 0.5;     // max coordinate distance from base to circuit centre
    double radius = 0.1;    // circuit radius, as a fraction of the centre's local scale
    int max_attempts = 64;  // redraws when a loop leaves the domain
};

/// n randomized lasso loops: out along a segment, once around a small circle
/// in a random coordinate 2-plane, and back.
HolonomySample holonomy_scan(const WeylStructure& w, const Vector& base, const LoopFamily& family, int n,
                             std::uint64_t seed = 1, unsigned workers = 1, double tol = 1e-11);

/// A deck transformation: point map together with its differential.
struct DeckTransformation {
    std::string name;
    std::function<Vector(const Vector&)> map;
    std::function<Matrix(const Vector&)> jacobian;  // numerical when empty
};

/// Full-holonomy element for the loop in the quotient closed by `h`: transport
/// from x to h(x) along `path`, pulled back by dh⁻¹.
Matrix full_holonomy_element(const WeylStructure& w, const Path& path, const DeckTransformation& h,
                             double tol = 1e-11);

enum class HolonomyLabel { trivial, reducible, irreducible_generic, complex_candidate };
std::string to_string(HolonomyLabel l);

struct Decomposition {
    std::vector<int> dims;       // sorted descending
    std::vector<Matrix> bases;   // orthonormal columns, same order as dims
    bool trivial = false;
    double residual = 0.0;       // max ‖(I − P)AP‖ over elements and blocks
    HolonomyLabel label = HolonomyLabel::irreducible_generic;
    std::optional<Matrix> complex_structure;  // J with J² = −I commuting with the sample
};

/// Finest orthogonal decomposition invariant under every element, found from
/// the symmetric commutant of the sample.
Decomposition invariant_subspaces(const std::vector<Matrix>& elements, double tol = 1e-4);
Decomposition invariant_subspaces(const HolonomySample& sample, double tol = 1e-4);

struct FlatnessCertificate {
    double max_norm = 0.0;  // max of |R| · scale² over the sample
    Vector argmax;
    bool flat = false;
};

/// |R| of the connection (weighted by the square of the chart scale) against
/// the threshold.
FlatnessCertificate flatness_certificate(const WeylStructure& w, const std::vector<Vector>& points,
                                         double threshold = 1e-6, const FiniteDifference& fd = {});

}  // namespace weyllab
