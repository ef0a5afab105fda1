#pragma once

#include "weyllab/manifold.hpp"

namespace weyllab::charts {

/// Euclidean metric on ℝⁿ, optionally restricted by extra constraints.
ChartMetric flat(int dim, std::vector<Constraint> constraints = {}, std::string name = "flat");

/// A circle of the given length in an angle coordinate φ ∈ ℝ (period 2π):
/// g = (L/2π)² dφ².
ChartMetric circle(double length);

/// Round sphere of radius r in stereographic coordinates from the south pole;
/// covers everything except that pole.
ChartMetric sphere_stereographic(double radius = 1.0);

/// Round sphere of radius r in polar coordinates (θ, φ), θ ∈ (0, π).
ChartMetric sphere_polar(double radius = 1.0);

/// Ellipsoid x²/a² + y²/b² + z²/c² = 1 parametrised by (θ, φ).
EmbeddedSurface ellipsoid(double a, double b, double c);

/// The Euclidean cone z = √(x²+y²) parametrised by generator arc length t > 0
/// and azimuth φ; induced metric dt² + ½t² dφ².
EmbeddedSurface rotation_cone();

struct Warp {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> df;
    /// lower bound of the radial coordinate (f > 0 on (r_min, ∞))
    double r_min = -std::numeric_limits<double>::infinity();
};

Warp linear_warp();       // f(r) = r, r > 0 — metric cones
Warp exponential_warp();  // f(r) = eʳ
Warp constant_warp(double c = 1.0);

/// dr² + f(r)² g_F on (r, x). Analytic Christoffels when the fiber has them.
ChartMetric warped(const ChartMetric& fiber, const Warp& warp, double apex_guard = 1e-6);

/// Metric cone dt² + t² g_N over the base chart; the apex t = 0 is a declared
/// singular locus with guard band apex_guard.
ChartMetric cone(const ChartMetric& base, double apex_guard = 1e-6);

/// Riemannian product g_A ⊕ g_B.
ChartMetric product(const ChartMetric& a, const ChartMetric& b);

/// ds² ⊕ g_N on (s, x): the reference metric of a cone's Weyl structure.
ChartMetric cylinder(const ChartMetric& base);

}  // namespace weyllab::charts
