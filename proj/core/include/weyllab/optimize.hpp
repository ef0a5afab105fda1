#pragma once

#include "weyllab/common.hpp"

#include <functional>

namespace weyllab {

struct Minimum1D {
    double x = 0.0;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Brent's golden-section/parabolic search for a minimum of f on [a, b].
Minimum1D minimize_1d(const std::function<double(double)>& f, double a, double b, std::size_t max_iter = 60);

struct MinimumND {
    Vector x;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Nelder–Mead simplex search started from x0 with initial edge lengths `step`.
MinimumND minimize_nd(const std::function<double(const Vector&)>& f, const Vector& x0, double step,
                      std::size_t max_iter = 200, double size_tol = 1e-10);

}  // namespace weyllab
