#pragma once

#include "weyllab/common.hpp"

#include <initializer_list>
#include <random>

namespace testing {

inline weyllab::Vector vec(std::initializer_list<double> v) {
    weyllab::Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

inline weyllab::Vector uniform(std::mt19937_64& rng, const weyllab::Vector& lo, const weyllab::Vector& hi) {
    weyllab::Vector out(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        out[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    return out;
}

inline weyllab::Vector gaussian(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n01;
    weyllab::Vector out(dim);
    for (int i = 0; i < dim; ++i) out[i] = n01(rng);
    return out;
}

}  // namespace testing
