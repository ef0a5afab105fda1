#include "weyllab/optimize.hpp"

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cstdint>
#include <memory>

namespace weyllab {

Minimum1D minimize_1d(const std::function<double(double)>& f, double a, double b, std::size_t max_iter) {
    if (!(b > a)) throw ArgumentError("minimize_1d: empty bracket");
    std::size_t evals = 0;
    auto counted = [&](double x) {
        ++evals;
        return f(x);
    };
    std::uintmax_t iters = max_iter;
    const auto [x, fx] = boost::math::tools::brent_find_minima(counted, a, b, 40, iters);
    return {x, fx, evals};
}

namespace {

struct Objective {
    const std::function<double(const Vector&)>* f;
    std::size_t evaluations = 0;
};

double trampoline(const gsl_vector* v, void* params) {
    auto* obj = static_cast<Objective*>(params);
    Vector x(static_cast<Eigen::Index>(v->size));
    for (std::size_t i = 0; i < v->size; ++i) x[static_cast<Eigen::Index>(i)] = gsl_vector_get(v, i);
    ++obj->evaluations;
    return (*obj->f)(x);
}

}  // namespace

MinimumND minimize_nd(const std::function<double(const Vector&)>& f, const Vector& x0, double step,
                      std::size_t max_iter, double size_tol) {
    const auto n = static_cast<std::size_t>(x0.size());
    if (n == 0) throw ArgumentError("minimize_nd: empty start point");
    // Library errors are reported through return codes, never by aborting.
    static const bool quiet = (gsl_set_error_handler_off(), true);
    (void)quiet;
    Objective obj{&f};
    gsl_multimin_function fn{&trampoline, n, &obj};

    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0[static_cast<Eigen::Index>(i)]);
    gsl_vector_set_all(ss.get(), step);

    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());
    for (std::size_t it = 0; it < max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tol) == GSL_SUCCESS) break;
    }
    MinimumND out;
    out.x.resize(x0.size());
    for (std::size_t i = 0; i < n; ++i) out.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(s->x, i);
    out.value = s->fval;
    out.evaluations = obj.evaluations;
    return out;
}

}  // namespace weyllab
