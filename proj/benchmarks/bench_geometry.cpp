// Pointwise geometry: metric derivatives, Christoffels, curvature, Weyl terms.
#include "weyllab/catalog.hpp"
#include "weyllab/charts.hpp"

#include <benchmark/benchmark.h>

using namespace weyllab;

namespace {

Vector point(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) x[i++] = c;
    return x;
}

void BM_ChristoffelAnalytic(benchmark::State& st) {
    const auto chart = charts::cone(charts::sphere_stereographic());
    const Vector x = point({1.3, 0.2, -0.4});
    for (auto _ : st) benchmark::DoNotOptimize(christoffel(chart, x));
}
BENCHMARK(BM_ChristoffelAnalytic);

void BM_ChristoffelFiniteDifference(benchmark::State& st) {
    const auto chart = induced_chart(charts::ellipsoid(1.0, 1.5, 2.0));
    const Vector x = point({1.1, 0.4});
    for (auto _ : st) benchmark::DoNotOptimize(christoffel_fd(chart, x));
}
BENCHMARK(BM_ChristoffelFiniteDifference);

void BM_CurvatureNorm(benchmark::State& st) {
    const auto chart = induced_chart(charts::ellipsoid(1.0, 1.5, 2.0));
    const Vector x = point({1.1, 0.4});
    for (auto _ : st) benchmark::DoNotOptimize(curvature_norm(chart, x));
}
BENCHMARK(BM_CurvatureNorm);

void BM_WeylChristoffel(benchmark::State& st) {
    const auto cone = catalog::cone_over_ellipsoid(1.0, 1.5, 2.0);
    const Vector x = point({0.2, 1.1, 0.4});
    for (auto _ : st) benchmark::DoNotOptimize(weyl_christoffel(cone.weyl, x));
}
BENCHMARK(BM_WeylChristoffel);

void BM_TameForm(benchmark::State& st) {
    const auto cone = catalog::cone_over_sphere();
    const Vector x = point({0.2, 0.3, -0.1});
    for (auto _ : st) benchmark::DoNotOptimize(tame_form(cone.weyl, x));
}
BENCHMARK(BM_TameForm);

void BM_Genus2Projection(benchmark::State& st) {
    const catalog::Genus2Surface s;
    const Point3 p(0.05, 0.3, 1.6);
    for (auto _ : st) benchmark::DoNotOptimize(s.project(p));
}
BENCHMARK(BM_Genus2Projection);

}  // namespace

BENCHMARK_MAIN();
