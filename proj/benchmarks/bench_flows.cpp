// Integrations and the scans built on them.
#include "weyllab/catalog.hpp"
#include "weyllab/charts.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace weyllab;

namespace {

Vector point(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) x[i++] = c;
    return x;
}

void BM_ConeRadialLifetime(benchmark::State& st) {
    const auto cone = catalog::cone_over_circle(5.0);
    for (auto _ : st) benchmark::DoNotOptimize(lifetime(cone.weyl, point({0.5, 0.3}), point({-1.0, 0.0}), 100.0));
}
BENCHMARK(BM_ConeRadialLifetime);

void BM_StripLifetime(benchmark::State& st) {
    const auto w = WeylStructure::levi_civita(catalog::build_strip_S());
    const double a = 0.01;
    for (auto _ : st)
        benchmark::DoNotOptimize(lifetime(w, point({2.0, 0.0}), point({std::cos(a), std::sin(a)}), 1e4));
}
BENCHMARK(BM_StripLifetime);

void BM_EllipsoidConeGeodesic(benchmark::State& st) {
    const auto cone = catalog::cone_over_ellipsoid(1.0, 1.5, 2.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(integrate(cone.weyl, point({0.0, 1.1, 0.4}), point({0.3, 0.4, -0.5}), 5.0));
}
BENCHMARK(BM_EllipsoidConeGeodesic);

void BM_LifetimeScan(benchmark::State& st) {
    const auto cone = catalog::cone_over_circle(5.0);
    const std::vector<Vector> pts{point({0.0, 0.1}), point({-0.4, 1.0}), point({0.3, 2.0}), point({0.6, -1.0})};
    ScanOptions opt;
    opt.directions_per_point = 32;
    opt.horizon = 20.0;
    opt.workers = static_cast<unsigned>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(lifetime_scan(cone.weyl, pts, opt));
}
BENCHMARK(BM_LifetimeScan)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void BM_MuEstimate(benchmark::State& st) {
    const auto cone = catalog::cone_over_sphere();
    MuOptions opt;
    opt.n_directions = 32;
    for (auto _ : st) benchmark::DoNotOptimize(mu_estimate(cone.weyl, point({0.4, 0.3, -0.2}), opt));
}
BENCHMARK(BM_MuEstimate);

void BM_ParallelTransportLoop(benchmark::State& st) {
    const auto cone = catalog::cone_over_ellipsoid(1.0, 1.5, 2.0);
    const Path loop = Path::arc(point({0.0, 1.1, 0.4}), point({1, 0, 0}), point({0, 1, 0}), 0.1, 0.0,
                                2.0 * std::numbers::pi);
    for (auto _ : st) benchmark::DoNotOptimize(parallel_transport(cone.weyl, loop));
}
BENCHMARK(BM_ParallelTransportLoop);

void BM_Genus2SurfaceGeodesic(benchmark::State& st) {
    const catalog::Genus2Surface s;
    const Point3 p0 = s.P(0);
    const Point3 v0 = Point3(1.0, 0.0, -0.2).normalized();
    for (auto _ : st) benchmark::DoNotOptimize(catalog::surface_geodesic(s, p0, v0, 5.0));
}
BENCHMARK(BM_Genus2SurfaceGeodesic);

}  // namespace

BENCHMARK_MAIN();
