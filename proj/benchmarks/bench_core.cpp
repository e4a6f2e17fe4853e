#include <benchmark/benchmark.h>

#include "wagner/catalog.hpp"
#include "wagner/ode.hpp"
#include "wagner/wagner_lift.hpp"

namespace {

using namespace wagner;

void bench_profile_jet(benchmark::State& state) {
    const SurfaceChart torus = builtin("torus");
    double v = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(torus.profile()->jet(v));
        v += 1e-6;
    }
}
BENCHMARK(bench_profile_jet);

void bench_frame_core_revolution(benchmark::State& state) {
    const SurfaceChart torus = builtin("torus");
    double v = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(frame_core(torus, {0.0, v}));
        v += 1e-6;
    }
}
BENCHMARK(bench_frame_core_revolution);

void bench_curvature_embedding(benchmark::State& state) {
    const SurfaceChart ell = builtin("ellipsoid");
    double v = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(curvature(ell, {0.4, v}));
        v += 1e-7;
    }
}
BENCHMARK(bench_curvature_embedding);

void bench_grad_curvature_embedding(benchmark::State& state) {
    const SurfaceChart ell = builtin("ellipsoid");
    double v = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grad_curvature(ell, {0.4, v}));
        v += 1e-7;
    }
}
BENCHMARK(bench_grad_curvature_embedding);

void bench_lift_tables(benchmark::State& state) {
    const SurfaceChart torus = builtin("torus");
    for (auto _ : state) {
        benchmark::DoNotOptimize(lift_curvature(torus, {0.1, 0.7}));
    }
}
BENCHMARK(bench_lift_tables);

void bench_integrate_projected_torus(benchmark::State& state) {
    const SurfaceChart torus = builtin("torus");
    IntegratorConfig cfg;
    cfg.t1 = 10.0;
    cfg.detect_events = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            integrate_projected(torus, {0.0, 0.4, 0.6, 0.8, 0.0}, 1.0, cfg));
    }
}
BENCHMARK(bench_integrate_projected_torus);

void bench_integrate_lifted_sphere(benchmark::State& state) {
    const SurfaceChart sphere = builtin("sphere");
    IntegratorConfig cfg;
    cfg.t1 = 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            integrate_lifted(sphere, {0.0, 1.2, 0.0, 0.5, 0.4, 0.45, 0.0}, cfg));
    }
}
BENCHMARK(bench_integrate_lifted_sphere);

}  // namespace

BENCHMARK_MAIN();
