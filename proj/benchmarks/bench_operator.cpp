// Microbenchmarks of the hot paths: operator application in 2D/3D, a full
// Taylor step, and 1D operator construction.

#include "pmlwave/experiment.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace pmlwave;

RunConfig bench_config(int dim, int degree) {
  RunConfig cfg;
  cfg.dim = dim;
  cfg.degree = degree;
  cfg.x_min_km = -60; cfg.x_max_km = 60;
  cfg.y_min_km = 0;   cfg.y_max_km = 50;
  cfg.dx_km = 10;
  if (dim == 3) {
    cfg.x_min_km = 0; cfg.x_max_km = 5;
    cfg.y_min_km = 0; cfg.y_max_km = 5;
    cfg.z_min_km = 0; cfg.z_max_km = 5;
    cfg.dx_km = 5.0 / 9.0;
    cfg.quadrature = QuadKind::GL;
    cfg.pml_x = cfg.pml_y = cfg.pml_z = "both";
    cfg.pml_delta_km = 0.55;
    cfg.pml_tol = 1e-3;
  } else {
    cfg.pml_x = "both";
    cfg.pml_delta_km = 10;
    cfg.pml_d0_per_s = 8.0;
  }
  return cfg;
}

void fill_random(State& q) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : q.data) v = u(rng);
}

void bench_apply(benchmark::State& state, int dim) {
  RunConfig cfg = bench_config(dim, 4);
  Scene scene = build_scene(cfg);
  RhsContext ctx = scene_context(scene);
  State q(ctx.layout), dq(ctx.layout);
  fill_random(q);
  for (auto _ : state) {
    apply_operator(ctx, q, dq);
    benchmark::DoNotOptimize(dq.data.data());
  }
  state.SetItemsProcessed(state.iterations() * ctx.layout.size());
}

void BM_apply_operator_2d(benchmark::State& state) { bench_apply(state, 2); }
void BM_apply_operator_3d(benchmark::State& state) { bench_apply(state, 3); }

void BM_taylor_step(benchmark::State& state) {
  RunConfig cfg = bench_config(2, 4);
  Scene scene = build_scene(cfg);
  RhsContext ctx = scene_context(scene);
  TaylorStepper stepper(ctx, cfg.degree + 1);
  State q(ctx.layout);
  fill_random(q);
  const double dt = cfl_dt(scene.mesh, scene.material, cfg.degree, 1e-3);
  double t = 0;
  for (auto _ : state) {
    stepper.step(q, t, dt);
    t += dt;
    benchmark::DoNotOptimize(q.data.data());
  }
}

void BM_build_operators(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Operators1D op = build_operators(QuadKind::GLL, degree);
    benchmark::DoNotOptimize(op.D.data());
  }
}

} // namespace

BENCHMARK(BM_apply_operator_2d)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_apply_operator_3d)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_taylor_step)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_build_operators)->Arg(4)->Arg(8)->Arg(12);

BENCHMARK_MAIN();
