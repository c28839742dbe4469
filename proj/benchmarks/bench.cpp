#include <benchmark/benchmark.h>

#include <random>

#include "mgritsl/lfa.hpp"
#include "mgritsl/mgrit.hpp"
#include "mgritsl/stencils.hpp"

using namespace mgritsl;

namespace {

Vector random_vector(int n) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(static_cast<std::size_t>(n));
  for (auto& x : v) x = dist(rng);
  return v;
}

DiscretizationSpec make_spec(Family f, int p, double c, int nx, int nt) {
  DiscretizationSpec s;
  s.family = f;
  s.p = s.q = p;
  s.cfl = c;
  s.nx = nx;
  s.nt = nt;
  return s;
}

void BM_CirculantApply(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const auto op = power(upwind_derivative(3, nx), static_cast<int>(state.range(1)));
  const auto v = random_vector(nx);
  Vector out(v.size());
  for (auto _ : state) {
    op.apply(v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["width"] = static_cast<double>(op.stencil().size());
}
BENCHMARK(BM_CirculantApply)->ArgsProduct({{256, 1024, 4096}, {1, 8}});

void BM_CirculantSolve(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const auto op = add(CirculantOperator::identity(nx), scale(upwind_derivative(3, nx), 2.0));
  const CirculantInverse inv(op);
  const auto v = random_vector(nx);
  Vector out(v.size());
  for (auto _ : state) {
    inv.solve(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_CirculantSolve)->Arg(256)->Arg(1024)->Arg(4096);

void BM_GmresCorrection(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const auto d4 = high_derivative_operator(4, 2, StencilBias::symmetric, nx);
  const auto op = add(CirculantOperator::identity(nx), scale(d4, -0.4));
  const auto b = random_vector(nx);
  for (auto _ : state) benchmark::DoNotOptimize(solve_gmres(op, b, 1e-2, 20));
}
BENCHMARK(BM_GmresCorrection)->Arg(1024)->Arg(4096);

void BM_FineStep(benchmark::State& state) {
  const auto family = static_cast<Family>(state.range(0));
  const auto mode = static_cast<ApplyMode>(state.range(1));
  const double c = family == Family::erk ? 1.2 : 5.0;
  const auto phi = fine_stepper(make_spec(family, 3, c, 1024, 1), mode);
  const auto v = random_vector(1024);
  Vector out(v.size());
  for (auto _ : state) {
    phi.step(v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(phi.label());
}
BENCHMARK(BM_FineStep)->ArgsProduct({{0, 1}, {0, 1}});

void BM_ModifiedCoarseStep(benchmark::State& state) {
  const auto spec = make_spec(Family::sdirk, 3, 5.0, 1024, 1);
  const auto psi = modified_coarse_stepper(spec, tableau_for(spec), static_cast<int>(state.range(0)),
                                           1, CorrectionSolver::direct());
  const auto v = random_vector(1024);
  Vector out(v.size());
  for (auto _ : state) {
    psi.step(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ModifiedCoarseStep)->Arg(4)->Arg(16);

void BM_MgritIteration(benchmark::State& state) {
  const auto cycle = static_cast<Cycle>(state.range(0));
  const auto spec = make_spec(Family::erk, 3, 1.38, 256, 1024);
  const int ms[] = {4};
  const auto problem = build_problem(spec, CoarseKind::modified, cycle, ms);
  MgritConfig cfg;
  cfg.cycle = cycle;
  auto u = initial_iterate(problem, 1);
  for (auto _ : state) iterate(problem, u, cfg);
  state.SetLabel(to_string(cycle));
}
BENCHMARK(BM_MgritIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LfaSweep(benchmark::State& state) {
  const auto spec = make_spec(Family::erk, 3, 1.38, 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lfa_sweep(spec, CoarseKind::modified, 8, 1));
}
BENCHMARK(BM_LfaSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
