#include <doctest.h>

#include <cmath>
#include <random>

#include "mgritsl/errors.hpp"
#include "mgritsl/mgrit.hpp"
#include "oracles.hpp"

using namespace mgritsl;

namespace {

DiscretizationSpec make_spec(Family f, int p, double c, int nx, int nt) {
  DiscretizationSpec s;
  s.family = f;
  s.p = s.q = p;
  s.cfl = c;
  s.nx = nx;
  s.nt = nt;
  return s;
}

TimeGridProblem two_level(const Stepper& fine, const Stepper& coarse, int m, int nt,
                          Vector u0) {
  TimeGridProblem p;
  p.steppers = {fine, coarse};
  p.factors = {m};
  p.nt = nt;
  p.u0 = std::move(u0);
  return p;
}

double max_point_residual(const TimeGridProblem& problem, const SpaceTime& u, int level_m,
                          bool f_points) {
  const auto& phi = problem.steppers.front();
  double worst = 0.0;
  for (int n = 1; n < u.points(); ++n) {
    if ((n % level_m != 0) != f_points) continue;
    const auto r = phi.step(u.at(n - 1));
    for (int i = 0; i < u.nx(); ++i) worst = std::max(worst, std::abs(r[i] - u.at(n)[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("sequential solve") {
  const auto u0 = oracle::random_vector(16, 1);
  const auto id = sl_stepper(1, 16.0, 16);  // a full-period shift is the identity
  auto p = two_level(id, id, 2, 8, u0);
  auto u = sequential_solve(p);
  for (int n = 0; n <= 8; ++n) CHECK(oracle::max_diff({u.at(n).begin(), u.at(n).end()}, u0) == 0.0);

  const auto shift = sl_stepper(3, 2.0, 16);
  p = two_level(shift, shift, 2, 8, u0);
  u = sequential_solve(p);
  for (int n = 0; n <= 8; ++n) {
    for (int i = 0; i < 16; ++i) CHECK(u.at(n)[i] == doctest::Approx(u0[((i - 2 * n) % 16 + 16) % 16]));
  }
}

TEST_CASE("relaxation sweeps") {
  const auto spec = make_spec(Family::sdirk, 3, 2.0, 32, 32);
  const int ms[] = {4};
  const auto problem = build_problem(spec, CoarseKind::modified, Cycle::two_level, ms);
  auto u = initial_iterate(problem, 3);
  f_relax(problem, 0, u, nullptr, 1);
  CHECK(max_point_residual(problem, u, 4, true) < 1e-13);
  auto twice = u;
  f_relax(problem, 0, twice, nullptr, 1);
  CHECK(distance(u, twice) == 0.0);
  c_relax(problem, 0, u, nullptr, 1);
  CHECK(max_point_residual(problem, u, 4, false) < 1e-13);
}

TEST_CASE("relaxation over one interval reproduces time stepping") {
  const auto spec = make_spec(Family::erk, 3, 0.5, 32, 4);
  const int ms[] = {4};
  const auto problem = build_problem(spec, CoarseKind::modified, Cycle::two_level, ms);
  auto u = initial_iterate(problem, 9);
  f_relax(problem, 0, u, nullptr, 1);
  c_relax(problem, 0, u, nullptr, 1);
  CHECK(distance(u, sequential_solve(problem)) < 1e-14);
}

TEST_CASE("restricted residual") {
  const auto spec = make_spec(Family::erk, 1, 0.5, 16, 8);
  const int ms[] = {4};
  const auto problem = build_problem(spec, CoarseKind::modified, Cycle::two_level, ms);
  const auto exact = sequential_solve(problem);
  CHECK(c_point_residual_norm(problem, 0, exact, nullptr) < 1e-14);

  SpaceTime u(9, 16);
  std::copy(problem.u0.begin(), problem.u0.end(), u.at(0).begin());
  f_relax(problem, 0, u, nullptr, 1);
  const auto r = restrict_residual(problem, 0, u, nullptr, 1);
  CHECK(r.points() == 3);
  const auto expected = exact.at(4);
  CHECK(oracle::max_diff({r.at(1).begin(), r.at(1).end()}, {expected.begin(), expected.end()}) < 1e-14);
}

TEST_CASE("ideal coarse operator converges in one iteration") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 4; ++trial) {
    const int m = 2 << (rng() % 3);
    const auto spec = make_spec(trial % 2 ? Family::sdirk : Family::erk, 1 + rng() % 5, 0.3, 32, 8 * m);
    const int ms[] = {m};
    const auto problem = build_problem(spec, CoarseKind::ideal, Cycle::two_level, ms);
    MgritConfig cfg;
    cfg.nu = 0;
    cfg.seed = rng();
    const auto rep = solve(problem, cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
  }
}

TEST_CASE("identity propagation converges in one iteration") {
  const auto u0 = oracle::random_vector(8, 2);
  const auto id = sl_stepper(1, 8.0, 8);  // a full-period shift is the identity
  const auto p = two_level(id, id, 2, 8, u0);
  const auto rep = solve(p, MgritConfig{});
  CHECK(rep.iterations == 1);
  CHECK(rep.converged);
}

TEST_CASE("converged iterate matches sequential time stepping") {
  const int ms[] = {4};
  for (auto cycle : {Cycle::two_level, Cycle::v_cycle}) {
    for (auto f : {Family::erk, Family::sdirk}) {
      const auto spec = make_spec(f, 3, f == Family::erk ? 1.0 : 3.0, 64, 256);
      const auto problem = build_problem(spec, CoarseKind::modified, cycle, ms);
      const auto rep = solve(problem, MgritConfig{.cycle = cycle});
      REQUIRE(rep.converged);
      const auto exact = sequential_solve(problem);
      CHECK(grid_distance(rep.solution, exact, spec.h(), spec.dt()) <= 1e-9);
    }
  }
}

TEST_CASE("iteration counts do not depend on the thread count") {
  const auto spec = make_spec(Family::erk, 1, 0.85, 64, 256);
  const int ms[] = {4};
  const auto problem = build_problem(spec, CoarseKind::modified, Cycle::v_cycle, ms);
  MgritConfig one{.cycle = Cycle::v_cycle, .threads = 1};
  MgritConfig four{.cycle = Cycle::v_cycle, .threads = 4};
  const auto a = solve(problem, one);
  const auto b = solve(problem, four);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual_norms == b.residual_norms);
}

TEST_CASE("rediscretized coarse grid diverges for large coarse CFL") {
  // Enough coarse intervals that finite-step exactness cannot mask the divergence.
  const auto spec = make_spec(Family::sdirk, 3, 6.0, 64, 4096);
  const int ms[] = {16};
  const auto problem = build_problem(spec, CoarseKind::rediscretized, Cycle::two_level, ms);
  const auto rep = solve(problem, MgritConfig{});
  CHECK_FALSE(rep.converged);
  CHECK(rep.effective_rho > 1.0);
}

TEST_CASE("coarsening hierarchy") {
  const int m4[] = {4};
  CHECK(coarsening_factors(256, m4, Cycle::two_level) == std::vector<int>{4});
  CHECK(coarsening_factors(256, m4, Cycle::v_cycle) == std::vector<int>{4, 4, 4, 4});
  const int m8[] = {8};
  CHECK(coarsening_factors(256, m8, Cycle::v_cycle) == std::vector<int>{8, 8});
  CHECK_THROWS_AS(coarsening_factors(250, m4, Cycle::two_level), InputError);
  const int m1[] = {1};
  CHECK_THROWS_AS(coarsening_factors(256, m1, Cycle::two_level), InputError);
}

TEST_CASE("correction solver policy") {
  const auto erk = make_spec(Family::erk, 3, 1.0, 64, 256);
  CHECK(default_correction_solver(erk, Cycle::two_level).kind == CorrectionSolver::Kind::direct);
  const auto g = default_correction_solver(erk, Cycle::v_cycle);
  CHECK(g.kind == CorrectionSolver::Kind::gmres);
  CHECK(g.max_iters == 20);
  CHECK(default_correction_solver(make_spec(Family::erk, 1, 0.5, 64, 256), Cycle::v_cycle).max_iters == 10);
  CHECK(default_correction_solver(make_spec(Family::sdirk, 3, 1.0, 64, 256), Cycle::v_cycle).kind ==
        CorrectionSolver::Kind::direct);
}

TEST_CASE("initial iterate is reproducible") {
  const auto spec = make_spec(Family::erk, 1, 0.5, 16, 8);
  const int ms[] = {2};
  const auto problem = build_problem(spec, CoarseKind::modified, Cycle::two_level, ms);
  const auto a = initial_iterate(problem, 42);
  const auto b = initial_iterate(problem, 42);
  CHECK(distance(a, b) == 0.0);
  CHECK(distance(a, initial_iterate(problem, 43)) > 0.0);
  for (std::size_t i = 16; i < a.data().size(); ++i) {
    CHECK(a.data()[i] >= 0.0);
    CHECK(a.data()[i] < 1.0);
  }
}

TEST_CASE("invalid configurations") {
  MgritConfig cfg;
  cfg.nu = -1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  TimeGridProblem p;
  CHECK_THROWS_AS(p.validate(), InputError);
}
