#include "mgritsl/mgrit.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mgritsl/errors.hpp"

namespace mgritsl {
namespace {

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

void add_into(std::span<double> out, std::span<const double> v) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
}

// Sequential time stepping u_n = Phi u_{n-1} + g_n on one level.
void forward_substitute(const Stepper& phi, SpaceTime& u, const SpaceTime* g) {
  for (int n = 1; n < u.points(); ++n) {
    phi.step(u.at(n - 1), u.at(n));
    if (g) add_into(u.at(n), g->at(n));
  }
}

// Restricted residual and its squared norm, summed per interval and reduced
// in interval order so the result does not depend on the thread count.
double residual_at_c_points(const TimeGridProblem& problem, int level, const SpaceTime& u,
                            const SpaceTime* g, SpaceTime* coarse, int threads) {
  const auto& phi = problem.steppers[level];
  const int m = problem.factors[level];
  const int intervals = (u.points() - 1) / m;
  const int nx = u.nx();
  std::vector<double> partial(static_cast<std::size_t>(intervals), 0.0);
#pragma omp parallel num_threads(thread_count(threads))
  {
    Vector r(static_cast<std::size_t>(nx));
#pragma omp for schedule(static)
    for (int k = 1; k <= intervals; ++k) {
      const int n = k * m;
      phi.step(u.at(n - 1), r);
      const auto un = u.at(n);
      double sum = 0.0;
      for (int i = 0; i < nx; ++i) {
        if (g) r[i] += g->at(n)[i];
        r[i] -= un[i];
        sum += r[i] * r[i];
      }
      partial[k - 1] = sum;
      if (coarse) std::copy(r.begin(), r.end(), coarse->at(k).begin());
    }
  }
  return std::sqrt(std::accumulate(partial.begin(), partial.end(), 0.0));
}

void correct_c_points(const TimeGridProblem& problem, int level, SpaceTime& u, const SpaceTime& e,
                      int threads) {
  const int m = problem.factors[level];
#pragma omp parallel for schedule(static) num_threads(thread_count(threads))
  for (int k = 1; k < e.points(); ++k) add_into(u.at(k * m), e.at(k));
}

void cycle(const TimeGridProblem& problem, const MgritConfig& config, int level, SpaceTime& u,
           const SpaceTime* g, bool skip_first_f, double* restricted_norm) {
  const int coarsest = config.cycle == Cycle::two_level ? 1 : problem.levels() - 1;
  if (level >= coarsest) {
    forward_substitute(problem.steppers[level], u, g);
    return;
  }
  if (!skip_first_f) f_relax(problem, level, u, g, config.threads);
  for (int i = 0; i < config.nu; ++i) {
    c_relax(problem, level, u, g, config.threads);
    f_relax(problem, level, u, g, config.threads);
  }
  SpaceTime r(problem.points(level + 1), u.nx());
  const double norm = residual_at_c_points(problem, level, u, g, &r, config.threads);
  if (restricted_norm) *restricted_norm = norm;

  // Error equation e_k = Psi e_{k-1} + r_k from e_0 = 0.
  SpaceTime e(r.points(), r.nx());
  cycle(problem, config, level + 1, e, &r, false, nullptr);
  correct_c_points(problem, level, u, e, config.threads);
  f_relax(problem, level, u, g, config.threads);
}

}  // namespace

std::string to_string(Cycle c) { return c == Cycle::two_level ? "two-level" : "v"; }

std::string to_string(CoarseKind k) {
  switch (k) {
    case CoarseKind::modified:
      return "modified";
    case CoarseKind::rediscretized:
      return "rediscretized";
    case CoarseKind::plain_sl:
      return "plain_sl";
    case CoarseKind::ideal:
      return "ideal";
  }
  return "?";
}

int TimeGridProblem::points(int level) const {
  int nt_level = nt;
  for (int l = 0; l < level; ++l) nt_level /= factors[l];
  return nt_level + 1;
}

void TimeGridProblem::validate() const {
  if (steppers.empty()) throw InputError("time-grid problem without a fine stepper");
  if (factors.size() + 1 != steppers.size()) {
    throw InputError("time-grid problem needs one coarsening factor per coarse level");
  }
  if (nt < 1) throw InputError("time-grid problem needs n_t >= 1");
  if (u0.size() != static_cast<std::size_t>(nx())) {
    throw DimensionError("initial condition has " + std::to_string(u0.size()) +
                         " values on a mesh of " + std::to_string(nx()) + " points");
  }
  int nt_level = nt;
  for (std::size_t l = 0; l < factors.size(); ++l) {
    if (steppers[l + 1].nx() != nx()) throw DimensionError("coarse stepper on a different mesh");
    if (factors[l] < 2 || nt_level % factors[l] != 0) {
      throw InputError("level " + std::to_string(l) + " with " + std::to_string(nt_level) +
                       " steps cannot be coarsened by " + std::to_string(factors[l]));
    }
    nt_level /= factors[l];
  }
}

void MgritConfig::validate() const {
  if (nu < 0) throw InputError("nu must be non-negative");
  if (max_iters < 1) throw InputError("max_iters must be at least 1");
  if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
}

std::vector<int> coarsening_factors(int nt, std::span<const int> requested, Cycle cycle) {
  if (requested.empty()) throw InputError("no coarsening factor given");
  for (int m : requested) {
    if (m < 2) throw InputError("coarsening factors must be at least 2");
  }
  if (cycle == Cycle::two_level) {
    if (nt % requested[0] != 0) {
      throw InputError("n_t = " + std::to_string(nt) + " is not divisible by m = " +
                       std::to_string(requested[0]));
    }
    return {requested[0]};
  }
  std::vector<int> factors;
  int nt_level = nt;
  for (std::size_t i = 0;; ++i) {
    const int m = requested[std::min(i, requested.size() - 1)];
    if (nt_level % m != 0 || nt_level / m < 1) break;
    factors.push_back(m);
    nt_level /= m;
  }
  if (factors.empty()) {
    throw InputError("n_t = " + std::to_string(nt) + " cannot be coarsened by m = " +
                     std::to_string(requested[0]));
  }
  return factors;
}

CorrectionSolver default_correction_solver(const DiscretizationSpec& fine, Cycle cycle) {
  if (fine.family != Family::erk || cycle == Cycle::two_level) return CorrectionSolver::direct();
  return CorrectionSolver::gmres(1e-2, fine.p == 1 ? 10 : 20);
}

Vector default_initial_condition(int nx) {
  Vector u(static_cast<std::size_t>(nx));
  const double h = DiscretizationSpec::kDomainLength / nx;
  for (int i = 0; i < nx; ++i) u[i] = std::pow(std::sin(std::numbers::pi * (-1.0 + i * h)), 4);
  return u;
}

TimeGridProblem build_problem(const DiscretizationSpec& fine, CoarseKind kind, Cycle cycle,
                              std::span<const int> requested_factors,
                              std::optional<CorrectionSolver> solver) {
  TimeGridProblem problem;
  problem.nt = fine.nt;
  problem.u0 = default_initial_condition(fine.nx);
  problem.factors = coarsening_factors(fine.nt, requested_factors, cycle);
  problem.steppers.push_back(fine_stepper(fine));

  const auto correction = solver.value_or(default_correction_solver(fine, cycle));
  int m_total = 1;
  for (std::size_t l = 0; l < problem.factors.size(); ++l) {
    m_total *= problem.factors[l];
    const std::span<const int> upto(problem.factors.data(), l + 1);
    switch (kind) {
      case CoarseKind::modified:
        problem.steppers.push_back(
            modified_coarse_stepper(fine, tableau_for(fine), upto, correction));
        break;
      case CoarseKind::rediscretized:
        problem.steppers.push_back(rediscretized_coarse_stepper(fine, tableau_for(fine), m_total));
        break;
      case CoarseKind::plain_sl:
        problem.steppers.push_back(plain_sl_coarse_stepper(fine, m_total));
        break;
      case CoarseKind::ideal:
        problem.steppers.push_back(ideal_coarse_stepper(problem.steppers.front(), m_total));
        break;
    }
  }
  problem.validate();
  return problem;
}

SpaceTime sequential_solve(const TimeGridProblem& problem) {
  SpaceTime u(problem.nt + 1, problem.nx());
  std::copy(problem.u0.begin(), problem.u0.end(), u.at(0).begin());
  forward_substitute(problem.steppers.front(), u, nullptr);
  return u;
}

void f_relax(const TimeGridProblem& problem, int level, SpaceTime& u, const SpaceTime* g,
             int threads) {
  const auto& phi = problem.steppers[level];
  const int m = problem.factors[level];
  const int intervals = (u.points() - 1) / m;
#pragma omp parallel for schedule(static) num_threads(thread_count(threads))
  for (int k = 0; k < intervals; ++k) {
    for (int j = 1; j < m; ++j) {
      const int n = k * m + j;
      phi.step(u.at(n - 1), u.at(n));
      if (g) add_into(u.at(n), g->at(n));
    }
  }
}

void c_relax(const TimeGridProblem& problem, int level, SpaceTime& u, const SpaceTime* g,
             int threads) {
  const auto& phi = problem.steppers[level];
  const int m = problem.factors[level];
  const int intervals = (u.points() - 1) / m;
#pragma omp parallel for schedule(static) num_threads(thread_count(threads))
  for (int k = 1; k <= intervals; ++k) {
    const int n = k * m;
    phi.step(u.at(n - 1), u.at(n));
    if (g) add_into(u.at(n), g->at(n));
  }
}

SpaceTime restrict_residual(const TimeGridProblem& problem, int level, const SpaceTime& u,
                            const SpaceTime* g, int threads) {
  SpaceTime r(problem.points(level + 1), u.nx());
  residual_at_c_points(problem, level, u, g, &r, threads);
  return r;
}

double c_point_residual_norm(const TimeGridProblem& problem, int level, const SpaceTime& u,
                             const SpaceTime* g, int threads) {
  return residual_at_c_points(problem, level, u, g, nullptr, threads);
}

void iterate(const TimeGridProblem& problem, SpaceTime& u, const MgritConfig& config) {
  config.validate();
  cycle(problem, config, 0, u, nullptr, false, nullptr);
}

SpaceTime initial_iterate(const TimeGridProblem& problem, std::uint64_t seed) {
  SpaceTime u(problem.nt + 1, problem.nx());
  std::copy(problem.u0.begin(), problem.u0.end(), u.at(0).begin());
  std::mt19937_64 rng(seed);
  auto& data = u.data();
  for (std::size_t i = problem.u0.size(); i < data.size(); ++i) {
    data[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return u;
}

SolveReport solve(const TimeGridProblem& problem, const MgritConfig& config) {
  problem.validate();
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  SolveReport report;
  report.solution = initial_iterate(problem, config.seed);
  auto& u = report.solution;
  double r0 = 0.0;
  for (int k = 1; k <= config.max_iters; ++k) {
    // Every cycle ends with an F-relaxation, so the leading F-sweep of the
    // next cycle would reproduce the same state.
    cycle(problem, config, 0, u, nullptr, k > 1, k == 1 ? &r0 : nullptr);
    if (k == 1) report.residual_norms.push_back(r0);
    const double rk = c_point_residual_norm(problem, 0, u, nullptr, config.threads);
    const double prev = report.residual_norms.back();
    report.residual_norms.push_back(rk);
    report.iterations = k;
    report.effective_rho = prev > 0.0 ? rk / prev : 0.0;
    if (rk <= config.tolerance * r0) {
      report.converged = true;
      break;
    }
    if (!std::isfinite(rk)) break;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double distance(const SpaceTime& a, const SpaceTime& b) {
  if (a.data().size() != b.data().size()) throw DimensionError("space-time states differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double grid_distance(const SpaceTime& a, const SpaceTime& b, double h, double dt) {
  return std::sqrt(h * dt) * distance(a, b);
}

}  // namespace mgritsl
