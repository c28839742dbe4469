#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgritsl/stepping.hpp"

namespace mgritsl {

/// n_t + 1 time points of n_x values each, stored contiguously.
class SpaceTime {
 public:
  SpaceTime() = default;
  SpaceTime(int points, int nx) : points_(points), nx_(nx), data_(std::size_t(points) * nx, 0.0) {}

  int points() const { return points_; }
  int nx() const { return nx_; }
  std::span<double> at(int n) { return {data_.data() + std::size_t(n) * nx_, std::size_t(nx_)}; }
  std::span<const double> at(int n) const {
    return {data_.data() + std::size_t(n) * nx_, std::size_t(nx_)};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  int points_ = 0;
  int nx_ = 0;
  std::vector<double> data_;
};

/// The all-at-once system u_0 = u0, u_n = Phi u_{n-1} (n = 1..n_t) together
/// with its time-grid hierarchy. steppers[0] is the fine Phi, steppers[l]
/// the coarse operator of level l; factors[l] coarsens level l to l + 1.
struct TimeGridProblem {
  std::vector<Stepper> steppers;
  std::vector<int> factors;
  int nt = 0;
  Vector u0;

  int nx() const { return steppers.front().nx(); }
  int levels() const { return static_cast<int>(steppers.size()); }
  /// Number of time points on a level, n_t / (m_0 ... m_{l-1}) + 1.
  int points(int level) const;
  /// Throws InputError if the hierarchy is inconsistent.
  void validate() const;
};

enum class Cycle { two_level, v_cycle };
enum class CoarseKind { modified, rediscretized, plain_sl, ideal };

std::string to_string(Cycle c);
std::string to_string(CoarseKind k);

/// Per-level coarsening factors. Two-level: the first requested factor.
/// V-cycle: requested factors in order, the last one repeated, while the
/// level divides evenly and keeps at least two time points.
std::vector<int> coarsening_factors(int nt, std::span<const int> requested, Cycle cycle);

/// Linear solves inside modified coarse steppers: direct for SDIRK and for
/// two-level ERK; GMRES (tol 1e-2, at most 10 iterations for ERK1, 20
/// otherwise) for multilevel ERK.
CorrectionSolver default_correction_solver(const DiscretizationSpec& fine, Cycle cycle);

/// u0(x) = sin^4(pi x) on the mesh of [-1, 1).
Vector default_initial_condition(int nx);

/// Builds the fine stepper and one coarse stepper per level.
TimeGridProblem build_problem(const DiscretizationSpec& fine, CoarseKind kind, Cycle cycle,
                              std::span<const int> requested_factors,
                              std::optional<CorrectionSolver> solver = std::nullopt);

struct MgritConfig {
  int nu = 1;  // F(CF)^nu pre-relaxation
  Cycle cycle = Cycle::two_level;
  int max_iters = 30;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: OpenMP default

  void validate() const;
};

struct SolveReport {
  /// ||r_0||, ||r_1||, ...: l2 norms of all C-point residuals. r_0 is
  /// restricted in the first cycle; r_k is taken after the final
  /// F-relaxation of iteration k.
  std::vector<double> residual_norms;
  int iterations = 0;
  double effective_rho = 0.0;  // ||r_k|| / ||r_{k-1}|| at the last iteration
  bool converged = false;
  double wall_seconds = 0.0;
  SpaceTime solution;
};

/// Forward substitution u_n = Phi u_{n-1} from u0 on the fine grid.
SpaceTime sequential_solve(const TimeGridProblem& problem);

/// u_n <- Phi_l u_{n-1} + g_n over the F-points of every CF-interval of
/// `level`. g == nullptr means g_n = 0.
void f_relax(const TimeGridProblem& problem, int level, SpaceTime& u, const SpaceTime* g,
             int threads = 0);
/// u_n <- Phi_l u_{n-1} + g_n at every C-point n > 0 of `level`.
void c_relax(const TimeGridProblem& problem, int level, SpaceTime& u, const SpaceTime* g,
             int threads = 0);
/// Coarse right-hand side r_k = g_{km} + Phi_l u_{km-1} - u_{km} (k >= 1;
/// r_0 = 0), on the points of level + 1.
SpaceTime restrict_residual(const TimeGridProblem& problem, int level, const SpaceTime& u,
                            const SpaceTime* g, int threads = 0);
/// ||r|| over the C-points of `level`.
double c_point_residual_norm(const TimeGridProblem& problem, int level, const SpaceTime& u,
                             const SpaceTime* g, int threads = 0);

/// One MGRIT cycle on the fine level.
void iterate(const TimeGridProblem& problem, SpaceTime& u, const MgritConfig& config);

/// Random initial iterate: u0 at t = 0, uniform [0, 1) values elsewhere.
SpaceTime initial_iterate(const TimeGridProblem& problem, std::uint64_t seed);

/// Iterates from initial_iterate until ||r_k|| / ||r_0|| <= tolerance or
/// max_iters. Divergence is reported, not thrown.
SolveReport solve(const TimeGridProblem& problem, const MgritConfig& config);

/// Global l2 norm of a - b.
double distance(const SpaceTime& a, const SpaceTime& b);

/// Mesh-weighted l2 norm of a - b: sqrt(h dt sum (a - b)^2).
double grid_distance(const SpaceTime& a, const SpaceTime& b, double h, double dt);

}  // namespace mgritsl
