#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace mgritsl::tools {

// ---- constants ----------------------------------------------------------

struct ConstantsRow {
  int p = 0;
  double e_fd = 0.0;
  double e_rk_erk = 0.0;
  double e_rk_sdirk = 0.0;
  double c_max = 0.0;
};

std::vector<ConstantsRow> compute_constants();
void cmd_constants(std::ostream& out);

// ---- sweep --------------------------------------------------------------

struct SweepRow {
  double c_value = 0.0;  // as configured (c / c_max for explicit schemes)
  double c = 0.0;        // absolute CFL number
  int m = 0;
  double rho_lfa = 0.0;
  double argmax_omega = 0.0;
  bool lfa_divergent = false;
  double rho_check = 0.0;     // NaN unless odd-p SDIRK with rediscretized coarse grid
  double rho_measured = 0.0;  // NaN unless measured
  int iterations = 0;
  bool converged = false;
};

/// c-samples evenly spaced over [c_min, c_max] (c_min only for one sample).
std::vector<double> sweep_values(const ExperimentConfig& cfg);

/// LFA (and optionally measured) convergence factors, ordered by c then m.
std::vector<SweepRow> compute_sweep(const ExperimentConfig& cfg);
void cmd_sweep(const ExperimentConfig& cfg, std::ostream& out);

// ---- iteration tables ---------------------------------------------------

struct IterationCell {
  GridSize grid;
  int m = 0;
  SolveReport two_level;
  SolveReport v_cycle;
};

/// One solve per cycle type; `keep_solution` retains the final iterates.
IterationCell run_iteration_cell(const ExperimentConfig& cfg, GridSize grid, int m,
                                 bool keep_solution = false);
std::string iteration_text(const SolveReport& r, int max_iters);
void cmd_iters(const ExperimentConfig& cfg, std::ostream& out);

// ---- single solve -------------------------------------------------------

SolveReport run_solve(const ExperimentConfig& cfg);
void cmd_solve(const ExperimentConfig& cfg, std::ostream& out);

// ---- validation ---------------------------------------------------------

struct CheckResult {
  std::string group;
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  std::string criterion;  // how value is compared with expected
  bool pass = false;
};

/// Global order of every fine stepper (ERK/SDIRK p = 1..5 at c = 0.4) and of
/// semi-Lagrangian steppers (p = 1..5 at step CFL 1.6): |order - p| <= 0.15.
std::vector<CheckResult> order_checks();
/// Leading local truncation constants within 5% of the closed forms, plus
/// unit-CFL exactness of ERK1+U1.
std::vector<CheckResult> truncation_checks();
/// Smooth-mode eigenvalue estimates: deviations shrink at order >= 1.
std::vector<CheckResult> eigen_estimate_checks();
/// |mu - lambda^m| at omega = 2 pi / n_x shrinks at order >= p + 2.
std::vector<CheckResult> modified_symbol_checks();

bool cmd_validate(std::ostream& out);

}  // namespace mgritsl::tools
