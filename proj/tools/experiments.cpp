#include "experiments.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "csv.hpp"
#include "mgritsl/errors.hpp"
#include "mgritsl/lfa.hpp"

namespace mgritsl::tools {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int worker_count(const ExperimentConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
}

CheckResult within(std::string group, std::string name, double value, double expected,
                   double tol) {
  return {std::move(group), std::move(name), value, expected,
          "|value - expected| <= " + format_exact(tol), std::abs(value - expected) <= tol};
}

CheckResult at_least(std::string group, std::string name, double value, double bound) {
  return {std::move(group), std::move(name), value, bound, "value >= expected", value >= bound};
}

CheckResult at_most(std::string group, std::string name, double value, double bound) {
  return {std::move(group), std::move(name), value, bound, "value <= expected", value <= bound};
}

std::string scheme_name(Family f, int p) {
  switch (f) {
    case Family::erk:
      return "ERK" + std::to_string(p) + "+U" + std::to_string(p);
    case Family::sdirk:
      return "SDIRK" + std::to_string(p) + "+U" + std::to_string(p);
    case Family::semi_lagrangian:
      return "SL" + std::to_string(p);
  }
  return "?";
}

DiscretizationSpec mol_spec(Family f, int p, double c, int nx) {
  DiscretizationSpec s;
  s.family = f;
  s.p = s.q = p;
  s.cfl = c;
  s.nx = nx;
  return s;
}

}  // namespace

// ---- constants ----------------------------------------------------------

std::vector<ConstantsRow> compute_constants() {
  std::vector<ConstantsRow> rows;
  for (int p = 1; p <= 5; ++p) {
    rows.push_back({p, fd_error_constant(p), rk_error_constant(erk_tableau(p)),
                    rk_error_constant(sdirk_tableau(p)), cfl_limit(p, erk_tableau(p))});
  }
  return rows;
}

void cmd_constants(std::ostream& out) {
  CsvWriter csv(out, {"p", "e_fd", "e_rk_erk", "e_rk_sdirk", "c_max_erk"});
  csv.metadata("error constants of the order-p upwind stencil and the order-q RK methods (q = p)\n"
               "c_max: largest stable CFL number of ERKp+Up (growth tolerance 1e-10)");
  for (const auto& r : compute_constants()) {
    csv.cell(r.p).cell(r.e_fd).cell(r.e_rk_erk).cell(r.e_rk_sdirk).cell(r.c_max).end_row();
  }
}

// ---- sweep --------------------------------------------------------------

std::vector<double> sweep_values(const ExperimentConfig& cfg) {
  std::vector<double> v;
  if (cfg.c_samples == 1) return {cfg.c_min};
  for (int i = 0; i < cfg.c_samples; ++i) {
    v.push_back(cfg.c_min + (cfg.c_max - cfg.c_min) * i / (cfg.c_samples - 1));
  }
  return v;
}

std::vector<SweepRow> compute_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto values = sweep_values(cfg);
  const int n_m = static_cast<int>(cfg.m.size());
  const int tasks = static_cast<int>(values.size()) * n_m;
  std::vector<SweepRow> rows(static_cast<std::size_t>(tasks));

  const bool with_check = cfg.family == Family::sdirk && cfg.coarse == CoarseKind::rediscretized &&
                          cfg.p % 2 == 1;
  const double e_fd = fd_error_constant(cfg.p);
  const double e_rk = cfg.family == Family::semi_lagrangian
                          ? 0.0
                          : rk_error_constant(tableau_for(mol_spec(cfg.family, cfg.p, 1.0, 64)));
  if (cfg.cfl_fraction) absolute_cfl(cfg, 1.0);  // fill the c_max cache before the workers start

  std::vector<std::string> errors(static_cast<std::size_t>(tasks));
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(cfg))
  for (int t = 0; t < tasks; ++t) {
    try {
      auto& row = rows[t];
      row.c_value = values[t / n_m];
      row.m = cfg.m[t % n_m];
      const auto spec = discretization(cfg, cfg.grid, row.c_value);
      row.c = spec.cfl;
      const auto sweep = lfa_sweep(spec, cfg.coarse, row.m, cfg.nu, cfg.samples,
                                   cfg.excluded < 0 ? std::nullopt : std::optional(cfg.excluded));
      row.rho_lfa = sweep.rho;
      row.argmax_omega = sweep.argmax_omega;
      row.lfa_divergent = sweep.divergent;
      row.rho_check = with_check ? rho_check(cfg.p, row.c, row.m, e_rk, e_rk, e_fd) : kNaN;
      row.rho_measured = kNaN;
      if (cfg.measure) {
        const int ms[] = {row.m};
        const auto problem =
            build_problem(spec, cfg.coarse, cfg.cycle, ms, correction_solver(cfg));
        auto mc = mgrit_config(cfg, cfg.cycle);
        mc.threads = 1;
        const auto report = solve(problem, mc);
        row.rho_measured = report.effective_rho;
        row.iterations = report.iterations;
        row.converged = report.converged;
      }
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw SingularityError(e);
  }
  return rows;
}

void cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  const auto rows = compute_sweep(cfg);
  CsvWriter csv(out, {cfg.cfl_fraction ? "c_fraction" : "c", "c_abs", "m", "rho_lfa",
                      "argmax_omega", "lfa_divergent", "rho_check", "rho_measured", "iterations",
                      "converged"});
  csv.metadata(emit_config(cfg));
  for (const auto& r : rows) {
    csv.cell(r.c_value).cell(r.c).cell(r.m).cell(r.rho_lfa).cell(r.argmax_omega);
    csv.cell(r.lfa_divergent).cell(r.rho_check).cell(r.rho_measured).cell(r.iterations);
    csv.cell(r.converged).end_row();
  }
}

// ---- iteration tables ---------------------------------------------------

IterationCell run_iteration_cell(const ExperimentConfig& cfg, GridSize grid, int m,
                                 bool keep_solution) {
  IterationCell cell;
  cell.grid = grid;
  cell.m = m;
  const auto spec = discretization(cfg, grid, cfg.cfl);
  const int ms[] = {m};
  for (const auto cycle : {Cycle::two_level, Cycle::v_cycle}) {
    const auto problem = build_problem(spec, cfg.coarse, cycle, ms, correction_solver(cfg));
    auto report = solve(problem, mgrit_config(cfg, cycle));
    if (!keep_solution) report.solution = SpaceTime();
    (cycle == Cycle::two_level ? cell.two_level : cell.v_cycle) = std::move(report);
  }
  return cell;
}

std::string iteration_text(const SolveReport& r, int max_iters) {
  return r.converged ? std::to_string(r.iterations) : ">" + std::to_string(max_iters);
}

void cmd_iters(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  CsvWriter csv(out, {"nx", "nt", "m", "iters_two_level", "iters_v", "rho_two_level", "rho_v",
                      "seconds_two_level", "seconds_v"});
  csv.metadata(emit_config(cfg));
  for (const auto& grid : cfg.grids) {
    for (int m : cfg.m) {
      const auto cell = run_iteration_cell(cfg, grid, m);
      csv.cell(grid.nx).cell(grid.nt).cell(m);
      csv.cell(iteration_text(cell.two_level, cfg.max_iters));
      csv.cell(iteration_text(cell.v_cycle, cfg.max_iters));
      csv.cell(cell.two_level.effective_rho).cell(cell.v_cycle.effective_rho);
      csv.cell(cell.two_level.wall_seconds).cell(cell.v_cycle.wall_seconds).end_row();
      out.flush();
    }
  }
}

// ---- single solve -------------------------------------------------------

SolveReport run_solve(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto spec = discretization(cfg, cfg.grid, cfg.cfl);
  const auto problem = build_problem(spec, cfg.coarse, cfg.cycle, cfg.m, correction_solver(cfg));
  return solve(problem, mgrit_config(cfg, cfg.cycle));
}

void cmd_solve(const ExperimentConfig& cfg, std::ostream& out) {
  const auto report = run_solve(cfg);
  CsvWriter csv(out, {"iteration", "residual_norm", "relative_residual", "ratio"});
  std::ostringstream meta;
  meta << emit_config(cfg) << "iterations = " << report.iterations
       << "\nconverged = " << (report.converged ? "true" : "false")
       << "\neffective_rho = " << format_sci(report.effective_rho)
       << "\nwall_seconds = " << format_sci(report.wall_seconds);
  csv.metadata(meta.str());
  const auto& r = report.residual_norms;
  for (std::size_t k = 0; k < r.size(); ++k) {
    csv.cell(static_cast<int>(k)).cell(r[k]).cell(r[k] / r[0]);
    csv.cell(k == 0 ? kNaN : r[k] / r[k - 1]).end_row();
  }
}

// ---- validation ---------------------------------------------------------

std::vector<CheckResult> order_checks() {
  std::vector<CheckResult> out;
  constexpr double kMolCfl = 0.4;
  constexpr double kSlCfl = 1.6;
  const int grids[] = {64, 128, 256};
  for (const auto family : {Family::erk, Family::sdirk}) {
    for (int p = 1; p <= 5; ++p) {
      const auto rep = global_order(
          [&](int nx) { return fine_stepper(mol_spec(family, p, kMolCfl, nx)); }, kMolCfl, grids);
      out.push_back(within("global order", scheme_name(family, p) + " c=0.4", rep.order, p, 0.15));
    }
  }
  for (int p = 1; p <= 5; ++p) {
    const auto rep =
        global_order([&](int nx) { return sl_stepper(p, kSlCfl, nx); }, kSlCfl, grids);
    out.push_back(within("global order", scheme_name(Family::semi_lagrangian, p) + " c=1.6",
                         rep.order, p, 0.15));
  }
  return out;
}

std::vector<CheckResult> truncation_checks() {
  std::vector<CheckResult> out;
  const int grids[] = {64, 128, 256};
  constexpr double kMolCfl = 0.8;
  for (const auto family : {Family::erk, Family::sdirk}) {
    for (int p = 1; p <= 5; ++p) {
      const auto spec = mol_spec(family, p, kMolCfl, 64);
      const auto tab = tableau_for(spec);
      const double coef =
          mol_truncation_coefficient(p, kMolCfl, fd_error_constant(p), rk_error_constant(tab));
      const auto rep = truncation_residual(
          [&](int nx) { return mol_stepper(mol_spec(family, p, kMolCfl, nx), tab); }, kMolCfl,
          coef, p + 1, grids);
      out.push_back(within("truncation constant", scheme_name(family, p) + " c=0.8",
                           rep.constant_ratio.back(), 1.0, 0.05));
    }
  }
  for (const double c : {0.3, 1.6}) {
    for (int p = 1; p <= 5; ++p) {
      const auto rep = truncation_residual([&](int nx) { return sl_stepper(p, c, nx); }, c,
                                           sl_truncation_coefficient(p, c), p + 1, grids);
      out.push_back(within("truncation constant",
                           scheme_name(Family::semi_lagrangian, p) + " c=" + format_exact(c),
                           rep.constant_ratio.back(), 1.0, 0.05));
    }
  }
  const auto exact = truncation_residual(
      [](int nx) { return fine_stepper(mol_spec(Family::erk, 1, 1.0, nx)); }, 1.0, 0.0, 2, grids);
  double worst = 0.0;
  for (double r : exact.residual_rms) worst = std::max(worst, r);
  out.push_back(at_most("truncation constant", "ERK1+U1 c=1 exact shift", worst, 1e-12));
  return out;
}

std::vector<CheckResult> eigen_estimate_checks() {
  // Grids keep omega * m * c small at low p and the leading term above roundoff at high p.
  struct Case {
    Family family;
    int p;
    double c;
    int m;
    std::array<int, 3> grids;
  };
  const Case cases[] = {{Family::erk, 1, 0.5, 1, {1024, 2048, 4096}},
                        {Family::erk, 3, 1.2, 4, {512, 1024, 2048}},
                        {Family::sdirk, 1, 2.0, 4, {4096, 8192, 16384}},
                        {Family::sdirk, 3, 1.0, 4, {512, 1024, 2048}},
                        {Family::sdirk, 5, 1.0, 2, {128, 256, 512}}};
  constexpr double kMinOrder = 1.0 - 0.05;
  std::vector<CheckResult> out;
  for (const auto& cs : cases) {
    const auto spec = mol_spec(cs.family, cs.p, cs.c, 64);
    const auto rep = validate_eigenvalue_estimates(spec, cs.m, cs.grids);
    const auto name = scheme_name(cs.family, cs.p) + " c=" + format_exact(cs.c) +
                      " m=" + std::to_string(cs.m);
    out.push_back(at_least("eigenvalue estimate", name + " lambda", rep.lambda_order, kMinOrder));
    out.push_back(
        at_least("eigenvalue estimate", name + " lambda^m", rep.lambda_m_order, kMinOrder));
    out.push_back(at_least("eigenvalue estimate", name + " mu", rep.mu_order, kMinOrder));
  }
  return out;
}

std::vector<CheckResult> modified_symbol_checks() {
  struct Case {
    Family family;
    int p;
    double c;
    int m;
  };
  const double erk3 = cfl_limit(3, erk_tableau(3));
  const Case cases[] = {{Family::erk, 1, 0.4, 2},          {Family::erk, 1, 0.85, 16},
                        {Family::erk, 3, 0.85 * erk3, 4},  {Family::erk, 3, 0.5 * erk3, 8},
                        {Family::sdirk, 1, 2.0, 4},        {Family::sdirk, 1, 0.5, 16},
                        {Family::sdirk, 3, 5.0, 4},        {Family::sdirk, 3, 1.0, 16}};
  const int grids[] = {256, 512, 1024};
  std::vector<CheckResult> out;
  for (const auto& cs : cases) {
    const auto pair = lfa_symbols(mol_spec(cs.family, cs.p, cs.c, 64), CoarseKind::modified, cs.m);
    std::vector<double> hs, rem;
    for (int nx : grids) {
      const double w = 2.0 * std::numbers::pi / nx;
      rem.push_back(std::abs(pair.coarse.symbol(w) - std::pow(pair.fine.symbol(w), cs.m)));
      hs.push_back(DiscretizationSpec::kDomainLength / nx);
    }
    out.push_back(at_least("modified symbol",
                           scheme_name(cs.family, cs.p) + " c=" + format_exact(cs.c) +
                               " m=" + std::to_string(cs.m),
                           loglog_slope(hs, rem), cs.p + 2 - 0.05));
  }
  return out;
}

bool cmd_validate(std::ostream& out) {
  CsvWriter csv(out, {"group", "check", "value", "expected", "criterion", "pass"});
  csv.metadata("refinement and symbol checks of the discretizations and coarse operators");
  bool all = true;
  for (const auto& batch :
       {order_checks(), truncation_checks(), eigen_estimate_checks(), modified_symbol_checks()}) {
    for (const auto& c : batch) {
      csv.cell(c.group).cell(c.name).cell(c.value).cell(c.expected).cell(c.criterion);
      csv.cell(c.pass).end_row();
      all = all && c.pass;
    }
  }
  return all;
}

}  // namespace mgritsl::tools
