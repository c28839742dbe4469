#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mgritsl/butcher.hpp"
#include "mgritsl/circulant.hpp"
#include "mgritsl/stencils.hpp"

namespace mgritsl {

enum class Family { erk, sdirk, semi_lagrangian };

std::string to_string(Family f);

/// A fine-grid discretization of u_t + alpha u_x = 0 on the periodic domain
/// [-1, 1): n_x points at spacing h = 2 / n_x, n_t steps of size
/// dt = cfl * h / alpha.
struct DiscretizationSpec {
  Family family = Family::erk;
  int p = 1;  // spatial order
  int q = 1;  // temporal order (q = p throughout)
  double cfl = 0.5;
  int nx = 64;
  int nt = 256;
  double wave_speed = 1.0;

  static constexpr double kDomainLength = 2.0;
  double h() const { return kDomainLength / nx; }
  double dt() const { return cfl * h() / wave_speed; }
  double final_time() const { return nt * dt(); }
};

/// The shipped tableau for a spec: ERK-q or SDIRK-q. Throws InputError for
/// the semi-Lagrangian family.
ButcherTableau tableau_for(const DiscretizationSpec& spec);

enum class ApplyMode { assembled, staged };

namespace detail {
struct StepperImpl;
}

/// A one-step time-stepping map u_{n+1} = Phi u_n on a periodic mesh.
/// Cheap to copy; immutable and safe to share between threads.
class Stepper {
 public:
  explicit Stepper(std::shared_ptr<const detail::StepperImpl> impl);

  int nx() const;
  void step(std::span<const double> in, std::span<double> out) const;
  Vector step(std::span<const double> in) const;

  /// Fourier symbol of the (exactly solved) one-step map at any omega.
  Complex symbol(double omega) const;
  /// log(symbol(omega)), built from symbol increments so that it stays
  /// accurate where the symbol is close to 1. The imaginary part is not
  /// reduced to a principal branch.
  Complex log_symbol(double omega) const;
  /// The one-step map as a circulant operator.
  const CirculantOperator& assembled() const;

  ApplyMode mode() const;
  /// CFL number alpha * dt_step / h of this step.
  double step_cfl() const;
  /// Set for ERK steppers built above their CFL limit.
  bool above_cfl_limit() const;
  const std::string& label() const;

 private:
  std::shared_ptr<const detail::StepperImpl> impl_;
};

/// M = R_q(-c L_p): method-of-lines ERK-p/SDIRK-p with p-th order upwind
/// differences at the spec's CFL number.
Stepper mol_stepper(const DiscretizationSpec& spec, const ButcherTableau& tab,
                    ApplyMode mode = ApplyMode::assembled);

/// mol_stepper for the erk/sdirk families, sl_stepper(p, cfl, nx) for the
/// semi-Lagrangian family.
Stepper fine_stepper(const DiscretizationSpec& spec, ApplyMode mode = ApplyMode::assembled);

/// Departure-point geometry of a semi-Lagrangian step of CFL number
/// `step_cfl`: x_i - step_cfl h = x_{i+shift} - eps h, eps in [0, 1), and the
/// interpolation window around x_{i+shift}.
struct SlGeometry {
  int shift = 0;
  double eps = 0.0;
  StencilWindow window;
};

SlGeometry sl_geometry(int p, double step_cfl);

/// Order-p semi-Lagrangian step (degree-p interpolation at the departure
/// point). Unconditionally stable.
Stepper sl_stepper(int p, double step_cfl, int nx);

/// Largest c with max_omega |R(-c symbol(L_p, omega))| <= 1 + growth_tol,
/// by bisection to 1e-7 over 4096 samples of omega.
double cfl_limit(int p, const ButcherTableau& tab, double growth_tol = 1e-10);

/// Correction coefficient of the modified coarse operator on a level reached
/// by coarsening factors m_1, ..., m_l from a fine grid at CFL c.
double phi_coefficient(int p, double c, std::span<const int> factors, double e_fd, double e_rk);
/// Same m on every level.
double phi_coefficient(int p, double c, int m, int level, double e_fd, double e_rk);

/// D^(p+1)_s used by the correction: symmetric s = 2 for odd p, one-point
/// left-biased s = 1 for even p.
CirculantOperator correction_derivative(int p, int nx);

struct CorrectionSolver {
  enum class Kind { direct, gmres };
  Kind kind = Kind::direct;
  double rel_tol = 1e-2;
  int max_iters = 20;

  static CorrectionSolver direct() { return {}; }
  static CorrectionSolver gmres(double tol, int max_iters) { return {Kind::gmres, tol, max_iters}; }
};

/// (I - phi D)^{-1} S_p at step CFL c * prod(factors): the truncation-error
/// corrected semi-Lagrangian coarse operator for a method-of-lines fine grid.
Stepper modified_coarse_stepper(const DiscretizationSpec& fine, const ButcherTableau& tab,
                                std::span<const int> factors, CorrectionSolver solver);
Stepper modified_coarse_stepper(const DiscretizationSpec& fine, const ButcherTableau& tab, int m,
                                int level, CorrectionSolver solver);

/// The fine method-of-lines scheme rebuilt with step m_total * dt. SDIRK only;
/// ERK rediscretization throws InputError (unstable for practical m c).
Stepper rediscretized_coarse_stepper(const DiscretizationSpec& fine, const ButcherTableau& tab,
                                     int m_total);

/// Plain semi-Lagrangian step of size m_total * dt.
Stepper plain_sl_coarse_stepper(const DiscretizationSpec& fine, int m_total);

/// Phi^{m_total}.
Stepper ideal_coarse_stepper(const Stepper& fine, int m_total);

/// Local truncation error study of a stepper family on refining meshes.
/// For u(x, t) = sin(pi (x - t)) the residual u(t + dt) - Phi u(t) is
/// compared with the predicted leading term
/// coefficient * h^d * d^d u / dx^d (x, t + dt).
struct TruncationReport {
  std::vector<int> nx;
  std::vector<double> residual_rms;
  std::vector<double> remainder_rms;   // ||residual - predicted||
  std::vector<double> constant_ratio;  // least-squares fit of residual onto predicted
  double residual_order = 0.0;
  double remainder_order = 0.0;
};

TruncationReport truncation_residual(const std::function<Stepper(int nx)>& make_stepper,
                                     double step_cfl, double predicted_coefficient,
                                     int derivative_order, std::span<const int> nx_list);

/// Leading truncation coefficient of a method-of-lines scheme with q = p:
/// -(c e_FD + (-c)^{p+1} e_RK).
double mol_truncation_coefficient(int p, double c, double e_fd, double e_rk);
/// Leading truncation coefficient of a semi-Lagrangian step: (-1)^{p+1} f_{p+1}(eps).
double sl_truncation_coefficient(int p, double step_cfl);

/// Global error at t close to 1 of the stepper applied to sin(pi x), on each
/// mesh, together with the least-squares slope of log error vs log h.
struct GlobalOrderReport {
  std::vector<int> nx;
  std::vector<double> error;
  double order = 0.0;
};

GlobalOrderReport global_order(const std::function<Stepper(int nx)>& make_stepper,
                               double step_cfl, std::span<const int> nx_list);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mgritsl
