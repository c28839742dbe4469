#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mgritsl/mgrit.hpp"
#include "mgritsl/stepping.hpp"

namespace mgritsl {

using SymbolFunction = std::function<Complex(double omega)>;

/// Two-level error reduction of the space-time mode (omega, theta):
/// |lambda|^{m nu} |lambda^m - mu| / |1 - e^{-i m theta} mu|. Empty when the
/// denominator is below 1e-14.
std::optional<double> rho_mode(Complex lambda, Complex mu, int m, int nu, double theta);

/// max over theta of rho_mode: |lambda|^{m nu} |lambda^m - mu| / (1 - |mu|),
/// or +infinity when |mu| >= 1 - 1e-13.
double rho_theta_max(Complex lambda, Complex mu, int m, int nu);

/// rho_mode and rho_theta_max from log-symbols log(lambda), log(mu). Both
/// avoid the cancellation in lambda^m - mu, 1 - |mu| and the denominator
/// when lambda and mu are close to the unit circle.
std::optional<double> rho_mode_log(Complex log_lambda, Complex log_mu, int m, int nu,
                                   double theta);
double rho_theta_max_log(Complex log_lambda, Complex log_mu, int m, int nu);

struct LfaSample {
  double omega = 0.0;
  Complex lambda;
  Complex mu;
  double rho = 0.0;
  bool excluded = false;
};

struct LfaSweep {
  std::vector<LfaSample> samples;
  double rho = 0.0;  // max over retained samples
  double argmax_omega = 0.0;
  int m = 0;
  int nu = 0;
  int excluded_count = 0;
  bool divergent = false;  // some retained sample has |mu| >= 1 - 1e-13
};

inline constexpr int kLfaSamples = 2048;

/// Frequencies excluded next to omega = 0: 2 for p <= 2, 10 for p >= 3.
int default_exclusions(int p);

/// Worst-case two-level factor over omega_k = -pi + 2 pi k / samples,
/// skipping omega = 0 and its `excluded` nearest neighbours.
LfaSweep rho_two_level(const SymbolFunction& fine, const SymbolFunction& coarse, int m, int nu,
                       int samples = kLfaSamples, int excluded = 10);

/// rho_two_level from log-symbols, evaluated with rho_theta_max_log.
LfaSweep rho_two_level_log(const SymbolFunction& fine_log, const SymbolFunction& coarse_log, int m,
                           int nu, int samples = kLfaSamples, int excluded = 10);

/// Fine and coarse steppers on a small mesh; only their symbols are used.
struct SymbolPair {
  Stepper fine;
  Stepper coarse;
};

inline constexpr int kLfaMesh = 64;

SymbolPair lfa_symbols(const DiscretizationSpec& fine, CoarseKind kind, int m);

/// rho_two_level for a fine discretization and coarse-operator kind.
LfaSweep lfa_sweep(const DiscretizationSpec& fine, CoarseKind kind, int m, int nu,
                   int samples = kLfaSamples, std::optional<int> excluded = std::nullopt);

/// Lower bound c^p |(e_fine - m^p e_coarse) / (e_FD + (mc)^p e_coarse)| on
/// the two-level factor of a rediscretized scheme with odd p. Throws
/// SingularityError for a vanishing denominator.
double rho_check(int p, double c, int m, double e_rk_fine, double e_rk_coarse, double e_fd);

struct LowerBoundPoint {
  double c = 0.0;
  double rho = 0.0;
  double rho_check = 0.0;
  bool holds = false;        // rho >= rho_check (1 - tol)
  double tightness = 0.0;    // rho_check / rho
  double nu_spread = 0.0;    // relative spread of the characteristic-mode factor over nu = 0, 1, 2
};

struct LowerBoundReport {
  int p = 0;
  int m = 0;
  std::vector<LowerBoundPoint> points;
  bool all_hold = true;
  bool tight_below_unit_coarse_cfl = true;  // tightness >= 0.9 wherever m c < 1
  bool nu_independent = true;               // spreads below 1%
};

/// Checks the lower bound for SDIRK-p fine grids with rediscretized coarse
/// grids over a c-grid.
LowerBoundReport verify_lower_bound(int p, int m, int nu, std::span<const double> c_grid,
                                    double tol = 0.05);

/// Leading-order smooth-mode expansions, odd p:
///   lambda    ~ e^{-i omega c} [1 + s c (e_FD + c^p e_RK) omega^{p+1}]
///   lambda^m  ~ e^{-i omega m c} [1 + m s c (e_FD + c^p e_RK) omega^{p+1}]
///   mu        ~ e^{-i omega m c} [1 + s m c (e_FD + (mc)^p e_RK) omega^{p+1}]
/// with s = (-1)^{(p+1)/2} and mu the rediscretized coarse symbol.
struct EigenEstimateReport {
  std::vector<int> nx;
  std::vector<double> lambda_deviation;    // max relative error of the bracketed term
  std::vector<double> lambda_m_deviation;
  std::vector<double> mu_deviation;
  double lambda_order = 0.0;
  double lambda_m_order = 0.0;
  double mu_order = 0.0;
};

EigenEstimateReport validate_eigenvalue_estimates(const DiscretizationSpec& fine, int m,
                                                  std::span<const int> nx_list);

enum class ErrorCharacter { dissipative, dispersive };

/// Odd dominant derivative order min(p, q): dissipative; even: dispersive.
ErrorCharacter classify(int p, int q);
std::string to_string(ErrorCharacter c);

}  // namespace mgritsl
