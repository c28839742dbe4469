#include "mgritsl/lfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mgritsl/errors.hpp"

namespace mgritsl {
namespace {

constexpr double kUnitModulusMargin = 1e-13;

double relative_spread(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

// Shifts the imaginary part into [-pi, pi]; exp is unchanged.
Complex principal(Complex z) {
  const double turn = 2.0 * std::numbers::pi;
  return {z.real(), z.imag() - turn * std::round(z.imag() / turn)};
}

// Fills each sample on the grid through `fill` and reduces over the
// retained samples.
template <class Fill>
LfaSweep sweep_samples(int m, int nu, int samples, int excluded, Fill fill) {
  if (samples < 2 || samples % 2 != 0) throw InputError("LFA needs an even number of samples");
  if (excluded < 0 || excluded + 1 >= samples) throw InputError("LFA would exclude every sample");

  LfaSweep sweep;
  sweep.m = m;
  sweep.nu = nu;
  sweep.samples.resize(static_cast<std::size_t>(samples));
  const int zero = samples / 2;

  // Sample indices ordered by distance to omega = 0, negative side first.
  std::vector<int> order(static_cast<std::size_t>(samples));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [zero](int a, int b) {
    return std::abs(a - zero) < std::abs(b - zero);
  });
  for (int j = 0; j <= excluded; ++j) sweep.samples[order[j]].excluded = true;
  sweep.excluded_count = excluded + 1;

  for (int k = 0; k < samples; ++k) {
    auto& s = sweep.samples[k];
    s.omega = -std::numbers::pi + 2.0 * std::numbers::pi * k / samples;
    fill(s);
  }

  bool found = false;
  for (const auto& s : sweep.samples) {
    if (s.excluded) continue;
    if (std::isinf(s.rho)) sweep.divergent = true;
    if (!found || s.rho > sweep.rho) {
      sweep.rho = s.rho;
      sweep.argmax_omega = s.omega;
      found = true;
    }
  }
  return sweep;
}

}  // namespace

std::optional<double> rho_mode(Complex lambda, Complex mu, int m, int nu, double theta) {
  const double denom = std::abs(1.0 - std::polar(1.0, -m * theta) * mu);
  if (denom <= 1e-14) return std::nullopt;
  return std::pow(std::abs(lambda), m * nu) * std::abs(std::pow(lambda, m) - mu) / denom;
}

double rho_theta_max(Complex lambda, Complex mu, int m, int nu) {
  const double a = std::abs(mu);
  if (a >= 1.0 - kUnitModulusMargin) return std::numeric_limits<double>::infinity();
  return std::pow(std::abs(lambda), m * nu) * std::abs(std::pow(lambda, m) - mu) / (1.0 - a);
}

std::optional<double> rho_mode_log(Complex log_lambda, Complex log_mu, int m, int nu,
                                   double theta) {
  // 1 - e^{-i m theta} mu = -expm1(log mu - i m theta)
  const double denom = std::abs(expm1_complex(principal(log_mu - Complex(0.0, m * theta))));
  if (denom <= 1e-14) return std::nullopt;
  const double numer = std::exp(log_mu.real()) *
                       std::abs(expm1_complex(principal(static_cast<double>(m) * log_lambda - log_mu)));
  return std::exp(m * nu * log_lambda.real()) * numer / denom;
}

double rho_theta_max_log(Complex log_lambda, Complex log_mu, int m, int nu) {
  const double gap = -std::expm1(log_mu.real());
  if (gap <= kUnitModulusMargin) return std::numeric_limits<double>::infinity();
  const double numer = std::exp(log_mu.real()) *
                       std::abs(expm1_complex(principal(static_cast<double>(m) * log_lambda - log_mu)));
  return std::exp(m * nu * log_lambda.real()) * numer / gap;
}

int default_exclusions(int p) { return p <= 2 ? 2 : 10; }

LfaSweep rho_two_level(const SymbolFunction& fine, const SymbolFunction& coarse, int m, int nu,
                       int samples, int excluded) {
  return sweep_samples(m, nu, samples, excluded, [&](LfaSample& s) {
    s.lambda = fine(s.omega);
    s.mu = coarse(s.omega);
    s.rho = rho_theta_max(s.lambda, s.mu, m, nu);
  });
}

LfaSweep rho_two_level_log(const SymbolFunction& fine_log, const SymbolFunction& coarse_log, int m,
                           int nu, int samples, int excluded) {
  return sweep_samples(m, nu, samples, excluded, [&](LfaSample& s) {
    const Complex log_lambda = fine_log(s.omega);
    const Complex log_mu = coarse_log(s.omega);
    s.lambda = std::exp(log_lambda);
    s.mu = std::exp(log_mu);
    s.rho = rho_theta_max_log(log_lambda, log_mu, m, nu);
  });
}

SymbolPair lfa_symbols(const DiscretizationSpec& fine, CoarseKind kind, int m) {
  auto spec = fine;
  spec.nx = kLfaMesh;
  auto phi = fine_stepper(spec);
  switch (kind) {
    case CoarseKind::modified:
      return {phi, modified_coarse_stepper(spec, tableau_for(spec), m, 1,
                                           CorrectionSolver::direct())};
    case CoarseKind::rediscretized:
      if (spec.family == Family::semi_lagrangian) return {phi, plain_sl_coarse_stepper(spec, m)};
      return {phi, rediscretized_coarse_stepper(spec, tableau_for(spec), m)};
    case CoarseKind::plain_sl:
      return {phi, plain_sl_coarse_stepper(spec, m)};
    case CoarseKind::ideal:
      return {phi, ideal_coarse_stepper(phi, m)};
  }
  throw InputError("unknown coarse operator kind");
}

LfaSweep lfa_sweep(const DiscretizationSpec& fine, CoarseKind kind, int m, int nu, int samples,
                   std::optional<int> excluded) {
  const auto pair = lfa_symbols(fine, kind, m);
  return rho_two_level_log([&](double w) { return pair.fine.log_symbol(w); },
                           [&](double w) { return pair.coarse.log_symbol(w); }, m, nu, samples,
                           excluded.value_or(default_exclusions(fine.p)));
}

double rho_check(int p, double c, int m, double e_rk_fine, double e_rk_coarse, double e_fd) {
  if (p % 2 == 0) throw InputError("the characteristic-mode bound is stated for odd p");
  const double mp = std::pow(m, p);
  const double denom = e_fd + std::pow(m * c, p) * e_rk_coarse;
  if (std::abs(denom) < 1e-14) {
    throw SingularityError("rho_check: e_FD + (mc)^p e_RK vanishes at c = " + std::to_string(c));
  }
  return std::pow(c, p) * std::abs((e_rk_fine - mp * e_rk_coarse) / denom);
}

LowerBoundReport verify_lower_bound(int p, int m, int nu, std::span<const double> c_grid,
                                    double tol) {
  const auto tab = sdirk_tableau(p);
  const double e_rk = rk_error_constant(tab);
  const double e_fd = fd_error_constant(p);

  LowerBoundReport report;
  report.p = p;
  report.m = m;
  for (double c : c_grid) {
    DiscretizationSpec spec;
    spec.family = Family::sdirk;
    spec.p = spec.q = p;
    spec.cfl = c;
    const auto pair = lfa_symbols(spec, CoarseKind::rediscretized, m);
    const auto sweep = rho_two_level_log([&](double w) { return pair.fine.log_symbol(w); },
                                         [&](double w) { return pair.coarse.log_symbol(w); }, m,
                                         nu, kLfaSamples, default_exclusions(p));
    LowerBoundPoint pt;
    pt.c = c;
    pt.rho = sweep.rho;
    pt.rho_check = rho_check(p, c, m, e_rk, e_rk, e_fd);
    pt.holds = pt.rho >= pt.rho_check * (1.0 - tol);
    pt.tightness = pt.rho > 0.0 ? pt.rho_check / pt.rho : 0.0;

    // Characteristic component theta = -omega c at the smallest retained omega.
    double omega = 0.0;
    for (const auto& s : sweep.samples) {
      if (!s.excluded && s.omega > 0.0 && (omega == 0.0 || s.omega < omega)) omega = s.omega;
    }
    const Complex log_lambda = pair.fine.log_symbol(omega);
    const Complex log_mu = pair.coarse.log_symbol(omega);
    std::vector<double> by_nu;
    for (int v = 0; v <= 2; ++v) {
      by_nu.push_back(rho_mode_log(log_lambda, log_mu, m, v, -omega * c).value_or(
          std::numeric_limits<double>::infinity()));
    }
    pt.nu_spread = relative_spread(by_nu);

    report.all_hold = report.all_hold && pt.holds;
    if (m * c < 1.0) {
      report.tight_below_unit_coarse_cfl = report.tight_below_unit_coarse_cfl && pt.tightness >= 0.9;
    }
    report.nu_independent = report.nu_independent && pt.nu_spread <= 0.01;
    report.points.push_back(pt);
  }
  return report;
}

EigenEstimateReport validate_eigenvalue_estimates(const DiscretizationSpec& fine, int m,
                                                  std::span<const int> nx_list) {
  const int p = fine.p;
  if (p % 2 == 0) throw InputError("the smooth-mode eigenvalue estimates are stated for odd p");
  if (fine.family == Family::semi_lagrangian) {
    throw InputError("eigenvalue estimates apply to method-of-lines discretizations");
  }
  const auto tab = tableau_for(fine);
  const double e_rk = rk_error_constant(tab);
  const double e_fd = fd_error_constant(p);
  const double c = fine.cfl;
  const double s = ((p + 1) / 2) % 2 == 0 ? 1.0 : -1.0;

  auto spec = fine;
  spec.nx = kLfaMesh;
  const auto phi = mol_stepper(spec, tab);
  auto coarse_spec = spec;
  coarse_spec.cfl = m * c;
  const auto psi = mol_stepper(coarse_spec, tab);

  const double k_lambda = s * c * (e_fd + std::pow(c, p) * e_rk);
  const double k_mu = s * m * c * (e_fd + std::pow(m * c, p) * e_rk);
  const Complex I(0.0, 1.0);

  EigenEstimateReport report;
  std::vector<double> hs;
  for (int nx : nx_list) {
    double dl = 0.0, dlm = 0.0, dmu = 0.0;
    for (int j = 1; j <= 8; ++j) {
      const double w = 2.0 * std::numbers::pi * j / nx;
      const double wp = std::pow(w, p + 1);
      const Complex lambda = phi.symbol(w);
      const Complex bracket_l = lambda * std::exp(I * w * c) - 1.0;
      const Complex bracket_lm = std::pow(lambda, m) * std::exp(I * w * (m * c)) - 1.0;
      const Complex bracket_mu = psi.symbol(w) * std::exp(I * w * (m * c)) - 1.0;
      dl = std::max(dl, std::abs(bracket_l - k_lambda * wp) / std::abs(k_lambda * wp));
      dlm = std::max(dlm, std::abs(bracket_lm - m * k_lambda * wp) / std::abs(m * k_lambda * wp));
      dmu = std::max(dmu, std::abs(bracket_mu - k_mu * wp) / std::abs(k_mu * wp));
    }
    report.nx.push_back(nx);
    report.lambda_deviation.push_back(dl);
    report.lambda_m_deviation.push_back(dlm);
    report.mu_deviation.push_back(dmu);
    hs.push_back(DiscretizationSpec::kDomainLength / nx);
  }
  if (hs.size() >= 2) {
    report.lambda_order = loglog_slope(hs, report.lambda_deviation);
    report.lambda_m_order = loglog_slope(hs, report.lambda_m_deviation);
    report.mu_order = loglog_slope(hs, report.mu_deviation);
  }
  return report;
}

ErrorCharacter classify(int p, int q) {
  if (p < 1 || q < 1) throw InputError("orders must be positive");
  return std::min(p, q) % 2 == 1 ? ErrorCharacter::dissipative : ErrorCharacter::dispersive;
}

std::string to_string(ErrorCharacter c) {
  return c == ErrorCharacter::dissipative ? "dissipative" : "dispersive";
}

}  // namespace mgritsl
