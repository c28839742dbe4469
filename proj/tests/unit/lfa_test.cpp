#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mgritsl/errors.hpp"
#include "mgritsl/lfa.hpp"
#include "mgritsl/stencils.hpp"

using namespace mgritsl;

namespace {

DiscretizationSpec make_spec(Family f, int p, double c) {
  DiscretizationSpec s;
  s.family = f;
  s.p = s.q = p;
  s.cfl = c;
  return s;
}

}  // namespace

TEST_CASE("single-mode convergence factor") {
  const Complex lambda(0.9, 0.0);
  CHECK(*rho_mode(lambda, std::pow(lambda, 3), 3, 1, 0.4) == doctest::Approx(0.0));
  CHECK(*rho_mode(1.0, 0.0, 2, 0, 1.3) == doctest::Approx(1.0));
  CHECK(*rho_mode(0.9, 0.5, 2, 1, 0.0) == doctest::Approx(0.81 * 0.31 / 0.5));
  CHECK_FALSE(rho_mode(1.0, 1.0, 2, 1, 0.0).has_value());
}

TEST_CASE("analytic maximum over the coarse-grid phase") {
  const Complex pairs[][2] = {{{0.8, 0.3}, {0.2, -0.5}}, {{0.95, -0.1}, {0.7, 0.2}},
                              {{0.3, 0.6}, {-0.4, 0.1}}};
  for (const auto& pr : pairs) {
    for (int m : {2, 4}) {
      for (int nu : {0, 1}) {
        double sampled = 0.0;
        for (int k = 0; k < 256; ++k) {
          const double theta = -std::numbers::pi / m + 2.0 * std::numbers::pi * k / (256.0 * m);
          sampled = std::max(sampled, *rho_mode(pr[0], pr[1], m, nu, theta));
        }
        CHECK(sampled == doctest::Approx(rho_theta_max(pr[0], pr[1], m, nu)).epsilon(0.01));
      }
    }
  }
  CHECK(std::isinf(rho_theta_max(0.5, 1.0, 2, 1)));
}

TEST_CASE("frequency exclusions") {
  CHECK(default_exclusions(1) == 2);
  CHECK(default_exclusions(2) == 2);
  CHECK(default_exclusions(3) == 10);
  const auto sweep = rho_two_level([](double) { return Complex(0.5); },
                                   [](double) { return Complex(0.1); }, 2, 1, 16, 2);
  CHECK(sweep.excluded_count == 3);
  // omega = 0 at index 8 plus its nearest neighbours; the tie goes to the negative side.
  CHECK(sweep.samples[8].excluded);
  CHECK(sweep.samples[7].excluded);
  CHECK(sweep.samples[9].excluded);
  CHECK_FALSE(sweep.samples[10].excluded);
  const auto odd = rho_two_level([](double) { return Complex(0.5); },
                                 [](double) { return Complex(0.1); }, 2, 1, 16, 1);
  CHECK(odd.samples[7].excluded);
  CHECK_FALSE(odd.samples[9].excluded);
  CHECK_THROWS_AS(rho_two_level([](double) { return Complex(0.5); },
                                [](double) { return Complex(0.1); }, 2, 1, 15, 1),
                  InputError);
}

TEST_CASE("ideal coarse operator has a zero convergence factor") {
  const auto s = lfa_sweep(make_spec(Family::sdirk, 3, 2.0), CoarseKind::ideal, 4, 1);
  CHECK(s.rho < 1e-12);
}

TEST_CASE("convergence factor is symmetric in the frequency") {
  const auto s = lfa_sweep(make_spec(Family::erk, 3, 1.2), CoarseKind::modified, 4, 1);
  const int n = static_cast<int>(s.samples.size());
  for (int k = 1; k < n / 2; ++k) {
    CHECK(std::abs(s.samples[n / 2 - k].rho - s.samples[n / 2 + k].rho) < 1e-12);
  }
}

TEST_CASE("more relaxation does not slow convergence") {
  for (auto f : {Family::erk, Family::sdirk}) {
    for (int p : {1, 3, 5}) {
      for (int m : {2, 8}) {
        const double c = f == Family::erk ? 0.5 * cfl_limit(p, erk_tableau(p)) : 2.0;
        const auto spec = make_spec(f, p, c);
        const double f_only = lfa_sweep(spec, CoarseKind::modified, m, 0).rho;
        const double fcf = lfa_sweep(spec, CoarseKind::modified, m, 1).rho;
        CHECK(fcf <= f_only + 1e-12);
      }
    }
  }
}

TEST_CASE("modified coarse operator converges for odd orders") {
  for (int m : {2, 4, 8, 16}) {
    for (double frac : {0.1, 0.5, 0.85}) {
      for (int p : {1, 3}) {
        const double c = frac * cfl_limit(p, erk_tableau(p));
        CHECK(lfa_sweep(make_spec(Family::erk, p, c), CoarseKind::modified, m, 1).rho < 1.0);
      }
      const double c5 = frac * 0.5 / 0.85 * cfl_limit(5, erk_tableau(5));
      CHECK(lfa_sweep(make_spec(Family::erk, 5, c5), CoarseKind::modified, m, 1).rho < 1.0);
    }
    for (double c : {0.5, 2.0, 8.0}) {
      for (int p : {1, 3, 5}) {
        CHECK(lfa_sweep(make_spec(Family::sdirk, p, c), CoarseKind::modified, m, 1).rho < 1.0);
      }
    }
  }
}

TEST_CASE("characteristic-mode bound") {
  CHECK(rho_check(1, 4.0, 2, 0.5, 0.5, 0.5) == doctest::Approx(4.0 * 0.5 / 4.5));
  for (int p : {1, 3}) {
    for (int m : {2, 16}) {
      const double e = rk_error_constant(sdirk_tableau(p));
      const double efd = fd_error_constant(p);
      const double big = 1e3 / m;
      CHECK(rho_check(p, big, m, e, e, efd) ==
            doctest::Approx(std::abs(1.0 - std::pow(m, -p))).epsilon(0.02));
      // rho_check / (mc)^p tends to |e (1 - m^p)| / (m^p |e_FD|) as c -> 0.
      const double lim = std::abs(e * (1.0 - std::pow(m, p))) / (std::pow(m, p) * std::abs(efd));
      for (double c : {1e-2, 1e-4, 1e-6}) {
        CHECK(rho_check(p, c, m, e, e, efd) / std::pow(m * c, p) <= lim * (1.0 + 1e-12));
      }
      CHECK(rho_check(p, 1e-6, m, e, e, efd) / std::pow(m * 1e-6, p) ==
            doctest::Approx(lim).epsilon(1e-3));
    }
  }
  CHECK_THROWS_AS(rho_check(2, 1.0, 2, 0.1, 0.1, 0.1), InputError);
}

TEST_CASE("lower bound for rediscretized implicit Euler") {
  std::vector<double> cs;
  for (int k = 1; k <= 16; ++k) cs.push_back(0.02 * k * k);
  for (int m : {2, 16}) {
    const auto rep = verify_lower_bound(1, m, 1, cs);
    CHECK(rep.all_hold);
    CHECK(rep.tight_below_unit_coarse_cfl);
  }
}

TEST_CASE("characteristic-mode factor is independent of relaxation for small coarse CFL") {
  // The spread over nu comes from |lambda|^(m nu), about m c (1 + c) omega^2 / 2 per sweep.
  std::vector<double> cs;
  for (int k = 1; k <= 16; ++k) cs.push_back(0.125 * k);
  for (int m : {2, 16}) {
    const auto rep = verify_lower_bound(1, m, 1, cs);
    for (const auto& pt : rep.points) {
      if (m * pt.c * (1.0 + pt.c) <= 32.0) CHECK(pt.nu_spread <= 0.01);
    }
    CHECK(rep.points.back().nu_spread > rep.points.front().nu_spread);
  }
}

TEST_CASE("rediscretized third order exceeds one for large coarse CFL") {
  const auto s = lfa_sweep(make_spec(Family::sdirk, 3, 4.0), CoarseKind::rediscretized, 16, 1);
  CHECK(s.rho > 1.0);
  const double e = rk_error_constant(sdirk_tableau(3));
  CHECK(rho_check(3, 4.0, 16, e, e, fd_error_constant(3)) < s.rho);
}

TEST_CASE("smooth-mode eigenvalue estimates") {
  const int grids[] = {1024, 2048, 4096};
  const auto rep = validate_eigenvalue_estimates(make_spec(Family::erk, 1, 0.5), 1, grids);
  CHECK(rep.lambda_order >= 0.95);
  for (std::size_t i = 0; i < rep.nx.size(); ++i) {
    CHECK(rep.lambda_deviation[i] == doctest::Approx(rep.lambda_m_deviation[i]));
    CHECK(rep.lambda_deviation[i] == doctest::Approx(rep.mu_deviation[i]));
  }
  CHECK_THROWS_AS(validate_eigenvalue_estimates(make_spec(Family::erk, 2, 0.3), 2, grids),
                  InputError);
}

TEST_CASE("error character") {
  CHECK(classify(3, 3) == ErrorCharacter::dissipative);
  CHECK(classify(2, 2) == ErrorCharacter::dispersive);
  CHECK(classify(1, 1) == ErrorCharacter::dissipative);
  CHECK(to_string(classify(4, 4)) == "dispersive");
}

TEST_CASE("log-symbol convergence factors agree with the direct ones") {
  const Complex pairs[][2] = {{{0.8, 0.3}, {0.2, -0.5}}, {{0.95, -0.1}, {0.7, 0.2}}};
  for (const auto& pr : pairs) {
    const Complex ll = std::log(pr[0]);
    const Complex lm = std::log(pr[1]);
    for (int m : {2, 4}) {
      CHECK(rho_theta_max_log(ll, lm, m, 1) == doctest::Approx(rho_theta_max(pr[0], pr[1], m, 1)));
      CHECK(*rho_mode_log(ll, lm, m, 1, 0.3) == doctest::Approx(*rho_mode(pr[0], pr[1], m, 1, 0.3)));
    }
  }
  // Branch of the imaginary part does not matter.
  const Complex ll(-0.01, 2.9);
  const Complex lm(-0.05, -1.0);
  CHECK(rho_theta_max_log(ll + Complex(0.0, 2.0 * std::numbers::pi), lm, 3, 1) ==
        doctest::Approx(rho_theta_max_log(ll, lm, 3, 1)));
  CHECK(std::isinf(rho_theta_max_log(ll, Complex(0.0, 1.0), 2, 1)));
}

TEST_CASE("smooth-mode factor at tiny CFL matches an extended-precision evaluation") {
  // SDIRK3+U3 rediscretized with m = 2 and c = 0.0112: lambda^m - mu is near
  // double round-off, so the reference repeats the computation in long double.
  using LComplex = std::complex<long double>;
  const int p = 3;
  const int m = 2;
  const double c = 0.0112;
  const auto tab = sdirk_tableau(p);
  const auto L = upwind_derivative(p, 64);
  const auto R = [&](long double cfl, long double w) {
    LComplex lhat = 0.0L;
    for (const auto& e : L.stencil()) {
      lhat += static_cast<long double>(e.weight) * std::polar(1.0L, e.offset * w);
    }
    const LComplex z = -cfl * lhat;
    std::vector<LComplex> k(static_cast<std::size_t>(tab.stages));
    LComplex r = 1.0L;
    for (int i = 0; i < tab.stages; ++i) {
      LComplex rhs = 1.0L;
      for (int j = 0; j < i; ++j) rhs += z * static_cast<long double>(tab.coeff(i, j)) * k[j];
      k[i] = rhs / (1.0L - z * static_cast<long double>(tab.coeff(i, i)));
      r += z * static_cast<long double>(tab.b[i]) * k[i];
    }
    return r;
  };
  const auto sweep = lfa_sweep(make_spec(Family::sdirk, p, c), CoarseKind::rediscretized, m, 1);
  for (const auto& s : sweep.samples) {
    if (s.excluded || s.omega <= 0.0 || s.omega > 0.1) continue;
    const long double w = s.omega;
    const LComplex lam = R(c, w);
    const LComplex mu = R(static_cast<long double>(m) * c, w);
    const long double ref =
        std::pow(std::abs(lam), m) * std::abs(std::pow(lam, m) - mu) / (1.0L - std::abs(mu));
    CHECK(s.rho == doctest::Approx(static_cast<double>(ref)).epsilon(1e-2));
  }
  const double e = rk_error_constant(tab);
  CHECK(rho_check(p, c, m, e, e, fd_error_constant(p)) / sweep.rho >= 0.9);
}
