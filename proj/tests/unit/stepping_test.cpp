#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mgritsl/errors.hpp"
#include "mgritsl/stencils.hpp"
#include "mgritsl/stepping.hpp"
#include "oracles.hpp"

using namespace mgritsl;

namespace {

DiscretizationSpec make_spec(Family f, int p, double c, int nx = 64) {
  DiscretizationSpec s;
  s.family = f;
  s.p = s.q = p;
  s.cfl = c;
  s.nx = nx;
  return s;
}

double grid_omega(int k, int nx) { return 2.0 * std::numbers::pi * k / nx; }

}  // namespace

TEST_CASE("forward Euler with first-order upwinding") {
  const double c = 0.3;
  const auto phi = fine_stepper(make_spec(Family::erk, 1, c, 16));
  const auto& st = phi.assembled().stencil();
  REQUIRE(st.size() == 2);
  for (const auto& e : st) CHECK(e.weight == doctest::Approx(e.offset == 0 ? 1 - c : c));
  for (double w : {-2.0, 0.5, 3.0}) {
    CHECK(std::abs(phi.symbol(w) - (1.0 - c * (1.0 - std::exp(Complex(0, -w))))) < 1e-15);
  }
}

TEST_CASE("staged and assembled application agree") {
  const auto v = oracle::random_vector(64, 31);
  for (auto f : {Family::erk, Family::sdirk}) {
    for (int p = 1; p <= 5; ++p) {
      const auto spec = make_spec(f, p, f == Family::erk ? 0.4 : 2.5);
      const auto a = fine_stepper(spec, ApplyMode::assembled).step(v);
      const auto s = fine_stepper(spec, ApplyMode::staged).step(v);
      CHECK(oracle::max_diff(a, s) < 1e-11);
    }
  }
}

TEST_CASE("symbol matches the assembled stencil and the stability function") {
  for (auto f : {Family::erk, Family::sdirk}) {
    for (int p = 1; p <= 5; ++p) {
      const auto spec = make_spec(f, p, 0.7);
      const auto phi = fine_stepper(spec);
      const auto tab = tableau_for(spec);
      const auto L = upwind_derivative(p, 64);
      for (int k = 0; k < 64; k += 5) {
        const double w = grid_omega(k, 64);
        CHECK(std::abs(phi.symbol(w) - phi.assembled().symbol(w)) < 1e-12);
        CHECK(std::abs(phi.symbol(w) - stability_function(tab, -0.7 * L.symbol(w))) < 1e-12);
      }
    }
  }
}

TEST_CASE("semi-Lagrangian geometry") {
  auto g = sl_geometry(1, 1.6);
  CHECK(g.shift == -1);
  CHECK(g.eps == doctest::Approx(0.6));
  g = sl_geometry(3, 3.0);
  CHECK(g.shift == -3);
  CHECK(g.eps == 0.0);
  CHECK(sl_geometry(3, 0.2).window == StencilWindow{2, 1});
  CHECK(sl_geometry(2, 0.7).window == StencilWindow{2, 0});
  CHECK(sl_geometry(2, 0.3).window == StencilWindow{1, 1});
}

TEST_CASE("semi-Lagrangian step with integer CFL is a cyclic shift") {
  const auto v = oracle::random_vector(32, 4);
  for (int p = 1; p <= 5; ++p) {
    const auto out = sl_stepper(p, 3.0, 32).step(v);
    for (int i = 0; i < 32; ++i) CHECK(out[i] == doctest::Approx(v[(i - 3 + 32) % 32]));
  }
}

TEST_CASE("first-order semi-Lagrangian equals forward Euler upwinding") {
  const auto v = oracle::random_vector(48, 8);
  for (double c : {0.1, 0.45, 0.9}) {
    const auto sl = sl_stepper(1, c, 48).step(v);
    const auto erk = fine_stepper(make_spec(Family::erk, 1, c, 48)).step(v);
    CHECK(oracle::max_diff(sl, erk) < 1e-14);
  }
}

TEST_CASE("CFL limits of explicit schemes") {
  CHECK(cfl_limit(1, erk_tableau(1)) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(cfl_limit(2, erk_tableau(2)) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(cfl_limit(3, erk_tableau(3)) == doctest::Approx(1.62589).epsilon(1e-4));
  CHECK(cfl_limit(4, erk_tableau(4)) == doctest::Approx(1.04449).epsilon(1e-4));
  // A looser growth tolerance admits the weak long-wave growth above 1.9393.
  CHECK(cfl_limit(5, erk_tableau(5), 1e-6) == doctest::Approx(1.96583).epsilon(1e-4));
  CHECK_THROWS_AS(cfl_limit(1, sdirk_tableau(1)), InputError);
}

TEST_CASE("explicit steppers above the CFL limit are flagged, not refused") {
  const auto phi = fine_stepper(make_spec(Family::erk, 3, 1.7));
  CHECK(phi.above_cfl_limit());
  CHECK_FALSE(fine_stepper(make_spec(Family::erk, 3, 1.6)).above_cfl_limit());
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) worst = std::max(worst, std::abs(phi.symbol(grid_omega(k, 64))));
  CHECK(worst > 1.0);
}

TEST_CASE("stable steppers do not amplify any mode") {
  for (int p = 1; p <= 5; ++p) {
    const auto erk = fine_stepper(make_spec(Family::erk, p, 0.95 * cfl_limit(p, erk_tableau(p))));
    const auto sdirk = fine_stepper(make_spec(Family::sdirk, p, 7.0));
    const auto sl = sl_stepper(p, 2.3, 64);
    for (int k = 0; k < 256; ++k) {
      const double w = -std::numbers::pi + 2.0 * std::numbers::pi * k / 256;
      CHECK(std::abs(erk.symbol(w)) <= 1.0 + 1e-10);
      CHECK(std::abs(sdirk.symbol(w)) <= 1.0 + 1e-10);
      CHECK(std::abs(sl.symbol(w)) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("correction coefficient") {
  const double efd = fd_error_constant(1);
  const double erk = rk_error_constant(erk_tableau(1));
  CHECK(phi_coefficient(1, 0.4, 2, 1, efd, erk) == doctest::Approx(0.16));
  CHECK(phi_coefficient(1, 0.4, 4, 1, efd, erk) == doctest::Approx(0.36));
  for (int m : {2, 3}) {
    const double c = 0.3;
    CHECK(phi_coefficient(1, c, m, 1, efd, erk) == doctest::Approx(m * (m - 1) * c * c / 2));
  }
  const int one[] = {1};
  CHECK(std::abs(phi_coefficient(1, 0.6, one, efd, erk)) < 1e-15);
  CHECK_THROWS_AS(phi_coefficient(1, 0.4, 2, 0, efd, erk), InputError);
}

TEST_CASE("multilevel coefficient recursion") {
  const double efd = fd_error_constant(3);
  const double erk = rk_error_constant(erk_tableau(3));
  const double c = 0.5;
  const int f2[] = {4, 4};
  const int f1[] = {4};
  const double phi1 = phi_coefficient(3, c, f1, efd, erk);
  const double e1 = sl_geometry(3, 4 * c).eps;
  const double e2 = sl_geometry(3, 16 * c).eps;
  const StencilWindow w1 = sl_geometry(3, 4 * c).window;
  const StencilWindow w2 = sl_geometry(3, 16 * c).window;
  const double expected = -4 * f_poly(3, w1, e1) + f_poly(3, w2, e2) + 4 * phi1;
  CHECK(phi_coefficient(3, c, f2, efd, erk) == doctest::Approx(expected));
  CHECK(phi_coefficient(3, c, 4, 2, efd, erk) == doctest::Approx(expected));
}

TEST_CASE("modified coarse stepper") {
  const auto fine = make_spec(Family::erk, 1, 0.4);
  const auto tab = tableau_for(fine);
  const auto v = oracle::random_vector(64, 13);

  // m = 1 leaves the plain semi-Lagrangian step.
  const int one[] = {1};
  const auto psi1 = modified_coarse_stepper(fine, tab, one, CorrectionSolver::direct());
  CHECK(oracle::max_diff(psi1.step(v), sl_stepper(1, 0.4, 64).step(v)) < 1e-13);

  for (auto f : {Family::erk, Family::sdirk}) {
    for (int p : {1, 3, 5}) {
      const auto spec = make_spec(f, p, f == Family::erk ? 0.5 : 2.0);
      const auto psi = modified_coarse_stepper(spec, tableau_for(spec), 4, 1,
                                               CorrectionSolver::direct());
      for (int k = 0; k < 64; ++k) {
        const double w = grid_omega(k, 64);
        CHECK(std::abs(psi.symbol(w) - psi.assembled().symbol(w)) < 1e-11);
      }
      CHECK(oracle::max_diff(psi.step(v), psi.assembled().apply(v)) < 1e-11);
    }
  }
}

TEST_CASE("modified stepper with an iterative correction solve") {
  const auto spec = make_spec(Family::erk, 3, 1.2);
  const auto tab = tableau_for(spec);
  const auto direct = modified_coarse_stepper(spec, tab, 4, 1, CorrectionSolver::direct());
  const auto iter = modified_coarse_stepper(spec, tab, 4, 1, CorrectionSolver::gmres(1e-10, 64));
  const auto v = oracle::random_vector(64, 3);
  CHECK(oracle::max_diff(direct.step(v), iter.step(v)) < 1e-8);
}

TEST_CASE("rediscretized and ideal coarse steppers") {
  const auto spec = make_spec(Family::sdirk, 1, 0.8);
  const auto tab = tableau_for(spec);
  const auto L = upwind_derivative(1, 64);
  const auto psi = rediscretized_coarse_stepper(spec, tab, 2);
  for (double w : {0.1, 1.0, 2.5}) {
    const Complex z = -1.6 * L.symbol(w);
    CHECK(std::abs(psi.symbol(w) - 1.0 / (1.0 - z)) < 1e-13);
  }
  const auto v = oracle::random_vector(64, 5);
  const auto same = rediscretized_coarse_stepper(spec, tab, 1);
  CHECK(oracle::max_diff(same.step(v), fine_stepper(spec).step(v)) < 1e-13);
  CHECK_THROWS_AS(rediscretized_coarse_stepper(make_spec(Family::erk, 1, 0.5), erk_tableau(1), 2),
                  InputError);

  const auto phi = fine_stepper(spec);
  const auto ideal = ideal_coarse_stepper(phi, 4);
  auto w4 = v;
  for (int i = 0; i < 4; ++i) w4 = phi.step(w4);
  CHECK(oracle::max_diff(ideal.step(v), w4) < 1e-12);
}

TEST_CASE("truncation residual of forward Euler at unit CFL vanishes") {
  const int grids[] = {32, 64};
  const auto rep = truncation_residual(
      [](int nx) { return fine_stepper(make_spec(Family::erk, 1, 1.0, nx)); }, 1.0, 0.0, 2, grids);
  for (double r : rep.residual_rms) CHECK(r < 1e-12);
}

TEST_CASE("leading truncation constants") {
  const int grids[] = {64, 128, 256};
  const auto spec = make_spec(Family::erk, 3, 0.8);
  const auto tab = tableau_for(spec);
  const double coef = mol_truncation_coefficient(3, 0.8, fd_error_constant(3), rk_error_constant(tab));
  const auto mol = truncation_residual(
      [&](int nx) { return fine_stepper(make_spec(Family::erk, 3, 0.8, nx)); }, 0.8, coef, 4, grids);
  CHECK(mol.constant_ratio.back() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(mol.residual_order == doctest::Approx(4.0).epsilon(0.05));

  const auto sl = truncation_residual([](int nx) { return sl_stepper(1, 1.6, nx); }, 1.6,
                                      sl_truncation_coefficient(1, 1.6), 2, grids);
  CHECK(sl_truncation_coefficient(1, 1.6) == doctest::Approx(-0.12));
  CHECK(sl.constant_ratio.back() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("global order of accuracy") {
  const int grids[] = {64, 128, 256};
  for (int p = 1; p <= 5; ++p) {
    const auto rep = global_order(
        [&](int nx) { return fine_stepper(make_spec(Family::sdirk, p, 0.4, nx)); }, 0.4, grids);
    CHECK(std::abs(rep.order - p) <= 0.15);
  }
}

TEST_CASE("invalid discretizations") {
  CHECK_THROWS_AS(fine_stepper(make_spec(Family::erk, 1, -0.5)), InputError);
  CHECK_THROWS_AS(fine_stepper(make_spec(Family::erk, 6, 0.5)), InputError);
  CHECK_THROWS_AS(sl_stepper(1, 0.0, 32), InputError);
  const auto phi = fine_stepper(make_spec(Family::erk, 1, 0.5, 16));
  CHECK_THROWS_AS(phi.step(std::vector<double>(8)), DimensionError);
}

TEST_CASE("log-symbol of every stepper kind") {
  for (auto f : {Family::erk, Family::sdirk}) {
    for (int p = 1; p <= 4; ++p) {
      const auto spec = make_spec(f, p, f == Family::erk ? 0.3 : 1.3);
      const auto tab = tableau_for(spec);
      std::vector<Stepper> steppers = {fine_stepper(spec), ideal_coarse_stepper(fine_stepper(spec), 4),
                                       modified_coarse_stepper(spec, tab, 4, 1, CorrectionSolver::direct()),
                                       sl_stepper(p, 2.7, 64)};
      if (f == Family::sdirk) steppers.push_back(rediscretized_coarse_stepper(spec, tab, 4));
      for (const auto& st : steppers) {
        for (double w : {-3.0, -0.9, 0.05, 0.6, 2.2}) {
          CHECK(std::abs(std::exp(st.log_symbol(w)) - st.symbol(w)) < 1e-13);
        }
      }
    }
  }
}
