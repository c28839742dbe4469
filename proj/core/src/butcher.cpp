#include "mgritsl/butcher.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mgritsl/errors.hpp"

namespace mgritsl {
namespace {

ButcherTableau make(std::string name, TableauKind kind, int order,
                    std::vector<std::vector<double>> rows, std::vector<double> b) {
  ButcherTableau t;
  t.name = std::move(name);
  t.kind = kind;
  t.order = order;
  t.stages = static_cast<int>(b.size());
  for (const auto& row : rows) t.a.insert(t.a.end(), row.begin(), row.end());
  t.b = std::move(b);
  validate(t);
  return t;
}

double inv_factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return 1.0 / f;
}

// Five-stage SDIRK with the diagonal of Kennedy and Carpenter's fifth-order
// method. Off-diagonal rows are uniform with abscissae
// (gamma, 0.45, 0.6, 0.8, 1); b solves the order conditions of the linear
// test equation, which fixes the stability function completely.
ButcherTableau sdirk5() {
  constexpr double g = 0.27805384113645232493;
  constexpr double a21 = 0.17194615886354767507;
  constexpr double a3 = 0.16097307943177383753;
  constexpr double a4 = 0.17398205295451589169;
  constexpr double a5 = 0.18048653971588691877;
  return make("SDIRK5", TableauKind::sdirk, 5,
              {{g, 0, 0, 0, 0},
               {a21, g, 0, 0, 0},
               {a3, a3, g, 0, 0},
               {a4, a4, a4, g, 0},
               {a5, a5, a5, a5, g}},
              {-0.21250539005364965548, -7.6001627130128074039, 17.986786941674684523,
               -11.806039172128987095, 2.6319203335207596308});
}

}  // namespace

void validate(const ButcherTableau& tab) {
  const int s = tab.stages;
  if (s < 1 || tab.b.size() != static_cast<std::size_t>(s) ||
      tab.a.size() != static_cast<std::size_t>(s * s)) {
    throw TableauError(tab.name + ": inconsistent tableau dimensions");
  }
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      if (tab.coeff(i, j) != 0.0) throw TableauError(tab.name + ": A is not lower triangular");
    }
    if (tab.kind == TableauKind::explicit_rk && tab.coeff(i, i) != 0.0) {
      throw TableauError(tab.name + ": explicit method with nonzero diagonal");
    }
    if (tab.kind == TableauKind::sdirk && tab.coeff(i, i) != tab.coeff(0, 0)) {
      throw TableauError(tab.name + ": SDIRK diagonal entries differ");
    }
  }
  if (tab.kind == TableauKind::sdirk && !(tab.coeff(0, 0) > 0.0)) {
    throw TableauError(tab.name + ": SDIRK diagonal must be positive");
  }
  double sum = 0.0;
  for (double w : tab.b) sum += w;
  if (std::abs(sum - 1.0) > 1e-12) throw TableauError(tab.name + ": weights do not sum to one");
}

ButcherTableau erk_tableau(int q) {
  const auto E = TableauKind::explicit_rk;
  switch (q) {
    case 1:
      return make("ERK1", E, 1, {{0}}, {1});
    case 2:
      return make("ERK2", E, 2, {{0, 0}, {1, 0}}, {0.5, 0.5});
    case 3:
      return make("ERK3", E, 3, {{0, 0, 0}, {0.5, 0, 0}, {-1, 2, 0}},
                  {1.0 / 6, 2.0 / 3, 1.0 / 6});
    case 4:
      return make("ERK4", E, 4, {{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                  {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6});
    case 5:
      return make("ERK5", E, 5,
                  {{0, 0, 0, 0, 0, 0},
                   {0.25, 0, 0, 0, 0, 0},
                   {0.125, 0.125, 0, 0, 0, 0},
                   {0, 0, 0.5, 0, 0, 0},
                   {3.0 / 16, -3.0 / 8, 3.0 / 8, 9.0 / 16, 0, 0},
                   {-3.0 / 7, 8.0 / 7, 6.0 / 7, -12.0 / 7, 8.0 / 7, 0}},
                  {7.0 / 90, 0, 16.0 / 45, 2.0 / 15, 16.0 / 45, 7.0 / 90});
    default:
      throw InputError("ERK methods are provided for orders 1..5");
  }
}

ButcherTableau sdirk_tableau(int q) {
  const auto S = TableauKind::sdirk;
  switch (q) {
    case 1:
      return make("SDIRK1", S, 1, {{1}}, {1});
    case 2: {
      const double g = 1.0 - 1.0 / std::numbers::sqrt2;
      return make("SDIRK2", S, 2, {{g, 0}, {1 - g, g}}, {1 - g, g});
    }
    case 3: {
      const double g = 0.43586652150845899942;
      const double b1 = -(6 * g * g - 16 * g + 1) / 4;
      const double b2 = (6 * g * g - 20 * g + 5) / 4;
      return make("SDIRK3", S, 3, {{g, 0, 0}, {(1 - g) / 2, g, 0}, {b1, b2, g}}, {b1, b2, g});
    }
    case 4:
      return make("SDIRK4", S, 4,
                  {{0.25, 0, 0, 0, 0},
                   {0.5, 0.25, 0, 0, 0},
                   {17.0 / 50, -1.0 / 25, 0.25, 0, 0},
                   {371.0 / 1360, -137.0 / 2720, 15.0 / 544, 0.25, 0},
                   {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12, 0.25}},
                  {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12, 0.25});
    case 5:
      return sdirk5();
    default:
      throw InputError("SDIRK methods are provided for orders 1..5");
  }
}

std::vector<double> taylor_coefficients(const ButcherTableau& tab, int count) {
  const auto s = static_cast<std::size_t>(tab.stages);
  std::vector<double> v(s, 1.0), next(s);
  std::vector<double> beta;
  for (int j = 1; j <= count; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < s; ++i) dot += tab.b[i] * v[i];
    beta.push_back(dot);
    for (std::size_t i = 0; i < s; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k) acc += tab.a[i * s + k] * v[k];
      next[i] = acc;
    }
    v.swap(next);
  }
  return beta;
}

double rk_error_constant(const ButcherTableau& tab) {
  const int q = tab.order;
  const auto beta = taylor_coefficients(tab, q + 1);
  for (int j = 1; j <= q; ++j) {
    if (std::abs(beta[j - 1] - inv_factorial(j)) > 1e-12) {
      throw TableauError(tab.name + ": order condition " + std::to_string(j) + " fails");
    }
  }
  return beta[q] - inv_factorial(q + 1);
}

std::complex<double> stability_function(const ButcherTableau& tab, std::complex<double> z) {
  return 1.0 + stability_function_increment(tab, z);
}

std::complex<double> stability_function_increment(const ButcherTableau& tab,
                                                  std::complex<double> z) {
  // Stage values k_i solve k_i = 1 + z sum_{j<=i} a_ij k_j.
  const int s = tab.stages;
  std::vector<std::complex<double>> k(static_cast<std::size_t>(s));
  std::complex<double> r = 0.0;
  for (int i = 0; i < s; ++i) {
    std::complex<double> rhs = 1.0;
    for (int j = 0; j < i; ++j) rhs += z * tab.coeff(i, j) * k[j];
    const std::complex<double> pivot = 1.0 - z * tab.coeff(i, i);
    if (std::abs(pivot) < 1e-14) {
      throw InputError(tab.name + ": stability function has a pole at this z");
    }
    k[i] = rhs / pivot;
    r += z * tab.b[i] * k[i];
  }
  return r;
}

}  // namespace mgritsl
