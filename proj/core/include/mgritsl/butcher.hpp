#pragma once

#include <complex>
#include <string>
#include <vector>

namespace mgritsl {

enum class TableauKind { explicit_rk, sdirk };

/// Butcher tableau of an explicit or singly diagonally implicit RK method.
/// Only A and b enter the one-step map of a linear autonomous problem.
struct ButcherTableau {
  std::string name;
  TableauKind kind = TableauKind::explicit_rk;
  int order = 1;
  int stages = 1;
  std::vector<double> a;  // stages x stages, row-major
  std::vector<double> b;

  double coeff(int i, int j) const { return a[static_cast<std::size_t>(i * stages + j)]; }
  /// Diagonal entry of an SDIRK method (0 for explicit methods).
  double diagonal() const { return coeff(0, 0); }
};

/// Validates structure: shape, strictly lower triangular A (explicit) or
/// lower triangular with one positive diagonal value (SDIRK), and
/// sum(b) = 1. Throws TableauError.
void validate(const ButcherTableau& tab);

/// Shipped methods, q = 1..5: forward Euler, Heun, Kutta's third-order
/// method, classical RK4 and Butcher's six-stage fifth-order method.
ButcherTableau erk_tableau(int q);
/// Shipped methods, q = 1..5: backward Euler, Alexander's two- and
/// three-stage L-stable methods, the five-stage order-4 method of Hairer
/// and Wanner, and a five-stage method with diagonal 0.27805384113645...
ButcherTableau sdirk_tableau(int q);

/// beta_j = b^T A^{j-1} 1, the z^j Taylor coefficient of R(z), j = 1..count.
std::vector<double> taylor_coefficients(const ButcherTableau& tab, int count);

/// e_RK = beta_{q+1} - 1/(q+1)!. Throws TableauError if beta_j != 1/j! for
/// some j <= q (to 1e-12).
double rk_error_constant(const ButcherTableau& tab);

/// R(z) = 1 + z b^T (I - z A)^{-1} 1, evaluated by forward substitution.
/// Throws InputError at a pole (1 - a_ii z = 0).
std::complex<double> stability_function(const ButcherTableau& tab, std::complex<double> z);

/// R(z) - 1 = z b^T (I - z A)^{-1} 1, without the cancellation of
/// stability_function(tab, z) - 1 for small z.
std::complex<double> stability_function_increment(const ButcherTableau& tab,
                                                  std::complex<double> z);

}  // namespace mgritsl
