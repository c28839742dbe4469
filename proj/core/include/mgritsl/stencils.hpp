#pragma once

#include <span>
#include <vector>

#include "mgritsl/circulant.hpp"

namespace mgritsl {

/// Contiguous point window {-left, ..., right} relative to a reference point.
struct StencilWindow {
  int left = 0;
  int right = 0;

  int size() const { return left + right + 1; }
  std::vector<int> offsets() const;

  friend bool operator==(const StencilWindow&, const StencilWindow&) = default;
};

/// Weights w_j with sum_j w_j v(x + j h) = h^d v^(d)(x + eval_point h) for
/// every polynomial v of degree below offsets.size() (Fornberg's recursion).
std::vector<double> fd_weights(int derivative_order, std::span<const int> offsets,
                               double eval_point);

/// Upwind window of the order-p first-derivative stencil: one-point left
/// bias for odd p, two-point bias for even p.
StencilWindow upwind_window(int p);

/// L_p, with L_p / h a p-th order upwind approximation of d/dx. 1 <= p <= 5.
CirculantOperator upwind_derivative(int p, int nx);

/// Leading error constant of L_p: (-1)^r l! r! / (p+1)!.
double fd_error_constant(int p);

enum class StencilBias { symmetric, left_biased };

/// D^(d)_s, scaled so that D / h^d approximates the d-th derivative to
/// order s. Symmetric stencils need even d and even s and use d+s-1 points;
/// left-biased stencils use d+s points with the extra point on the left.
CirculantOperator high_derivative_operator(int d, int s, StencilBias bias, int nx);

/// The window of high_derivative_operator.
StencilWindow high_derivative_window(int d, int s, StencilBias bias);

/// f_{p+1}(z) = prod_{j=-l}^{r} (j + z) / (p+1)!. The window must have
/// l + r = p.
double f_poly(int p, StencilWindow window, double z);

/// Interpolation weights at offset -eps over the window; they sum to one.
std::vector<double> lagrange_weights(StencilWindow window, double eps);

}  // namespace mgritsl
