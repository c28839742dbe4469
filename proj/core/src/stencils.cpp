#include "mgritsl/stencils.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "mgritsl/errors.hpp"

namespace mgritsl {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

CirculantOperator circulant_from_window(StencilWindow window, std::span<const double> weights,
                                        int nx) {
  if (nx <= std::max(window.left, window.right) * 2 || nx < window.size()) {
    throw InputError("mesh of " + std::to_string(nx) + " points is too small for a " +
                     std::to_string(window.size()) + "-point stencil");
  }
  std::vector<StencilEntry> stencil;
  const auto offsets = window.offsets();
  for (std::size_t j = 0; j < offsets.size(); ++j) stencil.push_back({offsets[j], weights[j]});
  return {nx, std::move(stencil)};
}

}  // namespace

std::vector<int> StencilWindow::offsets() const {
  std::vector<int> out(static_cast<std::size_t>(size()));
  std::iota(out.begin(), out.end(), -left);
  return out;
}

std::vector<double> fd_weights(int derivative_order, std::span<const int> offsets,
                               double eval_point) {
  const int m = derivative_order;
  const int n = static_cast<int>(offsets.size()) - 1;
  if (m < 0) throw InputError("fd_weights: negative derivative order");
  if (n < m) {
    throw InputError("fd_weights: " + std::to_string(offsets.size()) +
                     " points cannot resolve derivative order " + std::to_string(m));
  }
  if (std::set<int>(offsets.begin(), offsets.end()).size() != offsets.size()) {
    throw InputError("fd_weights: repeated offsets");
  }

  // Fornberg (1988): c[i][k] is the weight of node i for the k-th derivative.
  const auto np = static_cast<std::size_t>(n + 1);
  std::vector<std::vector<double>> c(np, std::vector<double>(static_cast<std::size_t>(m + 1)));
  const auto x = [&](int i) { return static_cast<double>(offsets[static_cast<std::size_t>(i)]); };
  double c1 = 1.0;
  double c4 = x(0) - eval_point;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - eval_point;
    for (int j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(np);
  for (std::size_t i = 0; i < np; ++i) w[i] = c[i][static_cast<std::size_t>(m)];
  return w;
}

StencilWindow upwind_window(int p) {
  if (p < 1 || p > 5) throw InputError("upwind stencils are provided for orders 1..5");
  if (p % 2 == 1) {
    const int l = (p + 1) / 2;
    return {l, l - 1};
  }
  const int l = p / 2 + 1;
  return {l, l - 2};
}

CirculantOperator upwind_derivative(int p, int nx) {
  const auto window = upwind_window(p);
  const auto offsets = window.offsets();
  return circulant_from_window(window, fd_weights(1, offsets, 0.0), nx);
}

double fd_error_constant(int p) {
  const auto w = upwind_window(p);
  const double sign = w.right % 2 == 0 ? 1.0 : -1.0;
  return sign * factorial(w.left) * factorial(w.right) / factorial(p + 1);
}

StencilWindow high_derivative_window(int d, int s, StencilBias bias) {
  if (d < 1 || s < 1) throw InputError("derivative and accuracy orders must be positive");
  if (bias == StencilBias::symmetric) {
    if (d % 2 != 0 || s % 2 != 0) {
      throw InputError("a symmetric stencil of order " + std::to_string(s) + " for derivative " +
                       std::to_string(d) + " needs both orders even");
    }
    const int half = (d + s - 2) / 2;
    return {half, half};
  }
  const int n = d + s;
  const int left = n % 2 == 0 ? n / 2 : (n + 1) / 2;
  return {left, n - 1 - left};
}

CirculantOperator high_derivative_operator(int d, int s, StencilBias bias, int nx) {
  const auto window = high_derivative_window(d, s, bias);
  const auto offsets = window.offsets();
  return circulant_from_window(window, fd_weights(d, offsets, 0.0), nx);
}

double f_poly(int p, StencilWindow window, double z) {
  if (window.left + window.right != p) {
    throw InputError("f_poly: window {" + std::to_string(window.left) + "," +
                     std::to_string(window.right) + "} does not have " + std::to_string(p + 1) +
                     " points");
  }
  double prod = 1.0;
  for (int j = -window.left; j <= window.right; ++j) prod *= j + z;
  return prod / factorial(p + 1);
}

std::vector<double> lagrange_weights(StencilWindow window, double eps) {
  const auto offsets = window.offsets();
  return fd_weights(0, offsets, -eps);
}

}  // namespace mgritsl
