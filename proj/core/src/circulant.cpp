#include "mgritsl/circulant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "mgritsl/errors.hpp"

namespace mgritsl {
namespace {

// Stencils wider than this are applied through the FFT.
constexpr std::size_t kDirectApplyLimit = 16;

int canonical_offset(long long offset, int nx) {
  long long c = offset % nx;
  if (c < 0) c += nx;
  if (c > nx / 2) c -= nx;
  return static_cast<int>(c);
}

int positive_offset(int offset, int nx) { return ((offset % nx) + nx) % nx; }

void check_same_size(const CirculantOperator& a, const CirculantOperator& b, const char* what) {
  if (a.nx() != b.nx()) {
    throw DimensionError(std::string(what) + ": operators act on " + std::to_string(a.nx()) +
                         " and " + std::to_string(b.nx()) + " points");
  }
}

std::vector<Complex> half_spectrum_of(const std::vector<StencilEntry>& stencil, int nx) {
  std::vector<double> column(static_cast<std::size_t>(nx), 0.0);
  for (const auto& e : stencil) column[positive_offset(e.offset, nx)] += e.weight;
  std::vector<Complex> half(static_cast<std::size_t>(nx / 2 + 1));
  detail::forward_real(column, half);
  // r2c computes sum_j w_j e^{-i j omega}; the symbol uses e^{+i j omega}.
  for (auto& z : half) z = std::conj(z);
  return half;
}

CirculantOperator from_merged(int nx, const std::map<int, double>& merged) {
  std::vector<StencilEntry> stencil;
  stencil.reserve(merged.size());
  for (const auto& [offset, weight] : merged) stencil.push_back({offset, weight});
  return CirculantOperator(nx, std::move(stencil));
}

}  // namespace

CirculantOperator::CirculantOperator(int nx, std::vector<StencilEntry> stencil)
    : nx_(nx), stencil_(std::move(stencil)) {
  if (nx <= 0) throw InputError("circulant operator needs n_x > 0");
  for (auto& e : stencil_) {
    if (std::abs(e.offset) >= nx) {
      throw InputError("stencil offset " + std::to_string(e.offset) +
                       " does not fit a periodic mesh of " + std::to_string(nx) + " points");
    }
    e.offset = canonical_offset(e.offset, nx);
  }
  std::sort(stencil_.begin(), stencil_.end(),
            [](const StencilEntry& a, const StencilEntry& b) { return a.offset < b.offset; });
  auto dup = std::adjacent_find(
      stencil_.begin(), stencil_.end(),
      [](const StencilEntry& a, const StencilEntry& b) { return a.offset == b.offset; });
  if (dup != stencil_.end()) {
    throw InputError("repeated stencil offset " + std::to_string(dup->offset));
  }
  finalize(kPruneTolerance);
}

void CirculantOperator::finalize(double prune) {
  std::erase_if(stencil_, [prune](const StencilEntry& e) { return std::abs(e.weight) < prune; });
  if (stencil_.size() > kDirectApplyLimit) {
    half_spectrum_ = std::make_shared<const std::vector<Complex>>(half_spectrum_of(stencil_, nx_));
  }
}

CirculantOperator CirculantOperator::identity(int nx) { return {nx, {{0, 1.0}}}; }

CirculantOperator CirculantOperator::shift(int nx, int offset) {
  return {nx, {{canonical_offset(offset, nx), 1.0}}};
}

CirculantOperator CirculantOperator::from_eigenvalues(std::span<const Complex> eigenvalues,
                                                      double prune) {
  const int nx = static_cast<int>(eigenvalues.size());
  if (nx == 0) throw InputError("from_eigenvalues: empty spectrum");
  std::vector<Complex> weights(static_cast<std::size_t>(nx));
  // w_j = (1/n) sum_k sigma_k e^{-2 pi i j k / n}
  detail::forward_complex(eigenvalues, weights);
  CirculantOperator op;
  op.nx_ = nx;
  for (int j = 0; j < nx; ++j) {
    op.stencil_.push_back({canonical_offset(j, nx), weights[j].real() / nx});
  }
  std::sort(op.stencil_.begin(), op.stencil_.end(),
            [](const StencilEntry& a, const StencilEntry& b) { return a.offset < b.offset; });
  op.finalize(prune);
  return op;
}

Complex CirculantOperator::symbol(double omega) const {
  Complex s = 0.0;
  for (const auto& e : stencil_) s += e.weight * std::polar(1.0, e.offset * omega);
  return s;
}

Complex CirculantOperator::symbol_increment(double omega) const {
  Complex s = 0.0;
  for (const auto& e : stencil_) s += e.weight * expi_minus_one(e.offset * omega);
  return s;
}

Complex expi_minus_one(double x) {
  const double half = std::sin(0.5 * x);
  return {-2.0 * half * half, std::sin(x)};
}

Complex log1p_complex(Complex z) {
  if (std::abs(z) > 0.5) return std::log(1.0 + z);
  const double x = z.real();
  const double y = z.imag();
  return {0.5 * std::log1p(x * (2.0 + x) + y * y), std::atan2(y, 1.0 + x)};
}

Complex expm1_complex(Complex z) {
  const double half = std::sin(0.5 * z.imag());
  return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * half * half,
          std::exp(z.real()) * std::sin(z.imag())};
}

std::vector<Complex> CirculantOperator::eigenvalues() const {
  const auto half = half_spectrum_ ? *half_spectrum_ : half_spectrum_of(stencil_, nx_);
  std::vector<Complex> full(static_cast<std::size_t>(nx_));
  for (int k = 0; k < nx_; ++k) full[k] = k <= nx_ / 2 ? half[k] : std::conj(half[nx_ - k]);
  return full;
}

Vector CirculantOperator::apply(std::span<const double> v) const {
  Vector out(v.size());
  apply(v, out);
  return out;
}

void CirculantOperator::apply(std::span<const double> v, std::span<double> out) const {
  if (static_cast<int>(v.size()) != nx_ || static_cast<int>(out.size()) != nx_) {
    throw DimensionError("apply: vector of length " + std::to_string(v.size()) +
                         " for an operator on " + std::to_string(nx_) + " points");
  }
  if (half_spectrum_) {
    std::vector<Complex> hat(static_cast<std::size_t>(nx_ / 2 + 1));
    detail::forward_real(v, hat);
    const double inv_n = 1.0 / nx_;
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= (*half_spectrum_)[k] * inv_n;
    detail::backward_real(hat, out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = v.size();
  for (const auto& e : stencil_) {
    const auto s = static_cast<std::size_t>(positive_offset(e.offset, nx_));
    const double w = e.weight;
    for (std::size_t i = 0; i < n - s; ++i) out[i] += w * v[i + s];
    for (std::size_t i = n - s; i < n; ++i) out[i] += w * v[i + s - n];
  }
}

std::vector<double> CirculantOperator::dense() const {
  const auto n = static_cast<std::size_t>(nx_);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : stencil_) {
      a[i * n + (i + static_cast<std::size_t>(positive_offset(e.offset, nx_))) % n] += e.weight;
    }
  }
  return a;
}

CirculantOperator compose(const CirculantOperator& a, const CirculantOperator& b) {
  check_same_size(a, b, "compose");
  const int nx = a.nx();
  if (a.stencil().size() * b.stencil().size() > 4 * static_cast<std::size_t>(nx)) {
    auto ea = a.eigenvalues();
    const auto eb = b.eigenvalues();
    for (std::size_t k = 0; k < ea.size(); ++k) ea[k] *= eb[k];
    return CirculantOperator::from_eigenvalues(ea, kPruneTolerance);
  }
  std::map<int, double> merged;
  for (const auto& x : a.stencil()) {
    for (const auto& y : b.stencil()) {
      merged[canonical_offset(static_cast<long long>(x.offset) + y.offset, nx)] +=
          x.weight * y.weight;
    }
  }
  return from_merged(nx, merged);
}

CirculantOperator add(const CirculantOperator& a, const CirculantOperator& b) {
  check_same_size(a, b, "add");
  std::map<int, double> merged;
  for (const auto& x : a.stencil()) merged[x.offset] += x.weight;
  for (const auto& y : b.stencil()) merged[y.offset] += y.weight;
  return from_merged(a.nx(), merged);
}

CirculantOperator scale(const CirculantOperator& a, double s) {
  auto stencil = a.stencil();
  for (auto& e : stencil) e.weight *= s;
  return {a.nx(), std::move(stencil)};
}

CirculantOperator power(const CirculantOperator& a, int m) {
  if (m < 0) throw InputError("power: negative exponent");
  auto result = CirculantOperator::identity(a.nx());
  auto base = a;
  while (m > 0) {
    if (m & 1) result = compose(result, base);
    m >>= 1;
    if (m > 0) base = compose(base, base);
  }
  return result;
}

CirculantInverse::CirculantInverse(const CirculantOperator& op, double singular_tol)
    : nx_(op.nx()) {
  inverse_half_spectrum_ = half_spectrum_of(op.stencil(), nx_);
  for (std::size_t k = 0; k < inverse_half_spectrum_.size(); ++k) {
    const Complex s = inverse_half_spectrum_[k];
    if (std::abs(s) < singular_tol) {
      const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / nx_;
      throw SingularityError("circulant operator is singular at omega = " +
                             std::to_string(omega) + " (|symbol| = " +
                             std::to_string(std::abs(s)) + ")");
    }
    inverse_half_spectrum_[k] = 1.0 / (s * static_cast<double>(nx_));
  }
}

Vector CirculantInverse::solve(std::span<const double> b) const {
  Vector x(b.size());
  solve(b, x);
  return x;
}

void CirculantInverse::solve(std::span<const double> b, std::span<double> x) const {
  if (static_cast<int>(b.size()) != nx_ || static_cast<int>(x.size()) != nx_) {
    throw DimensionError("solve: vector of length " + std::to_string(b.size()) +
                         " for an operator on " + std::to_string(nx_) + " points");
  }
  std::vector<Complex> hat(inverse_half_spectrum_.size());
  detail::forward_real(b, hat);
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= inverse_half_spectrum_[k];
  detail::backward_real(hat, x);
}

Vector solve_direct(const CirculantOperator& op, std::span<const double> b) {
  return CirculantInverse(op).solve(b);
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

GmresResult solve_gmres(const CirculantOperator& op, std::span<const double> b, double rel_tol,
                        int max_iters) {
  const auto n = static_cast<std::size_t>(op.nx());
  if (b.size() != n) {
    throw DimensionError("gmres: right-hand side of length " + std::to_string(b.size()) +
                         " for an operator on " + std::to_string(n) + " points");
  }
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InputError("gmres: rel_tol must lie in (0, 1)");
  if (max_iters < 1) throw InputError("gmres: max_iters must be positive");

  GmresResult result;
  result.x.assign(n, 0.0);
  const double beta = norm2(b);
  if (beta == 0.0) {
    result.converged = true;
    return result;
  }

  const auto kmax = static_cast<std::size_t>(max_iters);
  std::vector<Vector> basis;
  basis.reserve(kmax + 1);
  basis.emplace_back(b.begin(), b.end());
  for (double& x : basis[0]) x /= beta;

  // Hessenberg columns after Givens rotation, stored column-wise.
  std::vector<std::vector<double>> r(kmax, std::vector<double>(kmax + 1, 0.0));
  std::vector<double> cs(kmax), sn(kmax), g(kmax + 1, 0.0);
  g[0] = beta;

  std::size_t k = 0;
  Vector w(n);
  while (k < kmax) {
    op.apply(basis[k], w);
    auto& h = r[k];
    for (std::size_t j = 0; j <= k; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += w[i] * basis[j][i];
      h[j] = dot;
      for (std::size_t i = 0; i < n; ++i) w[i] -= dot * basis[j][i];
    }
    const double hnext = norm2(w);
    h[k + 1] = hnext;

    for (std::size_t j = 0; j < k; ++j) {
      const double t = cs[j] * h[j] + sn[j] * h[j + 1];
      h[j + 1] = -sn[j] * h[j] + cs[j] * h[j + 1];
      h[j] = t;
    }
    const double denom = std::hypot(h[k], h[k + 1]);
    cs[k] = h[k] / denom;
    sn[k] = h[k + 1] / denom;
    h[k] = denom;
    h[k + 1] = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];
    ++k;

    if (hnext <= 1e-14 * beta) {
      result.breakdown = true;
      break;
    }
    if (std::abs(g[k]) / beta <= rel_tol) break;
    if (k < kmax) {
      basis.emplace_back(w);
      for (double& x : basis.back()) x /= hnext;
    }
  }

  std::vector<double> y(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double s = g[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= r[j][i] * y[j];
    y[i] = s / r[i][i];
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) result.x[i] += y[j] * basis[j][i];
  }

  result.iterations = static_cast<int>(k);
  const Vector ax = op.apply(result.x);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res += (b[i] - ax[i]) * (b[i] - ax[i]);
  result.relative_residual = std::sqrt(res) / beta;
  result.converged = result.relative_residual <= rel_tol * (1.0 + 1e-12) || result.breakdown;
  return result;
}

}  // namespace mgritsl
