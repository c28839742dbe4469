#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace mgritsl {

using Complex = std::complex<double>;
using Vector = std::vector<double>;

/// One nonzero of a periodic stencil: row i holds `weight` in column
/// (i + offset) mod n_x.
struct StencilEntry {
  int offset = 0;
  double weight = 0.0;

  friend bool operator==(const StencilEntry&, const StencilEntry&) = default;
};

/// Weights smaller than this are dropped when stencils are combined.
inline constexpr double kPruneTolerance = 1e-15;

/// A real periodic constant-coefficient operator on n_x points, stored as
/// its stencil. Immutable after construction.
///
/// Offsets are kept in canonical form in (-n_x/2, n_x/2] and sorted. Wide
/// stencils (e.g. inverses assembled from their spectrum) are applied
/// through the FFT; narrow ones by direct summation.
class CirculantOperator {
 public:
  /// Builds the operator from a stencil. Offsets must be distinct with
  /// |offset| < n_x; throws InputError otherwise.
  CirculantOperator(int nx, std::vector<StencilEntry> stencil);

  static CirculantOperator identity(int nx);
  /// (S v)_i = v_{i+offset}.
  static CirculantOperator shift(int nx, int offset);

  /// Inverse of `eigenvalues()`: builds the real stencil whose eigenvalues at
  /// omega_k = 2 pi k / n_x are `eigenvalues[k]`, pruning weights below
  /// `prune`. The imaginary part of the reconstruction is discarded.
  static CirculantOperator from_eigenvalues(std::span<const Complex> eigenvalues,
                                            double prune = 1e-14);

  int nx() const { return nx_; }
  const std::vector<StencilEntry>& stencil() const { return stencil_; }

  /// Sum_j w_j exp(i j omega).
  Complex symbol(double omega) const;
  /// symbol(omega) - symbol(0), summed as Sum_j w_j (exp(i j omega) - 1) so
  /// that small omega loses no digits.
  Complex symbol_increment(double omega) const;

  /// Eigenvalues symbol(2 pi k / n_x) for k = 0, ..., n_x - 1.
  std::vector<Complex> eigenvalues() const;

  Vector apply(std::span<const double> v) const;
  /// out must not alias v.
  void apply(std::span<const double> v, std::span<double> out) const;

  /// Dense row-major n_x by n_x matrix; meant for small n_x.
  std::vector<double> dense() const;

 private:
  CirculantOperator() = default;
  void finalize(double prune);

  int nx_ = 0;
  std::vector<StencilEntry> stencil_;
  // Half spectrum (k = 0..n_x/2), present only for wide stencils.
  std::shared_ptr<const std::vector<Complex>> half_spectrum_;
};

/// exp(i x) - 1, accurate for small x.
Complex expi_minus_one(double x);
/// log(1 + z), accurate for small |z|.
Complex log1p_complex(Complex z);
/// exp(z) - 1, accurate for small |z|.
Complex expm1_complex(Complex z);

CirculantOperator compose(const CirculantOperator& a, const CirculantOperator& b);
CirculantOperator add(const CirculantOperator& a, const CirculantOperator& b);
CirculantOperator scale(const CirculantOperator& a, double s);
/// a^m, m >= 0; power(a, 0) is the identity.
CirculantOperator power(const CirculantOperator& a, int m);

/// Exact inverse of a circulant operator by Fourier diagonalization.
/// Construction throws SingularityError if some eigenvalue has modulus
/// below `singular_tol`.
class CirculantInverse {
 public:
  explicit CirculantInverse(const CirculantOperator& op, double singular_tol = 1e-14);

  int nx() const { return nx_; }
  Vector solve(std::span<const double> b) const;
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  int nx_;
  std::vector<Complex> inverse_half_spectrum_;
};

/// x with apply(op, x) = b.
Vector solve_direct(const CirculantOperator& op, std::span<const double> b);

struct GmresResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  /// Krylov space became invariant (happy breakdown).
  bool breakdown = false;
};

/// Unrestarted, unpreconditioned GMRES from a zero initial guess. Stops when
/// ||b - A x|| / ||b|| <= rel_tol or after max_iters iterations.
GmresResult solve_gmres(const CirculantOperator& op, std::span<const double> b,
                        double rel_tol, int max_iters);

}  // namespace mgritsl
