#pragma once

// Thin FFTW wrapper shared by the circulant kernels. Plans are created once
// per transform length under a lock (the FFTW planner is not thread-safe)
// and then executed through the new-array interface, which is.

#include <complex>
#include <span>
#include <vector>

namespace mgritsl::detail {

using Complex = std::complex<double>;

/// out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2. out has n/2+1 slots.
void forward_real(std::span<const double> in, std::span<Complex> out);

/// out[j] = sum_k in[k] exp(+2 pi i j k / n) over the Hermitian extension of
/// the half spectrum `in` (n/2+1 slots). Unnormalized.
void backward_real(std::span<const Complex> in, std::span<double> out);

/// out[j] = sum_k in[k] exp(-2 pi i j k / n) for a full complex sequence.
void forward_complex(std::span<const Complex> in, std::span<Complex> out);

}  // namespace mgritsl::detail
