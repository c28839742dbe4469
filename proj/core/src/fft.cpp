#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

namespace mgritsl::detail {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan c2c = nullptr;
};

const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Scratch arrays only serve the planner; FFTW_UNALIGNED lets any buffer be
  // used at execution time.
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<Complex> half(static_cast<std::size_t>(n / 2 + 1));
  std::vector<Complex> full_in(static_cast<std::size_t>(n));
  std::vector<Complex> full_out(static_cast<std::size_t>(n));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.r2c = fftw_plan_dft_r2c_1d(n, real.data(), reinterpret_cast<fftw_complex*>(half.data()),
                               flags);
  p.c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(half.data()), real.data(),
                               flags | FFTW_DESTROY_INPUT);
  p.c2c = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(full_in.data()),
                           reinterpret_cast<fftw_complex*>(full_out.data()), FFTW_FORWARD,
                           flags);
  return cache.emplace(n, p).first->second;
}

}  // namespace

void forward_real(std::span<const double> in, std::span<Complex> out) {
  const int n = static_cast<int>(in.size());
  // r2c does not modify its input, but the C API takes a non-const pointer.
  fftw_execute_dft_r2c(plans_for(n).r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void backward_real(std::span<const Complex> in, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  // c2r overwrites its input.
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
}

void forward_complex(std::span<const Complex> in, std::span<Complex> out) {
  const int n = static_cast<int>(in.size());
  fftw_execute_dft(plans_for(n).c2c,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace mgritsl::detail
