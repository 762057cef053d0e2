#include "cofdm/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace cofdm::fft {

namespace {

// FFTW planning is not thread-safe; execution via the new-array interface is.
// Plans are created once per (size, direction) with FFTW_UNALIGNED so they
// apply to any buffer.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    const auto key = std::make_pair(n, sign);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(std::complex<double>* data, std::size_t n, int sign) {
  if (n == 0) return;
  fftw_plan p = cache().get(n, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace

void forward(std::complex<double>* data, std::size_t n) { execute(data, n, FFTW_FORWARD); }

void backward(std::complex<double>* data, std::size_t n) { execute(data, n, FFTW_BACKWARD); }

void forward_unitary(std::complex<double>* data, std::size_t n) {
  forward(data, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) data[i] *= s;
}

void backward_unitary(std::complex<double>* data, std::size_t n) {
  backward(data, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) data[i] *= s;
}

}  // namespace cofdm::fft
