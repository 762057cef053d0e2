#pragma once

#include <complex>
#include <cstddef>

namespace cofdm::fft {

// In-place complex DFTs with FFTW conventions:
//   forward:  X[k] = sum_n x[n] e^{-2*pi*i*n*k/N}   (unscaled)
//   backward: x[n] = sum_k X[k] e^{+2*pi*i*n*k/N}   (unscaled; forward+backward = N*identity)
// Plans are cached per (size, direction) behind a mutex and executed via the
// new-array interface, so concurrent calls from multiple threads are safe.
void forward(std::complex<double>* data, std::size_t n);
void backward(std::complex<double>* data, std::size_t n);

// Unitary variants (scaled by 1/sqrt(N)); forward_unitary + backward_unitary = identity.
void forward_unitary(std::complex<double>* data, std::size_t n);
void backward_unitary(std::complex<double>* data, std::size_t n);

}  // namespace cofdm::fft
