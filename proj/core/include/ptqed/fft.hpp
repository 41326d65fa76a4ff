// fft.hpp -- minimal in-place radix-2 complex FFT used for spectrum assembly.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ptqed::fft {

// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

// In-place iterative Cooley-Tukey transform; size must be a power of two.
// Forward convention: X_k = sum_n x_n exp(-2 pi i n k / N).  The inverse
// applies the conjugate kernel and the 1/N factor.
void transform(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace ptqed::fft
