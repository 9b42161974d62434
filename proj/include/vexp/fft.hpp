#pragma once

#include <complex>
#include <span>

namespace vexp {

/// Unnormalised in-place complex DFT over a row-major array with the given
/// per-axis lengths (last axis contiguous). Forward uses exp(-2 pi i k j / n).
void fft_inplace(std::span<std::complex<double>> data, std::span<const int> dims, bool inverse);

}  // namespace vexp
