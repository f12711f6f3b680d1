#ifndef PGC_FFT_HPP
#define PGC_FFT_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pgc::fft {

/// In-place iterative radix-2 transform. data.size() must be a power of two.
/// The inverse transform is unscaled.
void transform(std::span<std::complex<double>> data, bool inverse);

/// Linear convolution of two real sequences, keeping the first `keep`
/// output terms. Pads to a power of two and packs both inputs into one
/// complex transform.
std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b, std::size_t keep);

}  // namespace pgc::fft

#endif  // PGC_FFT_HPP
