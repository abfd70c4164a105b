#pragma once

#include <complex>
#include <vector>

namespace kdvlab::detail {

// Real transforms of length n with the circle normalization:
//   analyze:    c_j = (1/n) sum_m f_m e^{-2 pi i j m / n},  j = 0..n/2
//   synthesize: f_m = sum_{|j| <= K} c_j e^{2 pi i j m / n}  (Hermitian c)
// Plans are cached per length and per thread.
std::vector<std::complex<double>> analyze(const std::vector<double>& samples);
std::vector<double> synthesize(const std::vector<std::complex<double>>& half, int n);

}  // namespace kdvlab::detail
