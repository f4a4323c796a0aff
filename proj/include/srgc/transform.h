#ifndef SRGC_TRANSFORM_H_
#define SRGC_TRANSFORM_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "srgc/spectral.h"

namespace srgc {

// Round half away from zero, the single rounding rule used everywhere.
inline int64_t RoundHalfAway(double v) { return std::llround(v); }

// Graph Fourier transform: U^T f.
std::vector<double> Gft(const EigenBasis& basis, const std::vector<double>& f);
// Inverse: U c.
std::vector<double> Igft(const EigenBasis& basis,
                         const std::vector<double>& coeffs);

// Orthonormal DCT-II and its inverse (DCT-III).
std::vector<double> Dct1d(const std::vector<double>& x);
std::vector<double> Idct1d(const std::vector<double>& x);

struct QuantizedVector {
  std::vector<int64_t> levels;
  double step = 1.0;
};

QuantizedVector Quantize(const std::vector<double>& x, double step);
std::vector<double> Dequantize(const QuantizedVector& q);

}  // namespace srgc

#endif  // SRGC_TRANSFORM_H_
