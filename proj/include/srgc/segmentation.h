#ifndef SRGC_SEGMENTATION_H_
#define SRGC_SEGMENTATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "srgc/light_field.h"

namespace srgc {

// Per-view label maps. `views` holds either just the reference view or all
// rows*cols views in (s, t) raster order.
struct SegmentationMap {
  int width = 0;
  int height = 0;
  int label_count = 0;
  std::vector<std::vector<int32_t>> views;

  bool operator==(const SegmentationMap&) const = default;
};

// Disparities travel as signed multiples of 1/8 pixel.
inline constexpr int kDisparityScale = 8;

int QuantizeDisparity(double disparity);
inline double DequantizeDisparity(int eighths) {
  return double(eighths) / kDisparityScale;
}

// round-half-away(eighths / 8 * delta), computed exactly in integers.
inline int DisparityShift(int eighths, int delta) {
  const long long n = static_cast<long long>(eighths) * delta;
  const long long mag = (n < 0 ? -n : n) + kDisparityScale / 2;
  const long long r = mag / kDisparityScale;
  return static_cast<int>(n < 0 ? -r : r);
}

// Corresponding super-pixels across all views. Pixels are flat indices
// y * width + x, sorted ascending (raster order) in every view.
struct SuperRay {
  int label = 0;
  int disparity_eighths = 0;
  std::vector<std::vector<uint32_t>> pixels;  // indexed by view

  double disparity() const { return DequantizeDisparity(disparity_eighths); }
  size_t vertex_count() const;
};

struct SlicParams {
  int superpixels = 64;
  double compactness = 10.0;
  int iterations = 10;
  // Fragments smaller than this fraction of the mean region size are merged
  // into their largest 4-neighbour region.
  double min_region_fraction = 0.25;
};

// SLIC over one single-channel plane. Intensities are rescaled to the 8-bit
// range so `compactness` means the same at every bit depth. The result holds
// one view whose labels are 4-connected and numbered by first appearance in
// raster order.
SegmentationMap SlicSegment(const Plane& plane, int bit_depth,
                            const SlicParams& params);

// Lower median of the disparity samples under `region` (flat indices into
// dmap), so the result is always an observed value.
double MedianDisparity(std::span<const uint32_t> region,
                       const DisparityMap& dmap);

// Per-label quantized median disparities of a reference segmentation.
std::vector<int> LabelDisparities(const SegmentationMap& ref,
                                  const DisparityMap& dmap);

// Projects reference labels into every view of a rows x cols grid. Reference
// pixel (x, y) of label l lands at (x - shift(d_l, t), y - shift(d_l, s)).
// Collisions go to the larger disparity, then to the smaller label; holes are
// filled by repeated 4-neighbour majority votes (ties to the smaller label).
SegmentationMap ProjectLabels(const SegmentationMap& ref,
                              std::span<const int> disparity_eighths, int rows,
                              int cols);

std::vector<SuperRay> BuildSuperRays(const SegmentationMap& all_views,
                                     std::span<const int> disparity_eighths);
std::vector<SuperRay> BuildSuperRays(const SegmentationMap& all_views,
                                     const DisparityMap& dmap);

}  // namespace srgc

#endif  // SRGC_SEGMENTATION_H_
