#ifndef SRGC_LIGHT_FIELD_H_
#define SRGC_LIGHT_FIELD_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srgc {

// One channel of one view, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> samples;

  Plane() = default;
  Plane(int w, int h, uint16_t fill = 0)
      : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {}

  uint16_t at(int x, int y) const { return samples[size_t(y) * width + x]; }
  uint16_t& at(int x, int y) { return samples[size_t(y) * width + x]; }

  bool operator==(const Plane&) const = default;
};

struct View {
  std::vector<Plane> planes;  // 1 (luma) or 3 (RGB)

  int width() const { return planes.empty() ? 0 : planes[0].width; }
  int height() const { return planes.empty() ? 0 : planes[0].height; }

  bool operator==(const View&) const = default;
};

// A grid of sub-aperture views. View (s, t) is stored at s * cols + t; s
// indexes rows (vertical angular position), t columns (horizontal). The
// reference view is (0, 0), the top-left one.
struct LightField {
  int rows = 0;  // S
  int cols = 0;  // T
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int channels = 1;
  std::vector<View> views;

  LightField() = default;
  LightField(int rows, int cols, int width, int height, int bit_depth,
             int channels);

  int view_count() const { return rows * cols; }
  size_t pixels_per_view() const { return size_t(width) * height; }
  size_t total_pixels() const { return pixels_per_view() * view_count(); }
  int max_value() const { return (1 << bit_depth) - 1; }

  const View& view(int s, int t) const { return views[size_t(s) * cols + t]; }
  View& view(int s, int t) { return views[size_t(s) * cols + t]; }

  // Throws DataError when any structural invariant is broken.
  void Validate() const;

  bool operator==(const LightField&) const = default;
};

// Horizontal pixel shift per unit angular step, sampled on the reference
// view grid.
struct DisparityMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DisparityMap() = default;
  DisparityMap(int w, int h, float fill = 0.0f)
      : width(w), height(h), values(size_t(w) * h, fill) {}

  float at(int x, int y) const { return values[size_t(y) * width + x]; }
  float& at(int x, int y) { return values[size_t(y) * width + x]; }

  bool operator==(const DisparityMap&) const = default;
};

// Expects `view_{s:02}_{t:02}.pgm` (or .ppm) files for every grid position.
LightField LoadLightField(const std::filesystem::path& dir);
void SaveLightField(const LightField& lf, const std::filesystem::path& dir);

std::string ViewFileName(int s, int t, int channels);

// Disparity file: "LFDM", u32 width, u32 height, u32 reserved (0), then
// width*height little-endian float32 values in raster order.
DisparityMap LoadDisparity(const std::filesystem::path& path);
void SaveDisparity(const DisparityMap& dmap, const std::filesystem::path& path);

// BT.709 luma; returns lf unchanged when it is already single-channel.
LightField ToLuma(const LightField& lf);
// Extracts one channel as a single-channel light field.
LightField ExtractChannel(const LightField& lf, int channel);

// ---------------------------------------------------------------------------
// Synthetic scenes.

struct Texture {
  enum class Kind { kConstant, kGradient, kNoise };
  Kind kind = Kind::kConstant;
  double v0 = 0;          // constant value / gradient start / noise mean
  double v1 = 0;          // gradient end / noise amplitude
  uint32_t seed = 0;      // noise only
};

struct Patch {
  enum class Shape { kRect, kEllipse };
  Shape shape = Shape::kRect;
  int x = 0, y = 0, w = 1, h = 1;  // bounding box in the reference view
  double disparity = 0;
  Texture texture;
};

struct SceneSpec {
  int rows = 3, cols = 3;
  int width = 64, height = 64;
  int bit_depth = 8;
  double background_disparity = 0;
  Texture background;
  std::vector<Patch> patches;
};

// Line-oriented grammar, see docs/scene_spec.md.
SceneSpec ParseSceneSpec(std::string_view text);
SceneSpec LoadSceneSpec(const std::filesystem::path& path);

// Renders every view by shifting patches by disparity * (t, s) pixels
// (x - d*t, y - d*s). Nearer (larger-disparity) patches paint last. The
// returned map is the exact disparity of the visible surface in the
// reference view.
std::pair<LightField, DisparityMap> SynthesizeLightField(const SceneSpec& spec);

}  // namespace srgc

#endif  // SRGC_LIGHT_FIELD_H_
