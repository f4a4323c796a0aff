#include "srgc/segmentation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "srgc/error.h"

namespace srgc {

size_t SuperRay::vertex_count() const {
  size_t n = 0;
  for (const auto& v : pixels) n += v.size();
  return n;
}

int QuantizeDisparity(double disparity) {
  return static_cast<int>(std::llround(disparity * kDisparityScale));
}

namespace {

struct Center {
  double x, y, intensity;
};

// Union-find over connected components, tracking merged sizes.
class Components {
 public:
  explicit Components(size_t n) : parent_(n), size_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int Find(int a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  // Merges `from` into `into`; `into` stays the representative.
  void Merge(int from, int into) {
    from = Find(from);
    into = Find(into);
    if (from == into) return;
    parent_[from] = into;
    size_[into] += size_[from];
  }
  size_t& size(int a) { return size_[a]; }

 private:
  std::vector<int> parent_;
  std::vector<size_t> size_;
};

// Labels 4-connected components of `labels`; returns component count.
int LabelComponents(const std::vector<int32_t>& labels, int width, int height,
                    std::vector<int>* comp) {
  comp->assign(labels.size(), -1);
  int count = 0;
  std::vector<int> stack;
  for (size_t start = 0; start < labels.size(); ++start) {
    if ((*comp)[start] >= 0) continue;
    const int32_t l = labels[start];
    (*comp)[start] = count;
    stack.push_back(int(start));
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int x = p % width, y = p / width;
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& n : nbr) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= width || n[1] >= height) continue;
        const int q = n[1] * width + n[0];
        if ((*comp)[q] < 0 && labels[q] == l) {
          (*comp)[q] = count;
          stack.push_back(q);
        }
      }
    }
    ++count;
  }
  return count;
}

}  // namespace

SegmentationMap SlicSegment(const Plane& plane, int bit_depth,
                            const SlicParams& params) {
  const int width = plane.width, height = plane.height;
  const size_t n = size_t(width) * height;
  if (params.superpixels < 1) throw InvalidArgument("superpixel count must be >= 1");
  if (!(params.compactness > 0)) throw InvalidArgument("compactness must be > 0");
  if (size_t(params.superpixels) > n) {
    throw InvalidArgument("too many superpixels: " +
                          std::to_string(params.superpixels) + " > " +
                          std::to_string(n) + " pixels");
  }
  const double scale = 255.0 / ((1 << bit_depth) - 1);
  std::vector<double> img(n);
  for (size_t i = 0; i < n; ++i) img[i] = plane.samples[i] * scale;
  auto pix = [&](int x, int y) {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return img[size_t(y) * width + x];
  };

  const int k = params.superpixels;
  const int nx = std::clamp(
      int(std::lround(std::sqrt(double(k) * width / height))), 1, width);
  const int ny = std::clamp(int(std::lround(double(k) / nx)), 1, height);
  const double step_x = double(width) / nx, step_y = double(height) / ny;
  const double step = std::sqrt(double(n) / k);
  const int radius = int(std::ceil(std::max(step_x, step_y)));

  std::vector<Center> centers;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int cx = int((i + 0.5) * step_x), cy = int((j + 0.5) * step_y);
      // Move the seed to the lowest-gradient pixel of its 3x3 neighbourhood.
      int bx = cx, by = cy;
      double best = std::numeric_limits<double>::infinity();
      const int order[9][2] = {{0, 0},  {-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                               {1, 0},  {-1, 1},  {0, 1},  {1, 1}};
      for (const auto& o : order) {
        const int x = cx + o[0], y = cy + o[1];
        if (x < 0 || y < 0 || x >= width || y >= height) continue;
        const double gx = pix(x + 1, y) - pix(x - 1, y);
        const double gy = pix(x, y + 1) - pix(x, y - 1);
        const double g = gx * gx + gy * gy;
        if (g < best) {
          best = g;
          bx = x;
          by = y;
        }
      }
      centers.push_back({double(bx), double(by), pix(bx, by)});
    }
  }

  const double spatial_weight =
      (params.compactness * params.compactness) / (step * step);
  std::vector<int32_t> labels(n, -1);
  std::vector<double> dist(n);
  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(labels.begin(), labels.end(), -1);
    for (size_t c = 0; c < centers.size(); ++c) {
      const Center& ctr = centers[c];
      const int x0 = std::max(0, int(std::floor(ctr.x)) - radius);
      const int x1 = std::min(width - 1, int(std::ceil(ctr.x)) + radius);
      const int y0 = std::max(0, int(std::floor(ctr.y)) - radius);
      const int y1 = std::min(height - 1, int(std::ceil(ctr.y)) + radius);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const size_t p = size_t(y) * width + x;
          const double dc = img[p] - ctr.intensity;
          const double dx = x - ctr.x, dy = y - ctr.y;
          const double d = dc * dc + (dx * dx + dy * dy) * spatial_weight;
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = int32_t(c);
          }
        }
      }
    }
    // Pixels outside every search window fall back to a global search.
    for (size_t p = 0; p < n; ++p) {
      if (labels[p] >= 0) continue;
      const int x = int(p % width), y = int(p / width);
      for (size_t c = 0; c < centers.size(); ++c) {
        const double dc = img[p] - centers[c].intensity;
        const double dx = x - centers[c].x, dy = y - centers[c].y;
        const double d = dc * dc + (dx * dx + dy * dy) * spatial_weight;
        if (d < dist[p]) {
          dist[p] = d;
          labels[p] = int32_t(c);
        }
      }
    }
    std::vector<Center> sums(centers.size(), {0, 0, 0});
    std::vector<size_t> counts(centers.size(), 0);
    for (size_t p = 0; p < n; ++p) {
      const int c = labels[p];
      sums[c].x += double(p % width);
      sums[c].y += double(p / width);
      sums[c].intensity += img[p];
      ++counts[c];
    }
    for (size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;
      centers[c] = {sums[c].x / counts[c], sums[c].y / counts[c],
                    sums[c].intensity / counts[c]};
    }
  }

  // Connectivity enforcement.
  std::vector<int> comp;
  const int comp_count = LabelComponents(labels, width, height, &comp);
  Components uf(comp_count);
  for (size_t p = 0; p < n; ++p) ++uf.size(comp[p]);
  const double min_size =
      params.min_region_fraction * double(n) / double(centers.size());
  // Adjacency lists between components, in raster discovery order.
  std::vector<std::vector<int>> adjacent(comp_count);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int a = comp[size_t(y) * width + x];
      if (x + 1 < width) {
        const int b = comp[size_t(y) * width + x + 1];
        if (a != b) {
          adjacent[a].push_back(b);
          adjacent[b].push_back(a);
        }
      }
      if (y + 1 < height) {
        const int b = comp[size_t(y + 1) * width + x];
        if (a != b) {
          adjacent[a].push_back(b);
          adjacent[b].push_back(a);
        }
      }
    }
  }
  // Components are numbered in raster order of their first pixel.
  for (int c = 0; c < comp_count; ++c) {
    const int root = uf.Find(c);
    if (double(uf.size(root)) >= min_size) continue;
    // Gather neighbours of the whole merged region containing c.
    int best = -1;
    size_t best_size = 0;
    for (int other = 0; other < comp_count; ++other) {
      if (uf.Find(other) != root) continue;
      for (int b : adjacent[other]) {
        const int rb = uf.Find(b);
        if (rb == root) continue;
        if (best < 0 || uf.size(rb) > best_size ||
            (uf.size(rb) == best_size && rb < best)) {
          best = rb;
          best_size = uf.size(rb);
        }
      }
    }
    if (best >= 0) uf.Merge(root, best);
  }

  SegmentationMap out;
  out.width = width;
  out.height = height;
  std::vector<int32_t> remap(comp_count, -1);
  std::vector<int32_t> final_labels(n);
  int next = 0;
  for (size_t p = 0; p < n; ++p) {
    const int r = uf.Find(comp[p]);
    if (remap[r] < 0) remap[r] = next++;
    final_labels[p] = remap[r];
  }
  out.label_count = next;
  out.views.push_back(std::move(final_labels));
  return out;
}

double MedianDisparity(std::span<const uint32_t> region,
                       const DisparityMap& dmap) {
  if (region.empty()) throw InvalidArgument("median of an empty region");
  std::vector<float> vals;
  vals.reserve(region.size());
  for (uint32_t p : region) {
    if (p >= dmap.values.size()) throw InvalidArgument("region outside disparity map");
    vals.push_back(dmap.values[p]);
  }
  const size_t mid = (vals.size() - 1) / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  return vals[mid];
}

std::vector<int> LabelDisparities(const SegmentationMap& ref,
                                  const DisparityMap& dmap) {
  if (ref.views.empty()) throw InvalidArgument("empty segmentation");
  if (dmap.width != ref.width || dmap.height != ref.height) {
    throw DataError("disparity map size " + std::to_string(dmap.width) + "x" +
                    std::to_string(dmap.height) + " does not match views " +
                    std::to_string(ref.width) + "x" + std::to_string(ref.height));
  }
  std::vector<std::vector<uint32_t>> regions(ref.label_count);
  const auto& labels = ref.views[0];
  for (size_t p = 0; p < labels.size(); ++p) {
    regions.at(labels[p]).push_back(uint32_t(p));
  }
  std::vector<int> out(ref.label_count, 0);
  for (int l = 0; l < ref.label_count; ++l) {
    if (regions[l].empty()) throw DataError("orphan label " + std::to_string(l));
    out[l] = QuantizeDisparity(MedianDisparity(regions[l], dmap));
  }
  return out;
}

SegmentationMap ProjectLabels(const SegmentationMap& ref,
                              std::span<const int> disparity_eighths, int rows,
                              int cols) {
  if (ref.views.empty()) throw InvalidArgument("empty segmentation");
  if (disparity_eighths.size() < size_t(ref.label_count)) {
    throw InvalidArgument("missing disparity for some labels");
  }
  const int width = ref.width, height = ref.height;
  const size_t n = size_t(width) * height;
  const auto& base = ref.views[0];
  SegmentationMap out;
  out.width = width;
  out.height = height;
  out.label_count = ref.label_count;
  out.views.resize(size_t(rows) * cols);
  for (int s = 0; s < rows; ++s) {
    for (int t = 0; t < cols; ++t) {
      auto& target = out.views[size_t(s) * cols + t];
      if (s == 0 && t == 0) {
        target = base;
        continue;
      }
      target.assign(n, -1);
      for (size_t p = 0; p < n; ++p) {
        const int32_t l = base[p];
        const int d = disparity_eighths[l];
        const long long x = static_cast<long long>(p % width) - DisparityShift(d, t);
        const long long y = static_cast<long long>(p / width) - DisparityShift(d, s);
        if (x < 0 || y < 0 || x >= width || y >= height) continue;
        int32_t& cur = target[size_t(y) * width + size_t(x)];
        if (cur < 0 || d > disparity_eighths[cur] ||
            (d == disparity_eighths[cur] && l < cur)) {
          cur = l;
        }
      }
      bool any = false;
      for (int32_t l : target) any |= l >= 0;
      if (!any) {
        target = base;
        continue;
      }
      // Synchronous majority-vote dilation until every pixel is covered.
      std::vector<int32_t> next = target;
      for (bool holes = true; holes;) {
        holes = false;
        for (size_t p = 0; p < n; ++p) {
          if (target[p] >= 0) continue;
          const int x = int(p % width), y = int(p / width);
          int32_t cand[4];
          int count = 0;
          if (x > 0 && target[p - 1] >= 0) cand[count++] = target[p - 1];
          if (x + 1 < width && target[p + 1] >= 0) cand[count++] = target[p + 1];
          if (y > 0 && target[p - width] >= 0) cand[count++] = target[p - width];
          if (y + 1 < height && target[p + width] >= 0) {
            cand[count++] = target[p + width];
          }
          if (count == 0) {
            holes = true;
            continue;
          }
          std::sort(cand, cand + count);
          int32_t best = cand[0];
          int best_votes = 0;
          for (int i = 0; i < count;) {
            int j = i;
            while (j < count && cand[j] == cand[i]) ++j;
            if (j - i > best_votes) {
              best_votes = j - i;
              best = cand[i];
            }
            i = j;
          }
          next[p] = best;
        }
        target = next;
      }
    }
  }
  return out;
}

std::vector<SuperRay> BuildSuperRays(const SegmentationMap& all_views,
                                     std::span<const int> disparity_eighths) {
  if (all_views.views.empty()) throw InvalidArgument("empty segmentation");
  std::vector<SuperRay> rays(all_views.label_count);
  for (int l = 0; l < all_views.label_count; ++l) {
    rays[l].label = l;
    rays[l].disparity_eighths = disparity_eighths[l];
    rays[l].pixels.resize(all_views.views.size());
  }
  for (size_t v = 0; v < all_views.views.size(); ++v) {
    const auto& labels = all_views.views[v];
    for (size_t p = 0; p < labels.size(); ++p) {
      const int32_t l = labels[p];
      if (l < 0 || l >= all_views.label_count) {
        throw DataError("label " + std::to_string(l) + " out of range");
      }
      rays[l].pixels[v].push_back(uint32_t(p));
    }
  }
  for (const SuperRay& sr : rays) {
    if (sr.pixels[0].empty()) {
      throw DataError("orphan label " + std::to_string(sr.label));
    }
  }
  return rays;
}

std::vector<SuperRay> BuildSuperRays(const SegmentationMap& all_views,
                                     const DisparityMap& dmap) {
  SegmentationMap ref;
  ref.width = all_views.width;
  ref.height = all_views.height;
  ref.label_count = all_views.label_count;
  ref.views.push_back(all_views.views.at(0));
  const std::vector<int> disparities = LabelDisparities(ref, dmap);
  return BuildSuperRays(all_views, disparities);
}

}  // namespace srgc
