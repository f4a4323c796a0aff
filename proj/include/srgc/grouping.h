#ifndef SRGC_GROUPING_H_
#define SRGC_GROUPING_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "srgc/spectral.h"

namespace srgc {

// Number of unordered pairs among m items.
constexpr uint64_t PairCount(uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

// Mean squared difference between every pair of coefficient vectors, stored
// as a packed upper triangle.
class PairWeights {
 public:
  PairWeights() = default;
  explicit PairWeights(int m) : m_(m), mse_(PairCount(m), 0.0) {}

  int size() const { return m_; }
  size_t pair_count() const { return mse_.size(); }
  double at(int i, int j) const { return mse_[Index(i, j)]; }
  double& at(int i, int j) { return mse_[Index(i, j)]; }
  const std::vector<double>& values() const { return mse_; }

 private:
  size_t Index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // Row i of the triangle starts after sum_{r<i} (m - 1 - r) entries.
    return size_t(i) * (2 * size_t(m_) - i - 1) / 2 + size_t(j - i - 1);
  }

  int m_ = 0;
  std::vector<double> mse_;
};

PairWeights PairwiseMse(const std::vector<std::vector<double>>& coeffs,
                        int threads = 1);

// Upper edge of the lowest fixed-width bin [k*w, (k+1)*w) holding the most
// pairs. Returns 0 when there are no pairs.
double SelectThreshold(const PairWeights& weights, double bin_width);

// For each i, {i} plus every j whose weight to i is <= threshold; singletons
// are dropped. Sets are sorted, emitted in order of i.
std::vector<std::vector<int>> OneLevelGroups(const PairWeights& weights,
                                             double threshold);

// Unions intersecting sets transitively. Output sets are sorted and ordered
// by their smallest member.
std::vector<std::vector<int>> MergeGroups(
    const std::vector<std::vector<int>>& sets);

// Member nearest (L2) to the elementwise lower-median signal of the group,
// ties to the smallest index. `signals` is indexed by member id.
int SelectMain(std::span<const int> group,
               const std::vector<std::vector<double>>& signals);

struct SuperRayGroup {
  std::vector<int> members;  // sorted
  int main = -1;

  bool operator==(const SuperRayGroup&) const = default;
};

struct GroupSet {
  std::vector<SuperRayGroup> groups;
  std::vector<int> ungrouped;  // sorted
  double threshold = 0;
  uint64_t pair_count = 0;
  uint64_t pairs_under_threshold = 0;
  uint64_t one_level_groups = 0;

  size_t grouped_count() const;
};

// Threshold, one-level sets and merge over the coefficient vectors of the
// coarsened super-rays. Main members are left unassigned (-1).
GroupSet FindGroups(const std::vector<std::vector<double>>& coeffs,
                    double bin_width, int threads = 1);

// FindGroups plus main selection from the graph signals.
GroupSet RunGrouping(const std::vector<std::vector<double>>& coeffs,
                     const std::vector<std::vector<double>>& signals,
                     double bin_width, int threads = 1);

struct Prediction {
  std::vector<int64_t> predicted;
  std::vector<int64_t> residual;
};

// Predicts a member signal by inverse-transforming its coefficients with the
// main member's basis, optionally lifting through the member's coarsening,
// then rounding and clamping to [0, max_value]. residual = signal - predicted.
Prediction PredictAndResidual(const EigenBasis& main_basis,
                              const std::vector<double>& member_coeffs,
                              const std::vector<double>& member_signal,
                              int max_value,
                              const CoarseningMap* lift = nullptr);

// Rounded, clamped prediction only (the decoder side).
std::vector<int64_t> PredictSamples(const EigenBasis& main_basis,
                                    const std::vector<double>& member_coeffs,
                                    int max_value,
                                    const CoarseningMap* lift = nullptr);

}  // namespace srgc

#endif  // SRGC_GROUPING_H_
