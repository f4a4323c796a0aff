#include "srgc/grouping.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "srgc/error.h"
#include "srgc/parallel.h"
#include "srgc/transform.h"

namespace srgc {

size_t GroupSet::grouped_count() const {
  size_t n = 0;
  for (const auto& g : groups) n += g.members.size();
  return n;
}

PairWeights PairwiseMse(const std::vector<std::vector<double>>& coeffs,
                        int threads) {
  const int m = int(coeffs.size());
  for (const auto& c : coeffs) {
    if (c.size() != coeffs[0].size()) {
      throw InvalidArgument("pairwise mse: coefficient vectors differ in length");
    }
  }
  PairWeights weights(m);
  ParallelFor(size_t(m), threads, [&](size_t i) {
    const auto& a = coeffs[i];
    for (int j = int(i) + 1; j < m; ++j) {
      const auto& b = coeffs[j];
      double sum = 0;
      for (size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d;
      }
      weights.at(int(i), j) = a.empty() ? 0.0 : sum / double(a.size());
    }
  });
  return weights;
}

double SelectThreshold(const PairWeights& weights, double bin_width) {
  if (!(bin_width > 0)) throw InvalidArgument("bin width must be > 0");
  if (weights.pair_count() == 0) return 0.0;
  std::map<int64_t, uint64_t> hist;
  for (double w : weights.values()) {
    ++hist[int64_t(std::floor(w / bin_width))];
  }
  int64_t best_bin = 0;
  uint64_t best_count = 0;
  for (const auto& [bin, count] : hist) {
    if (count > best_count) {
      best_count = count;
      best_bin = bin;
    }
  }
  return double(best_bin + 1) * bin_width;
}

std::vector<std::vector<int>> OneLevelGroups(const PairWeights& weights,
                                             double threshold) {
  std::vector<std::vector<int>> out;
  const int m = weights.size();
  for (int i = 0; i < m; ++i) {
    std::vector<int> set;
    for (int j = 0; j < m; ++j) {
      if (j == i || weights.at(i, j) <= threshold) set.push_back(j);
    }
    if (set.size() > 1) out.push_back(std::move(set));
  }
  return out;
}

std::vector<std::vector<int>> MergeGroups(
    const std::vector<std::vector<int>>& sets) {
  std::map<int, int> parent;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& set : sets) {
    for (int v : set) parent.try_emplace(v, v);
    for (size_t k = 1; k < set.size(); ++k) {
      const int a = find(set[0]), b = find(set[k]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Roots are the smallest members, so iterating in key order emits sets
  // ordered by smallest member.
  std::map<int, std::vector<int>> by_root;
  for (const auto& [v, p] : parent) by_root[find(v)].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  return out;
}

int SelectMain(std::span<const int> group,
               const std::vector<std::vector<double>>& signals) {
  if (group.empty()) throw InvalidArgument("select_main on an empty group");
  const size_t len = signals.at(group[0]).size();
  for (int g : group) {
    if (signals.at(g).size() != len) {
      throw InvalidArgument("select_main: signal lengths differ");
    }
  }
  std::vector<double> median(len);
  std::vector<double> column(group.size());
  const size_t mid = (group.size() - 1) / 2;
  for (size_t k = 0; k < len; ++k) {
    for (size_t i = 0; i < group.size(); ++i) column[i] = signals[group[i]][k];
    std::nth_element(column.begin(), column.begin() + mid, column.end());
    median[k] = column[mid];
  }
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int g : group) {
    double d = 0;
    for (size_t k = 0; k < len; ++k) {
      const double e = signals[g][k] - median[k];
      d += e * e;
    }
    if (d < best_dist || (d == best_dist && g < best)) {
      best_dist = d;
      best = g;
    }
  }
  return best;
}

GroupSet FindGroups(const std::vector<std::vector<double>>& coeffs,
                    double bin_width, int threads) {
  GroupSet result;
  const int m = int(coeffs.size());
  if (m < 2) {
    for (int i = 0; i < m; ++i) result.ungrouped.push_back(i);
    return result;
  }
  const PairWeights weights = PairwiseMse(coeffs, threads);
  result.pair_count = weights.pair_count();
  result.threshold = SelectThreshold(weights, bin_width);
  for (double w : weights.values()) {
    result.pairs_under_threshold += w <= result.threshold ? 1 : 0;
  }
  const auto subs = OneLevelGroups(weights, result.threshold);
  result.one_level_groups = subs.size();
  std::vector<char> grouped(m, 0);
  for (auto& members : MergeGroups(subs)) {
    for (int v : members) grouped[v] = 1;
    result.groups.push_back({std::move(members), -1});
  }
  for (int i = 0; i < m; ++i) {
    if (!grouped[i]) result.ungrouped.push_back(i);
  }
  return result;
}

GroupSet RunGrouping(const std::vector<std::vector<double>>& coeffs,
                     const std::vector<std::vector<double>>& signals,
                     double bin_width, int threads) {
  GroupSet result = FindGroups(coeffs, bin_width, threads);
  for (auto& g : result.groups) g.main = SelectMain(g.members, signals);
  return result;
}

std::vector<int64_t> PredictSamples(const EigenBasis& main_basis,
                                    const std::vector<double>& member_coeffs,
                                    int max_value, const CoarseningMap* lift) {
  std::vector<double> f = Igft(main_basis, member_coeffs);
  if (lift != nullptr) f = UncoarsenSignal(f, *lift);
  std::vector<int64_t> out;
  out.reserve(f.size());
  for (double v : f) {
    out.push_back(std::clamp<int64_t>(RoundHalfAway(v), 0, max_value));
  }
  return out;
}

Prediction PredictAndResidual(const EigenBasis& main_basis,
                              const std::vector<double>& member_coeffs,
                              const std::vector<double>& member_signal,
                              int max_value, const CoarseningMap* lift) {
  Prediction p;
  p.predicted = PredictSamples(main_basis, member_coeffs, max_value, lift);
  if (p.predicted.size() != member_signal.size()) {
    throw InvalidArgument("predict: signal length " +
                          std::to_string(member_signal.size()) +
                          " != predicted length " +
                          std::to_string(p.predicted.size()));
  }
  p.residual.resize(p.predicted.size());
  for (size_t i = 0; i < p.predicted.size(); ++i) {
    p.residual[i] = RoundHalfAway(member_signal[i]) - p.predicted[i];
  }
  return p;
}

}  // namespace srgc
