#include "srgc/spectral.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "srgc/error.h"

namespace srgc {

LocalGraph BuildLocalGraphTopology(const SuperRay& sr, int cols, int width,
                                   int height) {
  LocalGraph g;
  const size_t views = sr.pixels.size();
  std::vector<int> offset(views + 1, 0);
  for (size_t v = 0; v < views; ++v) {
    offset[v + 1] = offset[v] + int(sr.pixels[v].size());
    for (uint32_t p : sr.pixels[v]) g.vertices.push_back({int(v), p});
  }
  g.vertex_count = offset[views];

  // Vertex index of pixel p in view v, or -1.
  auto lookup = [&](size_t v, uint32_t p) {
    const auto& px = sr.pixels[v];
    auto it = std::lower_bound(px.begin(), px.end(), p);
    if (it == px.end() || *it != p) return -1;
    return offset[v] + int(it - px.begin());
  };

  for (size_t v = 0; v < views; ++v) {
    const auto& px = sr.pixels[v];
    for (size_t i = 0; i < px.size(); ++i) {
      const uint32_t p = px[i];
      const int x = int(p % width), y = int(p / width);
      if (x + 1 < width) {
        if (int j = lookup(v, p + 1); j >= 0) g.edges.push_back({offset[v] + int(i), j});
      }
      if (y + 1 < height) {
        if (int j = lookup(v, p + width); j >= 0) {
          g.edges.push_back({offset[v] + int(i), j});
        }
      }
    }
  }
  const auto& ref = sr.pixels[0];
  for (size_t v = 1; v < views; ++v) {
    const int s = int(v) / cols, t = int(v) % cols;
    const int dx = DisparityShift(sr.disparity_eighths, t);
    const int dy = DisparityShift(sr.disparity_eighths, s);
    for (size_t i = 0; i < ref.size(); ++i) {
      const int x = int(ref[i] % width) - dx, y = int(ref[i] / width) - dy;
      if (x < 0 || y < 0 || x >= width || y >= height) continue;
      if (int j = lookup(v, uint32_t(y) * width + uint32_t(x)); j >= 0) {
        g.edges.push_back({int(i), j});
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

LocalGraph BuildLocalGraph(const SuperRay& sr, const LightField& lf,
                           int channel) {
  LocalGraph g = BuildLocalGraphTopology(sr, lf.cols, lf.width, lf.height);
  g.signal.reserve(g.vertex_count);
  for (const VertexId& v : g.vertices) {
    g.signal.push_back(lf.views[v.view].planes[channel].samples[v.pixel]);
  }
  return g;
}

Laplacian BuildLaplacian(const LocalGraph& g) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> degree(g.vertex_count, 0.0);
  triplets.reserve(g.edges.size() * 2 + g.vertex_count);
  for (const auto& [i, j] : g.edges) {
    triplets.emplace_back(i, j, -1.0);
    triplets.emplace_back(j, i, -1.0);
    degree[i] += 1.0;
    degree[j] += 1.0;
  }
  for (int i = 0; i < g.vertex_count; ++i) {
    if (degree[i] != 0.0) triplets.emplace_back(i, i, degree[i]);
  }
  Laplacian l(g.vertex_count, g.vertex_count);
  l.setFromTriplets(triplets.begin(), triplets.end());
  return l;
}

int CountComponents(const LocalGraph& g) {
  std::vector<int> parent(g.vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  int components = g.vertex_count;
  for (const auto& [i, j] : g.edges) {
    const int a = find(i), b = find(j);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return components;
}

namespace {

constexpr double kRepeatedEigenvalueTol = 1e-9;
constexpr double kAxisAcceptNorm = 1e-6;

// Replaces columns [begin, end) of `u` with the Gram-Schmidt orthonormalization
// of the projections of e_0, e_1, ... onto their span. The result depends only
// on the subspace, not on the basis the solver happened to return.
void CanonicalizeCluster(Eigen::MatrixXd& u, int begin, int end) {
  const int n = int(u.rows());
  const int size = end - begin;
  const Eigen::MatrixXd cluster = u.middleCols(begin, size);
  Eigen::MatrixXd chosen(n, size);
  int found = 0;
  for (int axis = 0; axis < n && found < size; ++axis) {
    Eigen::VectorXd v = cluster * cluster.row(axis).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (int b = 0; b < found; ++b) {
        v -= chosen.col(b).dot(v) * chosen.col(b);
      }
    }
    const double norm = v.norm();
    if (norm > kAxisAcceptNorm) chosen.col(found++) = v / norm;
  }
  if (found != size) {
    throw InternalError("decomposition failure: cannot canonicalize subspace");
  }
  u.middleCols(begin, size) = chosen;
}

}  // namespace

EigenBasis Eigendecompose(const Laplacian& laplacian) {
  const int n = int(laplacian.rows());
  if (n < 1 || laplacian.cols() != n) {
    throw InvalidArgument("eigendecompose needs a non-empty square matrix");
  }
  const Eigen::MatrixXd dense(laplacian);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw InternalError("decomposition failure for " + std::to_string(n) + "x" +
                        std::to_string(n) + " Laplacian");
  }
  EigenBasis basis;
  basis.eigenvalues = solver.eigenvalues();
  basis.vectors = solver.eigenvectors();

  for (int begin = 0; begin < n;) {
    int end = begin + 1;
    while (end < n && basis.eigenvalues[end] - basis.eigenvalues[end - 1] <
                          kRepeatedEigenvalueTol) {
      ++end;
    }
    if (end - begin > 1) CanonicalizeCluster(basis.vectors, begin, end);
    begin = end;
  }

  for (int c = 0; c < n; ++c) {
    auto col = basis.vectors.col(c);
    const double peak = col.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      if (std::abs(col[i]) >= peak - 1e-12) {
        if (col[i] < 0) col = -col;
        break;
      }
    }
  }
  return basis;
}

std::pair<LocalGraph, CoarseningMap> Coarsen(const LocalGraph& g,
                                             int n_target) {
  if (n_target < 1) throw InvalidArgument("coarsening target must be >= 1");
  const int n = g.vertex_count;
  // node_of[v]: current supernode of fine vertex v, numbered by smallest
  // fine member.
  std::vector<int> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);
  int count = n;
  std::map<std::pair<int, int>, int> weights;
  for (const auto& e : g.edges) weights[e] = 1;

  // Renumbers supernodes after `merged_into` remapping and rebuilds weights.
  auto contract = [&](const std::vector<int>& merged_into) {
    std::vector<int> min_member(count, n);
    for (int v = 0; v < n; ++v) {
      const int target = merged_into[node_of[v]];
      min_member[target] = std::min(min_member[target], v);
    }
    std::vector<int> roots;
    for (int a = 0; a < count; ++a) {
      if (merged_into[a] == a) roots.push_back(a);
    }
    std::sort(roots.begin(), roots.end(),
              [&](int a, int b) { return min_member[a] < min_member[b]; });
    std::vector<int> new_id(count, -1);
    for (size_t r = 0; r < roots.size(); ++r) new_id[roots[r]] = int(r);
    for (int v = 0; v < n; ++v) node_of[v] = new_id[merged_into[node_of[v]]];
    std::map<std::pair<int, int>, int> next;
    for (const auto& [e, w] : weights) {
      int a = new_id[merged_into[e.first]], b = new_id[merged_into[e.second]];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      next[{a, b}] += w;
    }
    weights = std::move(next);
    count = int(roots.size());
  };

  while (count > n_target) {
    std::vector<int> merged_into(count);
    std::iota(merged_into.begin(), merged_into.end(), 0);
    if (weights.empty()) {
      // Only isolated supernodes left: merge the two smallest.
      std::vector<int> sizes(count, 0);
      for (int v = 0; v < n; ++v) ++sizes[node_of[v]];
      std::vector<int> order(count);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return sizes[a] < sizes[b]; });
      const int a = std::min(order[0], order[1]);
      const int b = std::max(order[0], order[1]);
      merged_into[b] = a;
      contract(merged_into);
      continue;
    }
    std::vector<std::tuple<int, int, int>> edges;  // (-w, i, j)
    edges.reserve(weights.size());
    for (const auto& [e, w] : weights) edges.emplace_back(-w, e.first, e.second);
    std::sort(edges.begin(), edges.end());
    std::vector<char> matched(count, 0);
    int remaining = count;
    for (const auto& [negw, i, j] : edges) {
      if (remaining == n_target) break;
      if (matched[i] || matched[j]) continue;
      matched[i] = matched[j] = 1;
      merged_into[j] = i;
      --remaining;
    }
    contract(merged_into);
  }

  CoarseningMap map;
  map.fine_to_coarse = node_of;
  map.supernode_sizes.assign(count, 0);
  for (int v = 0; v < n; ++v) ++map.supernode_sizes[node_of[v]];

  LocalGraph coarse;
  coarse.vertex_count = count;
  for (const auto& [e, w] : weights) coarse.edges.push_back(e);
  if (!g.signal.empty()) {
    coarse.signal.assign(count, 0.0);
    for (int v = 0; v < n; ++v) coarse.signal[node_of[v]] += g.signal[v];
    for (int c = 0; c < count; ++c) coarse.signal[c] /= map.supernode_sizes[c];
  }
  return {std::move(coarse), std::move(map)};
}

std::vector<double> UncoarsenSignal(const std::vector<double>& coarse,
                                    const CoarseningMap& map) {
  if (int(coarse.size()) != map.coarse_count()) {
    throw InvalidArgument("coarse signal length does not match supernode count");
  }
  std::vector<double> fine(map.fine_to_coarse.size());
  for (size_t v = 0; v < fine.size(); ++v) fine[v] = coarse[map.fine_to_coarse[v]];
  return fine;
}

namespace {

void SplitRecursive(const SuperRay& sr, int max_vertices, int cols, int width,
                    PartitionResult* out) {
  if (sr.vertex_count() <= size_t(max_vertices)) {
    out->parts.push_back(sr);
    return;
  }
  const auto& ref = sr.pixels[0];
  int x0 = width, x1 = -1, y0 = 1 << 30, y1 = -1;
  for (uint32_t p : ref) {
    const int x = int(p % width), y = int(p / width);
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x0 == x1 && y0 == y1) {
    out->parts.push_back(sr);
    out->bound_unmet = true;
    return;
  }
  const bool along_x = (x1 - x0) >= (y1 - y0);
  auto coord = [&](uint32_t p) {
    return along_x ? int(p % width) : int(p / width);
  };
  std::vector<int> coords;
  coords.reserve(ref.size());
  for (uint32_t p : ref) coords.push_back(coord(p));
  std::sort(coords.begin(), coords.end());
  const int median = coords[(coords.size() - 1) / 2];
  // Left part takes coordinates <= median, unless that leaves nothing right.
  const int cut = median == coords.back() ? median - 1 : median;

  SuperRay left = sr, right = sr;
  for (size_t v = 0; v < sr.pixels.size(); ++v) {
    const int s = int(v) / cols, t = int(v) % cols;
    const int shift = DisparityShift(sr.disparity_eighths, along_x ? t : s);
    left.pixels[v].clear();
    right.pixels[v].clear();
    for (uint32_t p : sr.pixels[v]) {
      (coord(p) + shift <= cut ? left : right).pixels[v].push_back(p);
    }
  }
  SplitRecursive(left, max_vertices, cols, width, out);
  SplitRecursive(right, max_vertices, cols, width, out);
}

}  // namespace

PartitionResult PartitionSuperRay(const SuperRay& sr, int max_vertices,
                                  int cols, int width) {
  if (max_vertices < 1) throw InvalidArgument("max_vertices must be >= 1");
  PartitionResult result;
  SplitRecursive(sr, max_vertices, cols, width, &result);
  return result;
}

}  // namespace srgc
