#ifndef SRGC_SPECTRAL_H_
#define SRGC_SPECTRAL_H_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <utility>
#include <vector>

#include "srgc/light_field.h"
#include "srgc/segmentation.h"

namespace srgc {

struct VertexId {
  int view = 0;
  uint32_t pixel = 0;

  bool operator==(const VertexId&) const = default;
};

// Unweighted undirected graph over the pixels of one super-ray. Vertices are
// ordered by view, then raster order, which fixes the signal layout.
struct LocalGraph {
  std::vector<VertexId> vertices;  // empty for coarsened graphs
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // (i, j), i < j, sorted, unique
  std::vector<double> signal;              // empty or vertex_count long
};

using Laplacian = Eigen::SparseMatrix<double>;

struct EigenBasis {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd vectors;      // orthonormal columns

  int dim() const { return int(eigenvalues.size()); }
};

struct CoarseningMap {
  std::vector<int> fine_to_coarse;
  std::vector<int> supernode_sizes;

  int coarse_count() const { return int(supernode_sizes.size()); }
};

// Spatial edges join 4-neighbours inside each view's super-pixel. Angular
// edges join every reference-view pixel to its disparity-projected pixel in
// each other view when that pixel belongs to the same super-ray.
LocalGraph BuildLocalGraphTopology(const SuperRay& sr, int cols, int width,
                                   int height);
// Topology plus the samples of `channel` in vertex order.
LocalGraph BuildLocalGraph(const SuperRay& sr, const LightField& lf,
                           int channel = 0);

Laplacian BuildLaplacian(const LocalGraph& g);

int CountComponents(const LocalGraph& g);

// Dense symmetric eigen-decomposition with a canonical output: ascending
// eigenvalues, clusters of (numerically) repeated eigenvalues re-based by
// Gram-Schmidt against the coordinate axes, and every column flipped so its
// largest-magnitude entry (first one on ties) is positive. Identical inputs
// give bit-identical bases.
EigenBasis Eigendecompose(const Laplacian& laplacian);

// Repeated heavy-edge matching down to exactly min(n_target, n) supernodes.
// Edge weights start at 1 and accumulate multiplicity as nodes merge; ties go
// to the smallest (i, j) pair. Once no edges remain the two smallest
// supernodes are merged until the target is met. Supernodes are numbered by
// their smallest fine vertex; the coarse signal is the member mean.
std::pair<LocalGraph, CoarseningMap> Coarsen(const LocalGraph& g, int n_target);

// Piecewise-constant lift back to the fine vertices.
std::vector<double> UncoarsenSignal(const std::vector<double>& coarse,
                                    const CoarseningMap& map);

struct PartitionResult {
  std::vector<SuperRay> parts;
  bool bound_unmet = false;  // some part could not be split far enough
};

// Recursively bisects the reference super-pixel along the longer side of its
// bounding box at the (lower) median coordinate until each part has at most
// `max_vertices` vertices. Other views are cut along the same line shifted by
// the super-ray disparity, so every pixel lands in exactly one part.
PartitionResult PartitionSuperRay(const SuperRay& sr, int max_vertices,
                                  int cols, int width);

}  // namespace srgc

#endif  // SRGC_SPECTRAL_H_
