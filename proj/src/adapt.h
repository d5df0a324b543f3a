#ifndef AMAT_ADAPT_H
#define AMAT_ADAPT_H

#include <cstdint>
#include <string>
#include <vector>

#include "mesh.h"
#include "metric_field.h"

namespace amat {

struct AdaptParams {
  double split_threshold = std::sqrt(2.0);
  double collapse_threshold = 1.0 / std::sqrt(2.0);
  int max_passes = 20;
  double quality_floor = 0.2;
  bool boundary_tags_frozen = true;
  std::uint64_t seed = 0;
  bool debug_svg = false;
  std::string debug_dir = ".";
};

struct AdaptResult {
  SimplicialMesh mesh;
  bool reached_fixed_point = false;  // false: pass budget exhausted, best mesh returned
  int passes = 0;
  long splits = 0, collapses = 0, flips = 0, smooth_moves = 0;
};

// Generates a quasi-unit mesh for the metric field by local operations:
// long-edge splits, short-edge collapses, quality flips and metric-space
// smoothing. The input mesh is the background for metric interpolation and
// is not modified. Boundary vertices stay on their segment, corners are
// immovable, and conformity holds after every pass.
AdaptResult adapt_mesh(const SimplicialMesh &mesh, const MetricField &field,
                       const AdaptParams &params = {});

struct EdgeHistogram {
  double bin_width = 0.1;
  std::vector<int> counts;  // [k] counts lengths in [k*w, (k+1)*w)
  int overflow = 0;         // lengths >= counts.size() * w
  int total = 0;

  double fraction_between(double lo, double hi) const;  // whole bins inside [lo, hi]
};

// Metric edge lengths of the mesh in fixed bins. The field may live on a
// background mesh, in which case vertex tensors are interpolated.
EdgeHistogram unit_edge_histogram(const SimplicialMesh &mesh, const MetricField &field);

// Exact fraction of mesh edges with metric length in [lo, hi].
double edge_length_fraction(const SimplicialMesh &mesh, const MetricField &field, double lo,
                            double hi);

}  // namespace amat

#endif
