#ifndef AMAT_METRIC_FIELD_H
#define AMAT_METRIC_FIELD_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mesh.h"
#include "metric.h"

namespace amat {

// Per-vertex metric tensors over a mesh. Interpolation between vertices
// is log-Euclidean. The field must not outlive its mesh.
struct MetricField {
  const SimplicialMesh *mesh = nullptr;
  std::vector<MetricTensor> tensors;

  bool valid() const;
};

MetricField uniform_metric_field(const SimplicialMesh &mesh, const MetricTensor &m);

// Length of edge (p, q) in the metric: 2-point Gauss-Legendre quadrature
// on the log-Euclidean interpolation of the endpoint tensors.
double edge_length_metric(const MetricField &field, int p, int q);

// Same quadrature for an arbitrary segment with explicit endpoint tensors.
double segment_length_metric(const MetricTensor &mp, const MetricTensor &mq, const Vec2 &a,
                             const Vec2 &b);

// Metric volume of a triangle: vertex + log-Euclidean centroid nodes,
// equal weights; exact for constant fields.
double element_volume_metric(const MetricField &field, int tri);

// Integral of sqrt(det M) over the mesh (continuous vertex-count analogue).
double complexity(const MetricField &field);

// n_T * sum of per-interval complexities.
double spacetime_complexity(std::span<const MetricField> fields, int n_T);

// Metric at a barycentric location inside element tri (log-Euclidean).
MetricTensor interpolate_metric(const MetricField &field, int tri, const std::array<double, 3> &bary);

// Shape quality in (0, 1], equal to 1 for a metric-equilateral triangle:
// 4*sqrt(3)*|K|_M / sum of squared metric edge lengths.
double quality_metric(const SimplicialMesh &mesh, int tri, const MetricField &field);

// Constant-metric variant used in adaptation inner loops.
double quality_constant_metric(const Vec2 &a, const Vec2 &b, const Vec2 &c, const MetricTensor &m);

// Bounded size growth: along every edge, the target sizes at one endpoint
// may not exceed those grown from the other endpoint by (beta-1) times the
// Euclidean edge length. Edges are swept in seeded random order until the
// field stops changing (relative Frobenius 1e-10), at most 50 sweeps.
MetricField apply_gradation(const MetricField &field, double beta, std::uint64_t seed = 0);

// True when edge (p, q) already satisfies the gradation growth bound.
bool gradation_satisfied(const MetricField &field, int p, int q, double beta, double rel_tol = 1e-9);

// ASCII tensor file: "MetricAtVertices <N>", N lines "m11 m12 m22", "End".
void save_metric_field(const MetricField &field, const std::string &path);
MetricField load_metric_field(const SimplicialMesh &mesh, const std::string &path);

// Same layout for general symmetric tensor fields (debugging dumps).
void save_tensor_field(const TensorField &field, const std::string &path);

}  // namespace amat

#endif
