#ifndef AMAT_RECOVERY_H
#define AMAT_RECOVERY_H

#include <vector>

#include "fields.h"
#include "mesh.h"

namespace amat {

// Vertex patch for the quadratic least-squares fit: the vertex itself and
// its ring neighbours, extended ring by ring until at least 6 distinct
// vertices are available. Throws InsufficientPatch when the mesh cannot
// supply them.
std::vector<int> build_patch(const SimplicialMesh &mesh, int vertex);

// Per-mesh derivative recovery operator. The least-squares systems depend
// only on the mesh geometry, so the fit weights are computed once and each
// recovery reduces to dot products; reuse the operator when recovering
// many fields on the same mesh.
class RecoveryOperator {
 public:
  static RecoveryOperator build(const SimplicialMesh &mesh);

  // Gradient of the quadratic fit, evaluated at each vertex.
  VectorField gradient(const ScalarField &f) const;

  // Recovery applied again to each gradient component, symmetrized.
  TensorField hessian(const ScalarField &f) const;

  // Vertices where the quadratic fit was rank-deficient and a linear fit
  // was used instead.
  int linear_fallback_count() const { return fallback_count_; }

 private:
  struct VertexFit {
    std::vector<int> verts;   // patch, center first
    std::vector<double> wx;   // weights yielding d/dx at the center
    std::vector<double> wy;
    bool linear = false;
  };
  std::vector<VertexFit> fits_;
  int fallback_count_ = 0;
};

VectorField recover_gradient(const SimplicialMesh &mesh, const ScalarField &f);
TensorField recover_hessian(const SimplicialMesh &mesh, const ScalarField &f);

// Eigenvalue rectification |A| = P |Lambda| P^T applied entrywise.
TensorField absolute_tensor(const TensorField &t);

}  // namespace amat

#endif
