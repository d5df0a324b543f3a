#ifndef AMAT_TRANSFER_H
#define AMAT_TRANSFER_H

#include "fields.h"
#include "mesh.h"

namespace amat {

struct TransferStats {
  int clamped = 0;        // destination vertices projected onto the nearest element
  double mass_drift = 0;  // integral of the field, destination minus source
};

// P1 barycentric interpolation from one mesh to another; linear-preserving.
// Destination vertices outside the source (boundary roundoff) are clamped
// to the nearest element and counted.
ScalarField interpolate_field(const SimplicialMesh &src_mesh, const ScalarField &src_field,
                              const SimplicialMesh &dst_mesh, TransferStats *stats = nullptr);

// Vertex-wise sampling of an analytic function on a mesh.
template <class F>
ScalarField sample_vertices(const SimplicialMesh &mesh, F &&fn) {
  ScalarField out(mesh.nv());
  for (int v = 0; v < mesh.nv(); ++v) out[v] = fn(mesh.xy[v]);
  return out;
}

// Integral of a P1 field (exact vertex rule).
double field_integral(const SimplicialMesh &mesh, const ScalarField &f);

}  // namespace amat

#endif
