#include "transfer.h"

#include "errors.h"

namespace amat {

double field_integral(const SimplicialMesh &mesh, const ScalarField &f) {
  double total = 0.0;
  for (int t = 0; t < mesh.nt(); ++t) {
    const auto &tr = mesh.tris[t];
    total += mesh.area(t) * (f[tr[0]] + f[tr[1]] + f[tr[2]]) / 3.0;
  }
  return total;
}

ScalarField interpolate_field(const SimplicialMesh &src_mesh, const ScalarField &src_field,
                              const SimplicialMesh &dst_mesh, TransferStats *stats) {
  if (static_cast<int>(src_field.size()) != src_mesh.nv())
    throw InvalidArgument("interpolate_field: field does not match the source mesh");

  ScalarField out(dst_mesh.nv());
  int clamped = 0;
  int hint = 0;
  for (int v = 0; v < dst_mesh.nv(); ++v) {
    const Location loc = locate_point_or_nearest(src_mesh, dst_mesh.xy[v], hint);
    hint = loc.tri;
    clamped += !loc.inside;
    const auto &tr = src_mesh.tris[loc.tri];
    out[v] = loc.bary[0] * src_field[tr[0]] + loc.bary[1] * src_field[tr[1]] +
             loc.bary[2] * src_field[tr[2]];
  }
  if (stats) {
    stats->clamped = clamped;
    stats->mass_drift = field_integral(dst_mesh, out) - field_integral(src_mesh, src_field);
  }
  return out;
}

}  // namespace amat
