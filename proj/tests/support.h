#ifndef AMAT_TESTS_SUPPORT_H
#define AMAT_TESTS_SUPPORT_H

#include <random>

#include "mesh.h"

namespace amat::testing {

// Structured mesh with interior vertices jittered by amount * cell size,
// keeping all triangles valid. Boundary vertices stay put.
inline SimplicialMesh perturbed_rect_mesh(int nx, int ny, const Rect &rect, double amount,
                                          std::uint64_t seed) {
  SimplicialMesh base = structured_rect_mesh(nx, ny, rect);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amount, amount);
  const double hx = rect.width() / nx, hy = rect.height() / ny;
  std::vector<Vec2> xy = base.xy;
  for (int v = 0; v < base.nv(); ++v) {
    if (base.on_boundary(v)) continue;
    xy[v].x += u(rng) * hx;
    xy[v].y += u(rng) * hy;
  }
  return build_mesh(std::move(xy), base.tris, base.boundary_edges, base.corner);
}

}  // namespace amat::testing

#endif
