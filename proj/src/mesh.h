#ifndef AMAT_MESH_H
#define AMAT_MESH_H

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "errors.h"
#include "fields.h"
#include "geometry.h"

namespace amat {

struct BoundaryEdge {
  int p = -1, q = -1;
  int tag = 0;
};

// Conforming 2D triangulation with boundary classification.
// Immutable once built; the adaptor mutates a private working copy
// and rebuilds through build_mesh.
struct SimplicialMesh {
  std::vector<Vec2> xy;
  std::vector<std::array<int, 3>> tris;  // counter-clockwise
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<bool> corner;  // per vertex

  // Derived adjacency, filled by build_mesh.
  std::vector<int> v2t_offset;  // CSR vertex -> incident triangles
  std::vector<int> v2t_data;
  std::vector<std::array<int, 3>> tri_neighbor;  // across edge opposite local vertex k, -1 on boundary
  std::vector<int> vertex_boundary_tag;          // -1 interior

  int nv() const { return static_cast<int>(xy.size()); }
  int nt() const { return static_cast<int>(tris.size()); }

  double area(int t) const {
    const auto &tr = tris[t];
    return signed_area(xy[tr[0]], xy[tr[1]], xy[tr[2]]);
  }
  bool on_boundary(int v) const { return vertex_boundary_tag[v] >= 0; }

  Rect bounds() const;
};

// Validates conformity/orientation and builds adjacency.
// Throws StructuralError on any violation.
SimplicialMesh build_mesh(std::vector<Vec2> xy, std::vector<std::array<int, 3>> tris,
                          std::vector<BoundaryEdge> boundary_edges, std::vector<bool> corner);

// Uniform nx-by-ny grid of rect, each cell split along the same diagonal.
// Boundary tags: 1 bottom, 2 right, 3 top, 4 left; the four corners flagged.
SimplicialMesh structured_rect_mesh(int nx, int ny, const Rect &rect);

SimplicialMesh load_mesh(const std::string &path);
void save_mesh(const SimplicialMesh &mesh, const std::string &path);

struct MeshEdge {
  int p = -1, q = -1;         // p < q
  int t0 = -1, t1 = -1;       // incident triangles, t1 = -1 on boundary
};

// All undirected edges in deterministic (p, q) lexicographic order.
std::vector<MeshEdge> collect_edges(const SimplicialMesh &mesh);

struct Location {
  int tri = -1;
  std::array<double, 3> bary{};  // matches local vertex order
  bool inside = true;            // false when clamped to the nearest element
};

inline constexpr double kLocateTol = 1e-9;

// Walking search from the hint element with brute-force fallback.
// Throws NotFound when the point lies outside the mesh beyond tol.
Location locate_point(const SimplicialMesh &mesh, const Vec2 &p, int hint = 0,
                      double tol = kLocateTol);

// Same search, but clamps an outside point to the element maximizing the
// minimum barycentric coordinate (inside = false in that case).
Location locate_point_or_nearest(const SimplicialMesh &mesh, const Vec2 &p, int hint = 0,
                                 double tol = kLocateTol);

struct SvgOptions {
  double width_px = 900.0;
  const ScalarField *fill = nullptr;  // optional vertex scalar, averaged per triangle
  std::string stroke = "#1a4a7a";
  double stroke_width_px = 0.5;
};

void write_svg(const SimplicialMesh &mesh, const std::string &path, const SvgOptions &opts = {});

// Formats a double with 17 significant digits (value-preserving text).
std::string fmt_g17(double v);

}  // namespace amat

#endif
