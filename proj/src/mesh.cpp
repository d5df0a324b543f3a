#include "mesh.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace amat {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Rect SimplicialMesh::bounds() const {
  Rect r{xy[0].x, xy[0].x, xy[0].y, xy[0].y};
  for (const Vec2 &p : xy) {
    r.x0 = std::min(r.x0, p.x);
    r.x1 = std::max(r.x1, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

void fail(const std::string &msg) { throw StructuralError("mesh: " + msg); }

}  // namespace

SimplicialMesh build_mesh(std::vector<Vec2> xy, std::vector<std::array<int, 3>> tris,
                          std::vector<BoundaryEdge> boundary_edges, std::vector<bool> corner) {
  SimplicialMesh m;
  m.xy = std::move(xy);
  m.tris = std::move(tris);
  m.boundary_edges = std::move(boundary_edges);
  m.corner = std::move(corner);

  const int nv = m.nv();
  const int nt = m.nt();
  if (nv < 3 || nt < 1) fail("needs at least 3 vertices and 1 triangle");
  if (m.corner.empty()) m.corner.assign(nv, false);
  if (static_cast<int>(m.corner.size()) != nv) fail("corner flag count mismatch");

  for (const auto &t : m.tris)
    for (int v : t)
      if (v < 0 || v >= nv) fail("triangle vertex index out of range");
  for (const auto &e : m.boundary_edges)
    if (e.p < 0 || e.p >= nv || e.q < 0 || e.q >= nv || e.p == e.q)
      fail("boundary edge index out of range");

  for (int t = 0; t < nt; ++t)
    if (!(m.area(t) > 0.0)) fail("triangle " + std::to_string(t) + " has non-positive area");

  // Directed edges must be unique in a consistently oriented 2-manifold;
  // duplicated triangles and folds are caught here.
  std::map<std::pair<int, int>, int> directed;
  for (int t = 0; t < nt; ++t) {
    const auto &tr = m.tris[t];
    for (int k = 0; k < 3; ++k) {
      const auto key = std::make_pair(tr[k], tr[(k + 1) % 3]);
      if (!directed.emplace(key, t).second) fail("duplicate directed edge (non-conforming triangles)");
    }
  }

  // Undirected incidence: interior edges see 2 triangles, boundary edges 1.
  std::map<std::pair<int, int>, std::array<int, 2>> und;
  for (int t = 0; t < nt; ++t) {
    const auto &tr = m.tris[t];
    for (int k = 0; k < 3; ++k) {
      const auto key = ordered(tr[(k + 1) % 3], tr[(k + 2) % 3]);
      auto it = und.find(key);
      if (it == und.end()) {
        und[key] = {t, -1};
      } else if (it->second[1] == -1) {
        it->second[1] = t;
      } else {
        fail("edge shared by more than two triangles");
      }
    }
  }

  std::map<std::pair<int, int>, int> btag;
  for (const auto &e : m.boundary_edges) {
    if (!btag.emplace(ordered(e.p, e.q), e.tag).second) fail("duplicate boundary edge");
  }
  for (const auto &[key, ts] : und) {
    const bool is_bnd = ts[1] == -1;
    const bool listed = btag.count(key) > 0;
    if (is_bnd && !listed)
      fail("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
           ") lies on the boundary but is not declared");
    if (!is_bnd && listed) fail("declared boundary edge is interior");
  }
  if (btag.size() != m.boundary_edges.size() || [&] {
        size_t nb = 0;
        for (const auto &[k, ts] : und) nb += ts[1] == -1;
        return nb != btag.size();
      }())
    fail("boundary edge list does not match mesh boundary");

  // Closed loops: every boundary vertex carries exactly two boundary edges.
  std::vector<int> bdeg(nv, 0);
  for (const auto &e : m.boundary_edges) {
    ++bdeg[e.p];
    ++bdeg[e.q];
  }
  for (int v = 0; v < nv; ++v)
    if (bdeg[v] != 0 && bdeg[v] != 2) fail("boundary is not a union of closed loops");

  // Adjacency.
  m.v2t_offset.assign(nv + 1, 0);
  for (const auto &tr : m.tris)
    for (int v : tr) ++m.v2t_offset[v + 1];
  for (int v = 0; v < nv; ++v) m.v2t_offset[v + 1] += m.v2t_offset[v];
  m.v2t_data.resize(3 * nt);
  {
    std::vector<int> cursor(m.v2t_offset.begin(), m.v2t_offset.end() - 1);
    for (int t = 0; t < nt; ++t)
      for (int v : m.tris[t]) m.v2t_data[cursor[v]++] = t;
  }

  m.tri_neighbor.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto &tr = m.tris[t];
    for (int k = 0; k < 3; ++k) {
      const auto key = ordered(tr[(k + 1) % 3], tr[(k + 2) % 3]);
      const auto &ts = und[key];
      m.tri_neighbor[t][k] = (ts[0] == t) ? ts[1] : ts[0];
    }
  }

  m.vertex_boundary_tag.assign(nv, -1);
  for (const auto &e : m.boundary_edges) {
    for (int v : {e.p, e.q}) {
      if (m.vertex_boundary_tag[v] == -1 || e.tag < m.vertex_boundary_tag[v])
        m.vertex_boundary_tag[v] = e.tag;
    }
  }
  for (int v = 0; v < nv; ++v)
    if (m.corner[v] && m.vertex_boundary_tag[v] < 0) fail("corner flag on interior vertex");

  return m;
}

SimplicialMesh structured_rect_mesh(int nx, int ny, const Rect &rect) {
  if (nx < 1 || ny < 1) throw InvalidArgument("structured_rect_mesh: nx, ny >= 1");
  std::vector<Vec2> xy;
  xy.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      xy.push_back({rect.x0 + rect.width() * i / nx, rect.y0 + rect.height() * j / ny});

  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }

  std::vector<BoundaryEdge> bed;
  for (int i = 0; i < nx; ++i) bed.push_back({id(i, 0), id(i + 1, 0), 1});
  for (int j = 0; j < ny; ++j) bed.push_back({id(nx, j), id(nx, j + 1), 2});
  for (int i = 0; i < nx; ++i) bed.push_back({id(i + 1, ny), id(i, ny), 3});
  for (int j = 0; j < ny; ++j) bed.push_back({id(0, j + 1), id(0, j), 4});

  std::vector<bool> corner((nx + 1) * (ny + 1), false);
  corner[id(0, 0)] = corner[id(nx, 0)] = corner[id(0, ny)] = corner[id(nx, ny)] = true;

  return build_mesh(std::move(xy), std::move(tris), std::move(bed), std::move(corner));
}

namespace {

struct TokenReader {
  std::ifstream in;
  int line = 0;
  std::istringstream cur;
  std::string path;

  explicit TokenReader(const std::string &p) : in(p), path(p) {
    if (!in) throw StructuralError("cannot open mesh file: " + p);
  }

  std::string next() {
    std::string tok;
    while (!(cur >> tok)) {
      std::string l;
      if (!std::getline(in, l)) return {};
      ++line;
      cur.clear();
      cur.str(l);
    }
    return tok;
  }

  [[noreturn]] void fail_at(const std::string &msg) {
    throw StructuralError(path + ":" + std::to_string(line) + ": " + msg);
  }

  long integer() {
    const std::string t = next();
    if (t.empty()) fail_at("unexpected end of file, expected integer");
    char *end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (*end != '\0') fail_at("expected integer, got '" + t + "'");
    return v;
  }

  double real() {
    const std::string t = next();
    if (t.empty()) fail_at("unexpected end of file, expected number");
    char *end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0') fail_at("expected number, got '" + t + "'");
    return v;
  }
};

}  // namespace

SimplicialMesh load_mesh(const std::string &path) {
  TokenReader r(path);
  std::vector<Vec2> xy;
  std::vector<std::array<int, 3>> tris;
  std::vector<BoundaryEdge> bed;
  std::vector<int> corner_ids;

  for (std::string tok = r.next(); !tok.empty(); tok = r.next()) {
    if (tok == "MeshVersionFormatted") {
      r.integer();
    } else if (tok == "Dimension") {
      if (r.integer() != 2) r.fail_at("only Dimension 2 is supported");
    } else if (tok == "Vertices") {
      const long n = r.integer();
      xy.reserve(n);
      for (long i = 0; i < n; ++i) {
        const double x = r.real(), y = r.real();
        r.integer();  // reference, unused
        xy.push_back({x, y});
      }
    } else if (tok == "Triangles") {
      const long n = r.integer();
      tris.reserve(n);
      for (long i = 0; i < n; ++i) {
        const long a = r.integer(), b = r.integer(), c = r.integer();
        r.integer();
        tris.push_back({static_cast<int>(a - 1), static_cast<int>(b - 1), static_cast<int>(c - 1)});
      }
    } else if (tok == "Edges") {
      const long n = r.integer();
      bed.reserve(n);
      for (long i = 0; i < n; ++i) {
        const long p = r.integer(), q = r.integer(), tag = r.integer();
        bed.push_back({static_cast<int>(p - 1), static_cast<int>(q - 1), static_cast<int>(tag)});
      }
    } else if (tok == "Corners") {
      const long n = r.integer();
      for (long i = 0; i < n; ++i) corner_ids.push_back(static_cast<int>(r.integer() - 1));
    } else if (tok == "End") {
      break;
    } else {
      r.fail_at("unknown section '" + tok + "'");
    }
  }
  if (xy.empty()) throw StructuralError(path + ": no Vertices section");

  std::vector<bool> corner(xy.size(), false);
  for (int v : corner_ids) {
    if (v < 0 || v >= static_cast<int>(xy.size()))
      throw StructuralError(path + ": corner index out of range");
    corner[v] = true;
  }
  return build_mesh(std::move(xy), std::move(tris), std::move(bed), std::move(corner));
}

void save_mesh(const SimplicialMesh &m, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write mesh file: " + path);
  out << "MeshVersionFormatted 2\nDimension 2\n";
  out << "Vertices\n" << m.nv() << "\n";
  for (const Vec2 &p : m.xy) out << fmt_g17(p.x) << " " << fmt_g17(p.y) << " 0\n";
  out << "Triangles\n" << m.nt() << "\n";
  for (const auto &t : m.tris) out << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << " 0\n";
  out << "Edges\n" << m.boundary_edges.size() << "\n";
  for (const auto &e : m.boundary_edges) out << e.p + 1 << " " << e.q + 1 << " " << e.tag << "\n";
  int nc = 0;
  for (bool c : m.corner) nc += c;
  out << "Corners\n" << nc << "\n";
  for (int v = 0; v < m.nv(); ++v)
    if (m.corner[v]) out << v + 1 << "\n";
  out << "End\n";
  if (!out) throw StructuralError("write failed: " + path);
}

std::vector<MeshEdge> collect_edges(const SimplicialMesh &m) {
  std::map<std::pair<int, int>, MeshEdge> edges;
  for (int t = 0; t < m.nt(); ++t) {
    const auto &tr = m.tris[t];
    for (int k = 0; k < 3; ++k) {
      const auto key = ordered(tr[(k + 1) % 3], tr[(k + 2) % 3]);
      auto it = edges.find(key);
      if (it == edges.end())
        edges[key] = {key.first, key.second, t, -1};
      else
        it->second.t1 = t;
    }
  }
  std::vector<MeshEdge> out;
  out.reserve(edges.size());
  for (const auto &[k, e] : edges) out.push_back(e);
  return out;
}

namespace {

std::array<double, 3> barycentric(const SimplicialMesh &m, int t, const Vec2 &p) {
  const auto &tr = m.tris[t];
  const Vec2 &a = m.xy[tr[0]], &b = m.xy[tr[1]], &c = m.xy[tr[2]];
  const double total = signed_area(a, b, c);
  return {signed_area(p, b, c) / total, signed_area(a, p, c) / total, signed_area(a, b, p) / total};
}

double min_bary(const std::array<double, 3> &w) { return std::min({w[0], w[1], w[2]}); }

// Returns the containing element, or the best element seen (inside=false).
Location walk_or_scan(const SimplicialMesh &m, const Vec2 &p, int hint, double tol) {
  int t = (hint >= 0 && hint < m.nt()) ? hint : 0;
  const int max_steps = m.nt() + 8;
  for (int step = 0; step < max_steps; ++step) {
    const auto w = barycentric(m, t, p);
    int worst = 0;
    if (w[1] < w[worst]) worst = 1;
    if (w[2] < w[worst]) worst = 2;
    if (w[worst] >= -tol) return {t, w, true};
    const int next = m.tri_neighbor[t][worst];
    if (next < 0) break;  // walked out of the domain
    t = next;
  }
  // Brute-force fallback; also guards against cycles on irregular cavities.
  Location best{-1, {}, false};
  double best_min = -1e300;
  for (int k = 0; k < m.nt(); ++k) {
    const auto w = barycentric(m, k, p);
    const double mb = min_bary(w);
    if (mb >= -tol) return {k, w, true};
    if (mb > best_min) {
      best_min = mb;
      best = {k, w, false};
    }
  }
  return best;
}

}  // namespace

Location locate_point(const SimplicialMesh &m, const Vec2 &p, int hint, double tol) {
  Location loc = walk_or_scan(m, p, hint, tol);
  if (!loc.inside)
    throw NotFound("locate_point: (" + fmt_g17(p.x) + ", " + fmt_g17(p.y) + ") outside the mesh");
  return loc;
}

Location locate_point_or_nearest(const SimplicialMesh &m, const Vec2 &p, int hint, double tol) {
  Location loc = walk_or_scan(m, p, hint, tol);
  if (!loc.inside) {
    // Clamp the barycentric coordinates onto the element.
    for (double &w : loc.bary) w = std::max(w, 0.0);
    const double s = loc.bary[0] + loc.bary[1] + loc.bary[2];
    for (double &w : loc.bary) w /= s;
  }
  return loc;
}

void write_svg(const SimplicialMesh &m, const std::string &path, const SvgOptions &opts) {
  const Rect b = m.bounds();
  const double scale = opts.width_px / b.width();
  const double h_px = b.height() * scale;
  auto px = [&](const Vec2 &p) {
    return Vec2{(p.x - b.x0) * scale, h_px - (p.y - b.y0) * scale};
  };

  std::ofstream out(path);
  if (!out) throw Error("cannot write svg: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width_px << "\" height=\""
      << h_px << "\" viewBox=\"0 0 " << opts.width_px << " " << h_px << "\">\n";

  if (opts.fill && opts.fill->size() == m.xy.size()) {
    double lo = 1e300, hi = -1e300;
    for (double v : *opts.fill) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = (hi > lo) ? hi - lo : 1.0;
    for (const auto &t : m.tris) {
      const double v = ((*opts.fill)[t[0]] + (*opts.fill)[t[1]] + (*opts.fill)[t[2]]) / 3.0;
      const int r = static_cast<int>(255.0 * (v - lo) / span);
      const Vec2 a = px(m.xy[t[0]]), bb = px(m.xy[t[1]]), c = px(m.xy[t[2]]);
      out << "<polygon points=\"" << a.x << "," << a.y << " " << bb.x << "," << bb.y << " " << c.x
          << "," << c.y << "\" fill=\"rgb(" << r << ",64," << 255 - r << ")\" stroke=\"none\"/>\n";
    }
  }

  for (const MeshEdge &e : collect_edges(m)) {
    const Vec2 a = px(m.xy[e.p]), bb = px(m.xy[e.q]);
    out << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << bb.x << "\" y2=\"" << bb.y
        << "\" stroke=\"" << opts.stroke << "\" stroke-width=\"" << opts.stroke_width_px << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace amat
