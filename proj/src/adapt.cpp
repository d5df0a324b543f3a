#include "adapt.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "errors.h"

namespace amat {

namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

// Editable triangulation with per-vertex tensors interpolated from the
// background field. Triangles are tombstoned, vertices compacted at the end.
struct Work {
  const MetricField *field;
  const SimplicialMesh *bg;
  AdaptParams prm;

  std::vector<Vec2> xy;
  std::vector<MetricTensor> mt;
  std::vector<Sym2> log_mt;  // cached metric_log(mt), hot in length evaluations
  std::vector<int> btag;     // -1 interior
  std::vector<bool> corner;
  std::vector<bool> v_alive;
  std::vector<int> hint;  // background element hint per vertex

  std::vector<std::array<int, 3>> tri;
  std::vector<bool> t_alive;
  std::vector<std::vector<int>> v2t;

  std::map<std::pair<int, int>, int> bedge_tag;
  Rect box;

  std::mt19937_64 rng;

  explicit Work(const SimplicialMesh &m, const MetricField &f, const AdaptParams &p)
      : field(&f), bg(f.mesh), prm(p), rng(p.seed) {
    xy = m.xy;
    tri = m.tris;
    t_alive.assign(tri.size(), true);
    v_alive.assign(xy.size(), true);
    corner.assign(m.corner.begin(), m.corner.end());
    btag = m.vertex_boundary_tag;
    hint.assign(xy.size(), 0);
    v2t.resize(xy.size());
    for (size_t t = 0; t < tri.size(); ++t)
      for (int v : tri[t]) v2t[v].push_back(static_cast<int>(t));
    for (const BoundaryEdge &e : m.boundary_edges) bedge_tag[ordered(e.p, e.q)] = e.tag;
    box = m.bounds();

    mt.resize(xy.size());
    log_mt.resize(xy.size());
    for (size_t v = 0; v < xy.size(); ++v) set_metric(static_cast<int>(v), xy[v]);
  }

  void set_metric(int v, const Vec2 &at) {
    const Location loc = locate_point_or_nearest(*bg, at, hint[v]);
    hint[v] = loc.tri;
    mt[v] = interpolate_metric(*field, loc.tri, loc.bary);
    log_mt[v] = metric_log(mt[v]);
  }

  double tri_area(int t) const { return signed_area(xy[tri[t][0]], xy[tri[t][1]], xy[tri[t][2]]); }

  // Positive area with a relative floor against the edge scale: triangles
  // this close to collinear may not be created by any operation.
  bool area_ok(int a, int b, int c) const {
    const double area = signed_area(xy[a], xy[b], xy[c]);
    const double s2 = std::max({(xy[b] - xy[a]).norm2(), (xy[c] - xy[b]).norm2(),
                                (xy[a] - xy[c]).norm2()});
    return area > 1e-14 * s2;
  }

  double edge_length(int p, int q) const {
    const Vec2 e = xy[q] - xy[p];
    if (e.norm2() == 0.0) return 0.0;
    static const double g = 0.5 / std::sqrt(3.0);
    double len = 0.0;
    for (const double t : {0.5 - g, 0.5 + g}) {
      const MetricTensor m = metric_exp(log_mt[p] * (1.0 - t) + log_mt[q] * t);
      len += 0.5 * m.length(e);
    }
    return len;
  }

  static double segment_len(const Vec2 &a, const Sym2 &la, const Vec2 &b, const Sym2 &lb) {
    const Vec2 e = b - a;
    if (e.norm2() == 0.0) return 0.0;
    static const double g = 0.5 / std::sqrt(3.0);
    double len = 0.0;
    for (const double t : {0.5 - g, 0.5 + g})
      len += 0.5 * metric_exp(la * (1.0 - t) + lb * t).length(e);
    return len;
  }

  // Shape-only measure: orientation is validated separately by area_ok.
  static double quality_raw(const Vec2 &pa, const MetricTensor &ma, const Sym2 &la, const Vec2 &pb,
                            const MetricTensor &mb, const Sym2 &lb, const Vec2 &pc,
                            const MetricTensor &mc, const Sym2 &lc) {
    const double area = std::abs(signed_area(pa, pb, pc));
    if (!(area > 0.0)) return 0.0;
    const double sdet = (std::sqrt(ma.det()) + std::sqrt(mb.det()) + std::sqrt(mc.det())) / 3.0;
    const double lab = segment_len(pa, la, pb, lb);
    const double lbc = segment_len(pb, lb, pc, lc);
    const double lca = segment_len(pc, lc, pa, la);
    const double s2 = lab * lab + lbc * lbc + lca * lca;
    if (s2 <= 0.0) return 0.0;
    return 4.0 * std::sqrt(3.0) * area * sdet / s2;
  }

  double quality(int a, int b, int c) const {
    return quality_raw(xy[a], mt[a], log_mt[a], xy[b], mt[b], log_mt[b], xy[c], mt[c], log_mt[c]);
  }

  double quality(int t) const { return quality(tri[t][0], tri[t][1], tri[t][2]); }

  void detach(int t) {
    for (int v : tri[t]) {
      auto &list = v2t[v];
      list.erase(std::find(list.begin(), list.end(), t));
    }
    t_alive[t] = false;
  }

  int attach(std::array<int, 3> verts) {
    const int t = static_cast<int>(tri.size());
    tri.push_back(verts);
    t_alive.push_back(true);
    for (int v : verts) v2t[v].push_back(t);
    return t;
  }

  // Alive triangles containing the (undirected) edge.
  void edge_tris(int p, int q, int out[2]) const {
    out[0] = out[1] = -1;
    int k = 0;
    for (int t : v2t[p]) {
      const auto &tr = tri[t];
      if (tr[0] == q || tr[1] == q || tr[2] == q) {
        if (k < 2) out[k] = t;
        ++k;
      }
    }
  }

  int third_vertex(int t, int p, int q) const {
    for (int v : tri[t])
      if (v != p && v != q) return v;
    return -1;
  }

  bool edge_exists(int p, int q) const {
    for (int t : v2t[p]) {
      const auto &tr = tri[t];
      if (tr[0] == q || tr[1] == q || tr[2] == q) return true;
    }
    return false;
  }

  bool split(int p, int q);
  bool collapse_edge(int p, int q);
  bool try_collapse_into(int gone, int kept, bool prune_mode = false);
  bool prune_triangle(int t);
  bool flip(int p, int q);
  bool smooth_vertex(int v);

  SimplicialMesh extract() const;
};

bool Work::split(int p, int q) {
  int ts[2];
  edge_tris(p, q, ts);
  if (ts[0] < 0) return false;

  // Cut position: bisection puts both children in the unit range whenever
  // len <= 2 * split_threshold; longer edges shed one near-unit segment per
  // round so chains land close to unit pitch instead of a power of two.
  double cut = 0.5;
  {
    const double len = edge_length(p, q);
    if (len > 2.0 * prm.split_threshold) cut = 1.08 / len;
  }
  const Vec2 mid = xy[p] + cut * (xy[q] - xy[p]);
  const bool on_boundary_edge = bedge_tag.count(ordered(p, q)) > 0;

  // Interior points may not crowd the boundary below the metric's normal
  // size: repeated midpoint splits of boundary-hugging edges would squeeze
  // vertices onto the wall and degenerate the layer.
  if (!on_boundary_edge) {
    MetricTensor mid_mt;
    {
      const Location loc = locate_point_or_nearest(*bg, mid, hint[p]);
      mid_mt = interpolate_metric(*field, loc.tri, loc.bary);
    }
    const double hx = 1.0 / std::sqrt(mid_mt.m11);
    const double hy = 1.0 / std::sqrt(mid_mt.m22);
    const double gx = std::min(mid.x - box.x0, box.x1 - mid.x);
    const double gy = std::min(mid.y - box.y0, box.y1 - mid.y);
    if (gx < 0.10 * hx || gy < 0.10 * hy) return false;
  }

  // Both children of every incident triangle must stay numerically valid.
  for (int t : {ts[0], ts[1]}) {
    if (t < 0) continue;
    const int r = third_vertex(t, p, q);
    const double s2 =
        std::max({(xy[q] - xy[p]).norm2(), (xy[r] - xy[p]).norm2(), (xy[r] - xy[q]).norm2()});
    if (!(std::abs(signed_area(xy[p], mid, xy[r])) > 1e-14 * s2) ||
        !(std::abs(signed_area(mid, xy[q], xy[r])) > 1e-14 * s2))
      return false;
  }

  const int m = static_cast<int>(xy.size());
  xy.push_back(mid);
  v_alive.push_back(true);
  corner.push_back(false);
  v2t.emplace_back();
  hint.push_back(hint[p]);
  mt.emplace_back();
  log_mt.emplace_back();
  set_metric(m, mid);

  const auto bkey = ordered(p, q);
  const auto bit = bedge_tag.find(bkey);
  if (bit != bedge_tag.end()) {
    btag.push_back(bit->second);
    bedge_tag[ordered(p, m)] = bit->second;
    bedge_tag[ordered(m, q)] = bit->second;
    bedge_tag.erase(bit);
  } else {
    btag.push_back(-1);
  }

  for (int t : {ts[0], ts[1]}) {
    if (t < 0) continue;
    std::array<int, 3> tr = tri[t];
    detach(t);
    for (int k = 0; k < 3; ++k) {
      std::array<int, 3> t1 = tr, t2 = tr;
      if ((tr[k] == p && tr[(k + 1) % 3] == q) || (tr[k] == q && tr[(k + 1) % 3] == p)) {
        t1[(k + 1) % 3] = m;
        t2[k] = m;
        attach(t1);
        attach(t2);
        break;
      }
    }
  }
  return true;
}

bool Work::try_collapse_into(int gone, int kept, bool prune_mode) {
  if (corner[gone]) return false;
  if (btag[gone] >= 0) {
    // Boundary vertices may only slide along their own segment, so the
    // collapse must run along a boundary edge.
    if (bedge_tag.find(ordered(gone, kept)) == bedge_tag.end()) return false;
  }

  int dead[2];
  edge_tris(gone, kept, dead);

  // Simulate the ring with 'gone' replaced by 'kept'.
  double old_min_q = 1e300;
  for (int t : v2t[gone]) old_min_q = std::min(old_min_q, quality(t));

  double new_min_q = 1e300;
  for (int t : v2t[gone]) {
    if (t == dead[0] || t == dead[1]) continue;
    std::array<int, 3> tr = tri[t];
    for (int &v : tr)
      if (v == gone) v = kept;
    if (!area_ok(tr[0], tr[1], tr[2])) return false;
    new_min_q = std::min(new_min_q, quality(tr[0], tr[1], tr[2]));
    // Anti-churn: a replacement edge may not feed the split phase unless
    // it was at least as long before the collapse.
    if (!prune_mode) {
      for (int v : tr) {
        if (v == kept) continue;
        const double len_new = edge_length(kept, v);
        if (len_new > prm.split_threshold && len_new > edge_length(gone, v) + 1e-12) return false;
      }
    }
  }
  // Below the floor, allow a bounded transient drop: anisotropic boundary
  // layers can only coarsen through locally flatter intermediates.
  if (new_min_q < prm.quality_floor && new_min_q < 0.5 * old_min_q) return false;

  // Boundary bookkeeping: merge the two boundary edges at 'gone'.
  if (btag[gone] >= 0) {
    std::vector<std::pair<int, int>> incident;
    for (auto it = bedge_tag.lower_bound({gone, -1});
         it != bedge_tag.end() && it->first.first == gone; ++it)
      incident.push_back(it->first);
    for (auto it = bedge_tag.begin(); it != bedge_tag.end(); ++it)
      if (it->first.second == gone) incident.push_back(it->first);
    for (const auto &key : incident) {
      const int other = key.first == gone ? key.second : key.first;
      const int tag = bedge_tag[key];
      bedge_tag.erase(key);
      if (other != kept) bedge_tag[ordered(kept, other)] = tag;
    }
  }

  std::vector<int> ring = v2t[gone];
  for (int t : ring) {
    if (t == dead[0] || t == dead[1]) {
      detach(t);
      continue;
    }
    std::array<int, 3> tr = tri[t];
    for (int &v : tr)
      if (v == gone) v = kept;
    detach(t);
    attach(tr);
  }
  v_alive[gone] = false;
  return true;
}

bool Work::collapse_edge(int p, int q) {
  // Prefer removing an interior vertex; tie-break on the smaller index.
  std::array<std::pair<int, int>, 2> tries{std::pair{p, q}, std::pair{q, p}};
  if (btag[p] >= 0 && btag[q] < 0) std::swap(tries[0], tries[1]);
  for (const auto &[gone, kept] : tries)
    if (try_collapse_into(gone, kept)) return true;
  return false;
}

// Removes a numerically degenerate triangle by collapsing one of its
// edges, shortest first, with the transient-degeneracy rules enabled.
bool Work::prune_triangle(int t) {
  const auto tr = tri[t];
  std::array<std::pair<double, int>, 3> order;
  for (int k = 0; k < 3; ++k)
    order[k] = {edge_length(tr[k], tr[(k + 1) % 3]), k};
  std::sort(order.begin(), order.end());
  for (const auto &[len, k] : order) {
    const int p = tr[k], q = tr[(k + 1) % 3];
    if (try_collapse_into(p, q, true)) return true;
    if (try_collapse_into(q, p, true)) return true;
  }
  return false;
}

bool Work::flip(int p, int q) {
  if (bedge_tag.count(ordered(p, q))) return false;
  int ts[2];
  edge_tris(p, q, ts);
  if (ts[0] < 0 || ts[1] < 0) return false;

  const int r = third_vertex(ts[0], p, q);
  const int s = third_vertex(ts[1], p, q);
  if (r == s || edge_exists(r, s)) return false;
  // A chord between two boundary vertices invites collinear descendants.
  if (btag[r] >= 0 && btag[s] >= 0) return false;

  // Orient: ts[0] = (a, b, r) up to rotation; then ts[1] holds (b, a, s).
  int a = p, b = q;
  {
    const auto &tr = tri[ts[0]];
    for (int k = 0; k < 3; ++k)
      if (tr[k] == r) {
        a = tr[(k + 1) % 3];
        b = tr[(k + 2) % 3];
      }
  }

  const double q_old = std::min(quality(ts[0]), quality(ts[1]));
  if (!area_ok(a, s, r) || !area_ok(s, b, r)) return false;
  const double q_new = std::min(quality(a, s, r), quality(s, b, r));
  if (q_new <= q_old * (1.0 + 1e-10)) return false;

  // The replacement edge must be in the unit range or strictly closer to
  // unit length, otherwise flips feed new work to the split/collapse phases.
  const double len_new = edge_length(r, s);
  if (len_new > prm.split_threshold || len_new < prm.collapse_threshold) {
    const double len_old = edge_length(p, q);
    if (std::abs(std::log(len_new)) >= std::abs(std::log(len_old))) return false;
  }

  detach(ts[0]);
  detach(ts[1]);
  attach({a, s, r});
  attach({s, b, r});
  return true;
}

bool Work::smooth_vertex(int v) {
  if (!v_alive[v] || corner[v]) return false;
  if (v2t[v].empty()) return false;

  // Neighbours pull the vertex to metric distance 1 along each edge.
  std::vector<int> nbr;
  for (int t : v2t[v])
    for (int w : tri[t])
      if (w != v && std::find(nbr.begin(), nbr.end(), w) == nbr.end()) nbr.push_back(w);
  std::sort(nbr.begin(), nbr.end());

  // Rest length slightly above 1: split/collapse equilibria otherwise
  // settle with mean edge length below unit and waste density.
  const double rest = 1.08;
  Vec2 target{0.0, 0.0};
  int used = 0;
  for (int w : nbr) {
    const double len = edge_length(v, w);
    if (len <= 1e-12) continue;
    target += xy[w] + (xy[v] - xy[w]) * (rest / len);
    ++used;
  }
  if (used == 0) return false;
  target = target * (1.0 / used);

  Vec2 candidate = xy[v] + 0.5 * (target - xy[v]);
  if (btag[v] >= 0) {
    // Slide along the straight boundary segment only.
    std::array<Vec2, 2> ends;
    int found = 0;
    for (const auto &[key, tag] : bedge_tag) {
      if (key.first == v || key.second == v) {
        if (found < 2) ends[found] = xy[key.first == v ? key.second : key.first];
        ++found;
      }
    }
    if (found != 2) return false;
    const Vec2 d = ends[1] - ends[0];
    const double dn2 = d.norm2();
    if (dn2 <= 0.0) return false;
    const double s = (candidate - ends[0]).dot(d) / dn2;
    candidate = ends[0] + d * s;
  }

  if ((candidate - xy[v]).norm2() == 0.0) return false;

  const Vec2 old_pos = xy[v];
  const MetricTensor old_mt = mt[v];
  const Sym2 old_log = log_mt[v];
  const int old_hint = hint[v];

  double old_min_q = 1e300;
  for (int t : v2t[v]) old_min_q = std::min(old_min_q, quality(t));
  std::vector<double> old_len(nbr.size());
  for (size_t k = 0; k < nbr.size(); ++k) old_len[k] = edge_length(v, nbr[k]);

  xy[v] = candidate;
  set_metric(v, candidate);

  double new_min_q = 1e300;
  bool ok = true;
  for (int t : v2t[v]) {
    if (!area_ok(tri[t][0], tri[t][1], tri[t][2])) {
      ok = false;
      break;
    }
    new_min_q = std::min(new_min_q, quality(t));
  }
  if (ok && new_min_q < old_min_q - 1e-12 && new_min_q < prm.quality_floor) ok = false;
  // Monotone length equalization: the squared log-length deviation of the
  // incident edges may not grow, which lets over-dense regions shed edges
  // below the collapse threshold without re-feeding the split phase.
  if (ok) {
    double dev_old = 0.0, dev_new = 0.0;
    for (size_t k = 0; k < nbr.size(); ++k) {
      const double len = edge_length(v, nbr[k]);
      const double lo = std::log(std::max(old_len[k], 1e-12));
      const double ln = std::log(std::max(len, 1e-12));
      dev_old += lo * lo;
      dev_new += ln * ln;
    }
    if (dev_new > dev_old + 1e-12) ok = false;
  }

  if (!ok) {
    xy[v] = old_pos;
    mt[v] = old_mt;
    log_mt[v] = old_log;
    hint[v] = old_hint;
    return false;
  }
  return true;
}

SimplicialMesh Work::extract() const {
  std::vector<int> remap(xy.size(), -1);
  std::vector<Vec2> vout;
  std::vector<bool> cout_;
  for (size_t v = 0; v < xy.size(); ++v) {
    if (!v_alive[v]) continue;
    remap[v] = static_cast<int>(vout.size());
    vout.push_back(xy[v]);
    cout_.push_back(corner[v]);
  }
  std::vector<std::array<int, 3>> tout;
  for (size_t t = 0; t < tri.size(); ++t) {
    if (!t_alive[t]) continue;
    tout.push_back({remap[tri[t][0]], remap[tri[t][1]], remap[tri[t][2]]});
  }
  std::vector<BoundaryEdge> bout;
  for (const auto &[key, tag] : bedge_tag)
    bout.push_back({remap[key.first], remap[key.second], tag});
  return build_mesh(std::move(vout), std::move(tout), std::move(bout), std::move(cout_));
}

struct LengthEntry {
  double len;
  int p, q;
};

}  // namespace

AdaptResult adapt_mesh(const SimplicialMesh &mesh, const MetricField &field,
                       const AdaptParams &params) {
  if (!(params.collapse_threshold < 1.0 && 1.0 < params.split_threshold))
    throw InvalidArgument("adapt_mesh: need collapse_threshold < 1 < split_threshold");
  if (!field.valid() || field.mesh == nullptr)
    throw InvalidArgument("adapt_mesh: metric field is not bound to a mesh");

  Work w(mesh, field, params);
  AdaptResult res;

  for (int pass = 0; pass < params.max_passes; ++pass) {
    long n_split = 0, n_collapse = 0, n_flip = 0, n_smooth = 0;

    // Degenerate slivers first: they block the split phase and are only
    // removable with the transient-degeneracy collapse rules.
    for (int round = 0; round < 8; ++round) {
      long pruned = 0;
      for (size_t t = 0; t < w.tri.size(); ++t) {
        if (!w.t_alive[t]) continue;
        if (w.quality(static_cast<int>(t)) >= 1e-6) continue;
        pruned += w.prune_triangle(static_cast<int>(t));
      }
      n_collapse += pruned;
      if (pruned == 0) break;
    }

    // Split until no edge exceeds the threshold; each round halves the
    // longest edges, so a handful of rounds clears any metric.
    for (int round = 0; round < 64; ++round) {
      std::vector<std::pair<int, int>> pairs;
      for (size_t t = 0; t < w.tri.size(); ++t) {
        if (!w.t_alive[t]) continue;
        for (int k = 0; k < 3; ++k)
          pairs.push_back(ordered(w.tri[t][k], w.tri[t][(k + 1) % 3]));
      }
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      std::vector<LengthEntry> long_edges;
      for (const auto &[p, q] : pairs) {
        const double len = w.edge_length(p, q);
        if (len > params.split_threshold) long_edges.push_back({len, p, q});
      }
      if (long_edges.empty()) break;
      std::sort(long_edges.begin(), long_edges.end(), [](const LengthEntry &a, const LengthEntry &b) {
        return a.len != b.len ? a.len > b.len : std::tie(a.p, a.q) < std::tie(b.p, b.q);
      });
      long accepted = 0;
      for (const LengthEntry &e : long_edges) {
        if (!w.v_alive[e.p] || !w.v_alive[e.q]) continue;
        if (!w.edge_exists(e.p, e.q)) continue;
        if (w.edge_length(e.p, e.q) <= params.split_threshold) continue;
        accepted += w.split(e.p, e.q);
      }
      n_split += accepted;
      if (accepted == 0) break;
    }

    // Collapse short edges until none is accepted, shortest first.
    for (int round = 0; round < 16; ++round) {
      std::vector<std::pair<int, int>> pairs;
      for (size_t t = 0; t < w.tri.size(); ++t) {
        if (!w.t_alive[t]) continue;
        for (int k = 0; k < 3; ++k)
          pairs.push_back(ordered(w.tri[t][k], w.tri[t][(k + 1) % 3]));
      }
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      std::vector<LengthEntry> short_edges;
      for (const auto &[p, q] : pairs) {
        const double len = w.edge_length(p, q);
        if (len < params.collapse_threshold) short_edges.push_back({len, p, q});
      }
      if (short_edges.empty()) break;
      std::sort(short_edges.begin(), short_edges.end(),
                [](const LengthEntry &a, const LengthEntry &b) {
                  return a.len != b.len ? a.len < b.len : std::tie(a.p, a.q) < std::tie(b.p, b.q);
                });
      long accepted = 0;
      for (const LengthEntry &e : short_edges) {
        if (!w.v_alive[e.p] || !w.v_alive[e.q]) continue;
        if (!w.edge_exists(e.p, e.q)) continue;
        if (w.edge_length(e.p, e.q) >= params.collapse_threshold) continue;
        accepted += w.collapse_edge(e.p, e.q);
      }
      n_collapse += accepted;
      if (accepted == 0) break;
    }

    // Quality flips, randomized order, until settled.
    for (int round = 0; round < 8; ++round) {
      std::vector<std::pair<int, int>> edges;
      for (size_t t = 0; t < w.tri.size(); ++t) {
        if (!w.t_alive[t]) continue;
        for (int k = 0; k < 3; ++k)
          edges.push_back(ordered(w.tri[t][k], w.tri[t][(k + 1) % 3]));
      }
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      std::shuffle(edges.begin(), edges.end(), w.rng);
      long accepted = 0;
      for (const auto &[p, q] : edges) {
        if (!w.v_alive[p] || !w.v_alive[q]) continue;
        if (!w.edge_exists(p, q)) continue;
        accepted += w.flip(p, q);
      }
      n_flip += accepted;
      if (accepted == 0) break;
    }

    // One smoothing sweep, randomized order.
    {
      std::vector<int> verts;
      for (size_t v = 0; v < w.xy.size(); ++v)
        if (w.v_alive[v]) verts.push_back(static_cast<int>(v));
      std::shuffle(verts.begin(), verts.end(), w.rng);
      for (int v : verts) n_smooth += w.smooth_vertex(v);
    }

    res.passes = pass + 1;
    res.splits += n_split;
    res.collapses += n_collapse;
    res.flips += n_flip;
    res.smooth_moves += n_smooth;

    if (params.debug_svg) {
      const SimplicialMesh snapshot = w.extract();
      write_svg(snapshot, params.debug_dir + "/adapt_pass_" + std::to_string(pass + 1) + ".svg");
    }

    if (n_split + n_collapse + n_flip == 0) {
      res.reached_fixed_point = true;
      break;
    }
  }

  res.mesh = w.extract();
  return res;
}

double EdgeHistogram::fraction_between(double lo, double hi) const {
  if (total == 0) return 0.0;
  const double slack = 1e-9 * bin_width;
  int in = 0;
  for (size_t k = 0; k < counts.size(); ++k) {
    const double a = k * bin_width, b = (k + 1) * bin_width;
    if (a >= lo - slack && b <= hi + slack) in += counts[k];
  }
  return static_cast<double>(in) / total;
}

namespace {

double mesh_edge_length_under(const SimplicialMesh &mesh, const MetricField &field, const MeshEdge &e,
                              std::vector<MetricTensor> &cache, std::vector<char> &have, int &hint) {
  auto tensor_at = [&](int v) -> const MetricTensor & {
    if (!have[v]) {
      if (field.mesh == &mesh) {
        cache[v] = field.tensors[v];
      } else {
        const Location loc = locate_point_or_nearest(*field.mesh, mesh.xy[v], hint);
        hint = loc.tri;
        cache[v] = interpolate_metric(field, loc.tri, loc.bary);
      }
      have[v] = 1;
    }
    return cache[v];
  };
  return segment_length_metric(tensor_at(e.p), tensor_at(e.q), mesh.xy[e.p], mesh.xy[e.q]);
}

}  // namespace

EdgeHistogram unit_edge_histogram(const SimplicialMesh &mesh, const MetricField &field) {
  EdgeHistogram h;
  h.counts.assign(40, 0);
  std::vector<MetricTensor> cache(mesh.nv());
  std::vector<char> have(mesh.nv(), 0);
  int hint = 0;
  for (const MeshEdge &e : collect_edges(mesh)) {
    const double len = mesh_edge_length_under(mesh, field, e, cache, have, hint);
    const int bin = static_cast<int>(len / h.bin_width);
    if (bin < static_cast<int>(h.counts.size()))
      ++h.counts[bin];
    else
      ++h.overflow;
    ++h.total;
  }
  return h;
}

double edge_length_fraction(const SimplicialMesh &mesh, const MetricField &field, double lo,
                            double hi) {
  std::vector<MetricTensor> cache(mesh.nv());
  std::vector<char> have(mesh.nv(), 0);
  int hint = 0;
  int in = 0, total = 0;
  for (const MeshEdge &e : collect_edges(mesh)) {
    const double len = mesh_edge_length_under(mesh, field, e, cache, have, hint);
    in += (len >= lo && len <= hi);
    ++total;
  }
  return total ? static_cast<double>(in) / total : 0.0;
}

}  // namespace amat
