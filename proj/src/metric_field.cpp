#include "metric_field.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace amat {

bool MetricField::valid() const {
  if (!mesh || static_cast<int>(tensors.size()) != mesh->nv()) return false;
  return std::all_of(tensors.begin(), tensors.end(), [](const MetricTensor &m) { return m.spd(); });
}

MetricField uniform_metric_field(const SimplicialMesh &mesh, const MetricTensor &m) {
  return {&mesh, std::vector<MetricTensor>(mesh.nv(), m)};
}

double segment_length_metric(const MetricTensor &mp, const MetricTensor &mq, const Vec2 &a,
                             const Vec2 &b) {
  const Vec2 e = b - a;
  if (e.norm2() == 0.0) return 0.0;
  // 2-point Gauss-Legendre on [0, 1]
  static const double g = 0.5 / std::sqrt(3.0);
  const Sym2 la = metric_log(mp), lb = metric_log(mq);
  double len = 0.0;
  for (const double t : {0.5 - g, 0.5 + g}) {
    const MetricTensor mt = metric_exp(la * (1.0 - t) + lb * t);
    len += 0.5 * mt.length(e);
  }
  return len;
}

double edge_length_metric(const MetricField &field, int p, int q) {
  if (p == q) return 0.0;
  return segment_length_metric(field.tensors[p], field.tensors[q], field.mesh->xy[p],
                               field.mesh->xy[q]);
}

double element_volume_metric(const MetricField &field, int tri) {
  const auto &tr = field.mesh->tris[tri];
  const MetricTensor &m0 = field.tensors[tr[0]];
  const MetricTensor &m1 = field.tensors[tr[1]];
  const MetricTensor &m2 = field.tensors[tr[2]];
  const double third = 1.0 / 3.0;
  const MetricTensor mc = interpolate_log_euclidean(m0, m1, m2, third, third, third);
  const double s = std::sqrt(m0.det()) + std::sqrt(m1.det()) + std::sqrt(m2.det()) + std::sqrt(mc.det());
  return field.mesh->area(tri) * 0.25 * s;
}

double complexity(const MetricField &field) {
  double c = 0.0;
  for (int t = 0; t < field.mesh->nt(); ++t) c += element_volume_metric(field, t);
  return c;
}

double spacetime_complexity(std::span<const MetricField> fields, int n_T) {
  if (fields.empty()) throw InvalidArgument("spacetime_complexity: no interval fields");
  if (n_T < 1) throw InvalidArgument("spacetime_complexity: n_T >= 1");
  double c = 0.0;
  for (const MetricField &f : fields) c += complexity(f);
  return n_T * c;
}

MetricTensor interpolate_metric(const MetricField &field, int tri, const std::array<double, 3> &bary) {
  const auto &tr = field.mesh->tris[tri];
  return interpolate_log_euclidean(field.tensors[tr[0]], field.tensors[tr[1]], field.tensors[tr[2]],
                                   bary[0], bary[1], bary[2]);
}

double quality_constant_metric(const Vec2 &a, const Vec2 &b, const Vec2 &c, const MetricTensor &m) {
  const double area = signed_area(a, b, c);
  if (!(area > 0.0)) return 0.0;
  const double vol = area * std::sqrt(m.det());
  const double s2 = m.quad(b - a) + m.quad(c - b) + m.quad(a - c);
  if (s2 <= 0.0) return 0.0;
  return 4.0 * std::sqrt(3.0) * vol / s2;
}

double quality_metric(const SimplicialMesh &mesh, int tri, const MetricField &field) {
  if (!(mesh.area(tri) > 0.0)) return 0.0;
  const auto &tr = mesh.tris[tri];
  const double l01 = edge_length_metric(field, tr[0], tr[1]);
  const double l12 = edge_length_metric(field, tr[1], tr[2]);
  const double l20 = edge_length_metric(field, tr[2], tr[0]);
  const double s2 = l01 * l01 + l12 * l12 + l20 * l20;
  if (s2 <= 0.0) return 0.0;
  return 4.0 * std::sqrt(3.0) * element_volume_metric(field, tri) / s2;
}

namespace {

// Limit the tensor at q by the tensor at p grown over the edge.
// Returns true when the tensor changed.
bool limit_by_neighbor(MetricTensor &tq, const MetricTensor &tp, double edge_len, double beta) {
  const MetricTensor grown = grow_sizes(tp, (beta - 1.0) * edge_len);
  const MetricTensor limited = intersect(tq, grown);
  const double ref = std::max(1.0, tq.sym().frobenius());
  if (frobenius_distance(limited, tq) > 1e-10 * ref) {
    tq = limited;
    return true;
  }
  return false;
}

}  // namespace

MetricField apply_gradation(const MetricField &field, double beta, std::uint64_t seed) {
  if (!(beta > 1.0)) throw InvalidArgument("apply_gradation: beta must exceed 1");
  MetricField out{field.mesh, field.tensors};
  const auto edges = collect_edges(*field.mesh);
  std::vector<int> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);

  const int max_sweeps = 50;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    int changed = 0;
    for (int idx : order) {
      const MeshEdge &e = edges[idx];
      const double len = (field.mesh->xy[e.q] - field.mesh->xy[e.p]).norm();
      changed += limit_by_neighbor(out.tensors[e.q], out.tensors[e.p], len, beta);
      changed += limit_by_neighbor(out.tensors[e.p], out.tensors[e.q], len, beta);
    }
    if (changed == 0) break;
  }
  return out;
}

bool gradation_satisfied(const MetricField &field, int p, int q, double beta, double rel_tol) {
  const double len = (field.mesh->xy[q] - field.mesh->xy[p]).norm();
  for (const auto &[a, b] : {std::pair{p, q}, std::pair{q, p}}) {
    const MetricTensor grown = grow_sizes(field.tensors[a], (beta - 1.0) * len);
    const MetricTensor limited = intersect(field.tensors[b], grown);
    const double ref = std::max(1.0, field.tensors[b].sym().frobenius());
    if (frobenius_distance(limited, field.tensors[b]) > rel_tol * ref) return false;
  }
  return true;
}

void save_metric_field(const MetricField &field, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write metric file: " + path);
  out << "MetricAtVertices " << field.tensors.size() << "\n";
  for (const MetricTensor &m : field.tensors)
    out << fmt_g17(m.m11) << " " << fmt_g17(m.m12) << " " << fmt_g17(m.m22) << "\n";
  out << "End\n";
}

void save_tensor_field(const TensorField &field, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write tensor file: " + path);
  out << "MetricAtVertices " << field.size() << "\n";
  for (const Sym2 &s : field)
    out << fmt_g17(s.xx) << " " << fmt_g17(s.xy) << " " << fmt_g17(s.yy) << "\n";
  out << "End\n";
}

MetricField load_metric_field(const SimplicialMesh &mesh, const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open metric file: " + path);
  std::string keyword;
  size_t n = 0;
  if (!(in >> keyword >> n) || keyword != "MetricAtVertices")
    throw StructuralError(path + ": expected 'MetricAtVertices <N>' header");
  if (static_cast<int>(n) != mesh.nv())
    throw InvalidArgument(path + ": tensor count does not match mesh vertex count");
  MetricField f{&mesh, {}};
  f.tensors.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    MetricTensor m;
    if (!(in >> m.m11 >> m.m12 >> m.m22))
      throw StructuralError(path + ": truncated tensor list at entry " + std::to_string(i + 1));
    if (!m.spd())
      throw InvalidArgument(path + ": tensor " + std::to_string(i + 1) + " is not SPD");
    f.tensors.push_back(m);
  }
  if (!(in >> keyword) || keyword != "End") throw StructuralError(path + ": missing End");
  return f;
}

}  // namespace amat
