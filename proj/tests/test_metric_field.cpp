#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include "metric_field.h"
#include "support.h"

using namespace amat;

namespace {

std::string temp_path(const std::string &name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// High-resolution reference for the edge-length integral under the same
// log-Euclidean interpolation rule (composite trapezoid, 2000 panels).
double edge_length_reference(const MetricTensor &mp, const MetricTensor &mq, const Vec2 &a,
                             const Vec2 &b) {
  const Vec2 e = b - a;
  const Sym2 la = metric_log(mp), lb = metric_log(mq);
  const int n = 2000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * metric_exp(la * (1.0 - t) + lb * t).length(e);
  }
  return acc / n;
}

// Dense sub-triangulation quadrature of the metric volume (midpoint rule
// on a k x k split, log-Euclidean interpolation inside the element).
double volume_reference(const MetricField &f, int tri, int k) {
  const auto &tr = f.mesh->tris[tri];
  const Vec2 &a = f.mesh->xy[tr[0]], &b = f.mesh->xy[tr[1]], &c = f.mesh->xy[tr[2]];
  const double area = f.mesh->area(tri);
  const Sym2 l0 = metric_log(f.tensors[tr[0]]);
  const Sym2 l1 = metric_log(f.tensors[tr[1]]);
  const Sym2 l2 = metric_log(f.tensors[tr[2]]);
  double acc = 0.0;
  int cells = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k - i; ++j) {
      const int reps = (j < k - i - 1) ? 2 : 1;  // upright + inverted sub-cell
      for (int r = 0; r < reps; ++r) {
        const double shift = (r == 0) ? 1.0 / 3.0 : 2.0 / 3.0;
        const double w1 = (i + shift) / k, w2 = (j + shift) / k;
        const double w0 = 1.0 - w1 - w2;
        const MetricTensor m = metric_exp(l0 * w0 + l1 * w1 + l2 * w2);
        acc += std::sqrt(m.det());
        ++cells;
      }
    }
  }
  (void)a;
  (void)b;
  (void)c;
  return area * acc / cells;
}

}  // namespace

TEST_CASE("edge length: constant metrics and the quadrature oracle") {
  const SimplicialMesh m = structured_rect_mesh(2, 1, Rect{0, 2, 0, 1});
  // Vertex 0 = (0,0), vertex 1 = (1,0), vertex 2 = (2,0).
  MetricField id = uniform_metric_field(m, MetricTensor{});
  CHECK(edge_length_metric(id, 0, 1) == doctest::Approx(1.0));
  CHECK(edge_length_metric(id, 0, 2) == doctest::Approx(2.0));
  CHECK(edge_length_metric(id, 0, 0) == 0.0);

  MetricField aniso = uniform_metric_field(m, MetricTensor{100.0, 0.0, 10000.0});
  CHECK(edge_length_metric(aniso, 0, 1) == doctest::Approx(10.0));

  // Varying field: 2-point Gauss vs dense reference, within 5%.
  MetricField vary = id;
  vary.tensors[1] = MetricTensor{100.0, 0.0, 100.0};
  const double computed = edge_length_metric(vary, 0, 1);
  const double reference =
      edge_length_reference(vary.tensors[0], vary.tensors[1], m.xy[0], m.xy[1]);
  CHECK(computed == doctest::Approx(reference).epsilon(0.05));

  // Length homogeneity: scaling the metric by s^2 scales lengths by s.
  MetricField scaled = uniform_metric_field(m, MetricTensor{} * 9.0);
  CHECK(edge_length_metric(scaled, 0, 1) == doctest::Approx(3.0 * edge_length_metric(id, 0, 1)));
}

TEST_CASE("element volume and complexity") {
  const SimplicialMesh unit = structured_rect_mesh(1, 1, Rect{0, 1, 0, 1});
  MetricField id = uniform_metric_field(unit, MetricTensor{});
  CHECK(element_volume_metric(id, 0) == doctest::Approx(0.5));
  CHECK(complexity(id) == doctest::Approx(1.0));

  MetricField four = uniform_metric_field(unit, MetricTensor{4.0, 0.0, 4.0});
  CHECK(element_volume_metric(four, 0) == doctest::Approx(2.0));

  const SimplicialMesh grid = structured_rect_mesh(20, 10, Rect{-2, 2, -1, 1});
  const double h = 0.01;
  MetricField fine = uniform_metric_field(grid, MetricTensor{1.0 / (h * h), 0.0, 1.0 / (h * h)});
  CHECK(complexity(fine) == doctest::Approx(80000.0).epsilon(1e-9));

  MetricField tenth = uniform_metric_field(unit, MetricTensor{100.0, 0.0, 100.0});
  CHECK(complexity(tenth) == doctest::Approx(100.0));

  // Linearly varying sizes: 4-node rule vs dense sub-triangulation, 1%.
  const SimplicialMesh tri = structured_rect_mesh(1, 1, Rect{0, 1, 0, 1});
  MetricField lin = uniform_metric_field(tri, MetricTensor{});
  for (int v = 0; v < tri.nv(); ++v) {
    const double s = 1.0 + 0.5 * tri.xy[v].x + 0.25 * tri.xy[v].y;
    lin.tensors[v] = MetricTensor{s, 0.3 * s, 2.0 * s};
  }
  for (int t = 0; t < tri.nt(); ++t) {
    CHECK(element_volume_metric(lin, t) == doctest::Approx(volume_reference(lin, t, 64)).epsilon(0.01));
  }
}

TEST_CASE("spacetime complexity") {
  const SimplicialMesh unit = structured_rect_mesh(2, 2, Rect{0, 1, 0, 1});
  MetricField hundred = uniform_metric_field(unit, MetricTensor{100.0, 0.0, 100.0});
  std::vector<MetricField> one{hundred};
  CHECK(spacetime_complexity(one, 10) == doctest::Approx(1000.0));

  std::vector<MetricField> four(4, hundred);
  CHECK(spacetime_complexity(four, 1) == doctest::Approx(4.0 * complexity(hundred)));

  std::vector<MetricField> none;
  CHECK_THROWS_AS(spacetime_complexity(none, 4), InvalidArgument);
}

TEST_CASE("quality measure") {
  // Equilateral triangle under the identity.
  std::vector<Vec2> xy{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}};
  const SimplicialMesh eq = build_mesh(xy, {{0, 1, 2}}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}, {});
  MetricField id = uniform_metric_field(eq, MetricTensor{});
  CHECK(quality_metric(eq, 0, id) == doctest::Approx(1.0).epsilon(1e-9));

  // Needle.
  std::vector<Vec2> nxy{{0, 0}, {1, 0}, {0.5, 0.01}};
  const SimplicialMesh needle = build_mesh(nxy, {{0, 1, 2}}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}, {});
  MetricField nid = uniform_metric_field(needle, MetricTensor{});
  CHECK(quality_metric(needle, 0, nid) < 0.1);

  // Equilateral mapped through M^(-1/2) has quality 1 under M.
  const MetricTensor m = from_sizes({0.05, 0.4, 0.6});
  const MetricEigen me = eigendecompose(m);
  auto map = [&](const Vec2 &p) {
    const double s1 = 1.0 / std::sqrt(me.l1), s2 = 1.0 / std::sqrt(me.l2);
    return Vec2{me.v1.x * s1 * p.x + me.v2.x * s2 * p.y, me.v1.y * s1 * p.x + me.v2.y * s2 * p.y};
  };
  std::vector<Vec2> axy{map({0, 0}), map({1, 0}), map({0.5, std::sqrt(3.0) / 2.0})};
  if (signed_area(axy[0], axy[1], axy[2]) < 0) std::swap(axy[1], axy[2]);
  const SimplicialMesh aeq = build_mesh(axy, {{0, 1, 2}}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}, {});
  MetricField mf = uniform_metric_field(aeq, m);
  CHECK(quality_metric(aeq, 0, mf) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gradation: fixed points and the growth law") {
  const SimplicialMesh m = testing::perturbed_rect_mesh(12, 9, Rect{0, 1.2, 0, 0.9}, 0.2, 21);

  // Uniform field is already graded.
  MetricField uni = uniform_metric_field(m, MetricTensor{25.0, 0.0, 25.0});
  MetricField g1 = apply_gradation(uni, 1.8, 5);
  for (int v = 0; v < m.nv(); ++v)
    CHECK(frobenius_distance(g1.tensors[v], uni.tensors[v]) < 1e-12 * 25.0);

  CHECK_THROWS_AS(apply_gradation(uni, 1.0, 0), InvalidArgument);
}

TEST_CASE("gradation growth bound along a path of unit edges") {
  // 10 x 1 strip of unit cells: a path of unit-length edges along y = 0.
  const int nx = 10;
  const SimplicialMesh m = structured_rect_mesh(nx, 1, Rect{0, 10, 0, 1});
  MetricField f = uniform_metric_field(m, MetricTensor{1.0, 0.0, 1.0});  // h = 1
  const double h0 = 0.01;
  f.tensors[0] = MetricTensor{1.0 / (h0 * h0), 0.0, 1.0 / (h0 * h0)};

  const double beta = 2.0;
  MetricField g = apply_gradation(f, beta, 17);

  // Dijkstra distances from vertex 0 over Euclidean edge lengths.
  std::vector<double> dist(m.nv(), 1e300);
  dist[0] = 0.0;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.push({0.0, 0});
  const auto edges = collect_edges(m);
  std::vector<std::vector<std::pair<int, double>>> adj(m.nv());
  for (const MeshEdge &e : edges) {
    const double len = (m.xy[e.q] - m.xy[e.p]).norm();
    adj[e.p].push_back({e.q, len});
    adj[e.q].push_back({e.p, len});
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, len] : adj[v])
      if (dist[v] + len < dist[w]) {
        dist[w] = dist[v] + len;
        pq.push({dist[w], w});
      }
  }

  for (int v = 0; v < m.nv(); ++v) {
    const MetricEigen e = eigendecompose(g.tensors[v]);
    const double h = 1.0 / std::sqrt(e.l1);  // smallest size
    const double bound = std::min(1.0, h0 + (beta - 1.0) * dist[v]);
    CHECK(h <= bound * (1.0 + 1e-6));
  }
  // The seeded vertex keeps its size.
  CHECK(eigendecompose(g.tensors[0]).h1() == doctest::Approx(h0));

  // Every edge satisfies the bound operationally; a second application
  // changes nothing.
  for (const MeshEdge &e : edges) CHECK(gradation_satisfied(g, e.p, e.q, beta));
  MetricField g2 = apply_gradation(g, beta, 710);
  for (int v = 0; v < m.nv(); ++v) {
    const double ref = std::max(1.0, g.tensors[v].sym().frobenius());
    CHECK(frobenius_distance(g2.tensors[v], g.tensors[v]) <= 1e-10 * ref);
  }
}

TEST_CASE("metric file round trip") {
  const SimplicialMesh m = structured_rect_mesh(3, 2, Rect{0, 1, 0, 1});
  MetricField f = uniform_metric_field(m, MetricTensor{});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (auto &t : f.tensors) {
    const double a = u(rng), d = u(rng);
    t = MetricTensor{a, 0.2 * std::min(a, d), d};
  }
  const std::string p1 = temp_path("amat_metric1.txt");
  const std::string p2 = temp_path("amat_metric2.txt");
  save_metric_field(f, p1);
  MetricField r = load_metric_field(m, p1);
  for (int v = 0; v < m.nv(); ++v) {
    CHECK(r.tensors[v].m11 == f.tensors[v].m11);
    CHECK(r.tensors[v].m12 == f.tensors[v].m12);
    CHECK(r.tensors[v].m22 == f.tensors[v].m22);
  }
  save_metric_field(r, p2);
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}
