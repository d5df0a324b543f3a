#include "transient_metric.h"

#include <cmath>
#include <fstream>

#include "errors.h"
#include "metric.h"
#include "recovery.h"

namespace amat {

IntervalHessian make_interval_hessian(const SimplicialMesh &mesh) {
  IntervalHessian ih;
  ih.mesh = &mesh;
  ih.accumulated.assign(mesh.nv(), Sym2{});
  return ih;
}

void accumulate(IntervalHessian &ih, const TensorField &h_step, double dt) {
  if (static_cast<int>(h_step.size()) != ih.mesh->nv())
    throw InvalidArgument("accumulate: sample size does not match the interval mesh");
  TensorField rectified = absolute_tensor(h_step);
  if (ih.has_prev) {
    if (!(dt > 0.0)) throw InvalidArgument("accumulate: dt must be positive");
    for (size_t v = 0; v < rectified.size(); ++v)
      ih.accumulated[v] += (ih.prev_sample[v] + rectified[v]) * (0.5 * dt);
  }
  ih.prev_sample = std::move(rectified);
  ih.has_prev = true;
  ++ih.steps_seen;
}

double compute_K(const IntervalHessian &ih, int p, int d) {
  const double expo = static_cast<double>(p) / (2.0 * p + d);
  const SimplicialMesh &mesh = *ih.mesh;
  double total = 0.0;
  for (int t = 0; t < mesh.nt(); ++t) {
    const auto &tr = mesh.tris[t];
    double s = 0.0;
    for (int v : tr) {
      const double det = std::max(ih.accumulated[v].det(), 0.0);
      s += std::pow(det, expo);
    }
    total += mesh.area(t) * s / 3.0;
  }
  return total;
}

void NormalizationParams::validate() const {
  if (!(N_avg > 0.0)) throw InvalidArgument("normalization: N_avg must be positive");
  if (n_I < 1 || n_T < 1) throw InvalidArgument("normalization: n_I, n_T >= 1");
  if (p < 1) throw InvalidArgument("normalization: p >= 1");
  if (d != 2) throw InvalidArgument("normalization: only d = 2 is supported");
  if (h_min > 0.0 && !(h_min < h_max)) throw InvalidArgument("normalization: h_min < h_max");
}

std::vector<MetricField> interval_metrics(const std::vector<IntervalHessian> &ihs,
                                          const NormalizationParams &params) {
  params.validate();
  if (static_cast<int>(ihs.size()) != params.n_I)
    throw InvalidArgument("interval_metrics: expected one accumulated Hessian per interval");

  const int p = params.p, d = params.d;
  const double det_expo = -1.0 / (2.0 * p + d);
  const double k_expo = static_cast<double>(p) / (2.0 * p + d);

  // Eigenvalue floor per interval, relative to the largest eigenvalue seen
  // anywhere; keeps det^(-1/(2p+d)) finite in constant-solution regions.
  double global_max = 0.0;
  std::vector<double> interval_max(ihs.size(), 0.0);
  for (size_t i = 0; i < ihs.size(); ++i) {
    for (const Sym2 &h : ihs[i].accumulated)
      interval_max[i] = std::max(interval_max[i], eigen_sym2(h).l1);
    global_max = std::max(global_max, interval_max[i]);
  }

  std::vector<MetricField> out;
  out.reserve(ihs.size());

  if (global_max <= 0.0) {
    // Degenerate input: uniform metric carrying N_avg/n_T vertices.
    for (const IntervalHessian &ih : ihs) {
      const SimplicialMesh &mesh = *ih.mesh;
      double area = 0.0;
      for (int t = 0; t < mesh.nt(); ++t) area += mesh.area(t);
      const double lam = params.N_avg / (params.n_T * area);
      out.push_back(uniform_metric_field(mesh, MetricTensor{lam, 0.0, lam}));
    }
    return out;
  }

  // Floored Hessians and their K_j, so the normalization is consistent.
  std::vector<TensorField> floored(ihs.size());
  double k_sum = 0.0;
  for (size_t i = 0; i < ihs.size(); ++i) {
    const double floor_base = interval_max[i] > 0.0 ? interval_max[i] : global_max;
    const double eps = 1e-10 * floor_base;
    floored[i].resize(ihs[i].accumulated.size());
    for (size_t v = 0; v < floored[i].size(); ++v) {
      const SymEigen e = eigen_sym2(ihs[i].accumulated[v]);
      floored[i][v] = compose_sym2(std::max(e.l1, eps), std::max(e.l2, eps), e.v1);
    }
    const SimplicialMesh &mesh = *ihs[i].mesh;
    for (int t = 0; t < mesh.nt(); ++t) {
      const auto &tr = mesh.tris[t];
      double s = 0.0;
      for (int v : tr) s += std::pow(floored[i][v].det(), k_expo);
      k_sum += mesh.area(t) * s / 3.0;
    }
  }

  const double target = params.N_avg * params.n_I / static_cast<double>(params.n_T);
  const double factor = std::pow(target, 2.0 / d) * std::pow(k_sum, -2.0 / d);

  for (size_t i = 0; i < ihs.size(); ++i) {
    MetricField f{ihs[i].mesh, {}};
    f.tensors.reserve(floored[i].size());
    for (const Sym2 &h : floored[i]) {
      const Sym2 scaled = h * (factor * std::pow(h.det(), det_expo));
      if (params.h_min > 0.0) {
        f.tensors.push_back(bound_eigenvalues(scaled, params.h_min, params.h_max));
      } else {
        MetricTensor m{scaled};
        if (!m.spd()) throw InvalidArgument("interval_metrics: scaled tensor lost definiteness");
        f.tensors.push_back(m);
      }
    }
    if (params.beta > 1.0)
      f = apply_gradation(f, params.beta, params.seed + i);
    out.push_back(std::move(f));
  }
  return out;
}

void write_interval_metrics(const std::string &dir, const std::vector<MetricField> &metrics,
                            const NormalizationParams &params) {
  for (size_t i = 0; i < metrics.size(); ++i)
    save_metric_field(metrics[i], dir + "/metric_interval_" + std::to_string(i + 1) + ".txt");
  std::ofstream man(dir + "/metrics_manifest.txt");
  if (!man) throw Error("cannot write metrics manifest in " + dir);
  man << "n_I=" << params.n_I << "\n"
      << "n_T=" << params.n_T << "\n"
      << "N_avg=" << fmt_g17(params.N_avg) << "\n"
      << "p=" << params.p << "\n"
      << "beta=" << fmt_g17(params.beta) << "\n";
}

}  // namespace amat
