#ifndef AMAT_TRANSIENT_METRIC_H
#define AMAT_TRANSIENT_METRIC_H

#include <cstdint>
#include <string>
#include <vector>

#include "fields.h"
#include "mesh.h"
#include "metric_field.h"

namespace amat {

// Running time integral of the rectified Hessian over one sub-interval,
// accumulated with the trapezoidal rule as samples stream in.
struct IntervalHessian {
  const SimplicialMesh *mesh = nullptr;
  TensorField accumulated;  // integral of |H(t)| dt, positive semi-definite
  TensorField prev_sample;
  int steps_seen = 0;
  bool has_prev = false;
};

IntervalHessian make_interval_hessian(const SimplicialMesh &mesh);

// Streams one Hessian sample taken dt after the previous one. The sample
// is rectified to |H|; the first call only records the left endpoint.
void accumulate(IntervalHessian &ih, const TensorField &h_step, double dt);

// Integral over the domain of det(H)^(p/(2p+d)), vertex-rule quadrature.
double compute_K(const IntervalHessian &ih, int p, int d = 2);

struct NormalizationParams {
  double N_avg = 1000.0;  // target average spatial complexity per interval
  int n_I = 1;
  int n_T = 1;
  int p = 2;  // Lp norm driving the adaptation
  int d = 2;
  double h_min = 0.0, h_max = 0.0;  // eigenvalue clamps; <= 0 disables
  double beta = 1.8;                // gradation bound; <= 1 disables
  std::uint64_t seed = 0;

  void validate() const;
};

// Optimal interval metrics: per vertex,
//   M_i = (N_avg n_I / n_T)^(2/d) (sum_j K_j)^(-2/d) det(H_i)^(-1/(2p+d)) H_i
// with eigenvalue flooring of H_i, then size clamping and gradation.
// All-zero Hessians fall back to the uniform metric of complexity N_avg/n_T.
std::vector<MetricField> interval_metrics(const std::vector<IntervalHessian> &ihs,
                                          const NormalizationParams &params);

// Writes metric_interval_<i>.txt (1-based) plus a manifest with the
// normalization parameters.
void write_interval_metrics(const std::string &dir, const std::vector<MetricField> &metrics,
                            const NormalizationParams &params);

}  // namespace amat

#endif
