#ifndef AMAT_METRIC_H
#define AMAT_METRIC_H

#include "errors.h"
#include "geometry.h"

namespace amat {

// Symmetric positive-definite 2x2 tensor prescribing local target sizes
// and directions. Eigenvalues are 1/h^2 for target size h.
struct MetricTensor {
  double m11 = 1.0, m12 = 0.0, m22 = 1.0;

  MetricTensor() = default;
  MetricTensor(double a, double b, double c) : m11(a), m12(b), m22(c) {}
  explicit MetricTensor(const Sym2 &s) : m11(s.xx), m12(s.xy), m22(s.yy) {}

  Sym2 sym() const { return {m11, m12, m22}; }
  double det() const { return m11 * m22 - m12 * m12; }
  bool spd() const { return m11 > 0.0 && det() > 0.0; }
  double quad(const Vec2 &v) const { return m11 * v.x * v.x + 2.0 * m12 * v.x * v.y + m22 * v.y * v.y; }
  // Metric length of a straight segment under this (constant) tensor.
  double length(const Vec2 &v) const { return std::sqrt(quad(v)); }

  MetricTensor operator*(double s) const { return {m11 * s, m12 * s, m22 * s}; }
};

struct SizeSpec {
  double h1 = 1.0;     // target size along the first eigenvector
  double h2 = 1.0;     // target size along the orthogonal direction
  double theta = 0.0;  // angle of the first eigenvector, radians
};

struct MetricEigen {
  double l1 = 0.0, l2 = 0.0;  // l1 >= l2 > 0
  Vec2 v1, v2;
  double h1() const { return 1.0 / std::sqrt(l1); }
  double h2() const { return 1.0 / std::sqrt(l2); }
};

MetricTensor from_sizes(const SizeSpec &spec);
MetricEigen eigendecompose(const MetricTensor &m);

// Simultaneous-reduction intersection: the unit ball of the result is
// contained in the unit balls of both inputs; intersect(a, a) == a.
MetricTensor intersect(const MetricTensor &a, const MetricTensor &b);

// Clamp eigenvalues into [h_max^-2, h_min^-2], eigenvectors unchanged.
// Accepts positive semi-definite input (rectified Hessians).
MetricTensor bound_eigenvalues(const Sym2 &m, double h_min, double h_max);

// P |Lambda| P^T of a symmetric tensor.
Sym2 absolute_sym(const Sym2 &t);

// Matrix log/exp through the eigendecomposition.
Sym2 metric_log(const MetricTensor &m);
MetricTensor metric_exp(const Sym2 &s);

// Log-Euclidean interpolation: exp(sum w_i log M_i). Weights sum to 1.
MetricTensor interpolate_log_euclidean(const MetricTensor &a, const MetricTensor &b, double t);
MetricTensor interpolate_log_euclidean(const MetricTensor &a, const MetricTensor &b,
                                       const MetricTensor &c, double wa, double wb, double wc);

// Grow both target sizes by delta (used by the gradation growth law).
MetricTensor grow_sizes(const MetricTensor &m, double delta);

inline double frobenius_distance(const MetricTensor &a, const MetricTensor &b) {
  const double dxx = a.m11 - b.m11, dxy = a.m12 - b.m12, dyy = a.m22 - b.m22;
  return std::sqrt(dxx * dxx + 2.0 * dxy * dxy + dyy * dyy);
}

}  // namespace amat

#endif
