#include "metric.h"

#include <algorithm>

namespace amat {

MetricTensor from_sizes(const SizeSpec &spec) {
  if (!(spec.h1 > 0.0) || !(spec.h2 > 0.0))
    throw InvalidArgument("from_sizes: target sizes must be positive");
  const double l1 = 1.0 / (spec.h1 * spec.h1);
  const double l2 = 1.0 / (spec.h2 * spec.h2);
  const Vec2 v1{std::cos(spec.theta), std::sin(spec.theta)};
  return MetricTensor(compose_sym2(l1, l2, v1));
}

MetricEigen eigendecompose(const MetricTensor &m) {
  if (!m.spd()) throw InvalidArgument("eigendecompose: tensor is not SPD");
  const SymEigen e = eigen_sym2(m.sym());
  if (!(e.l2 > 0.0)) throw InvalidArgument("eigendecompose: tensor is not SPD");
  return {e.l1, e.l2, e.v1, e.v2};
}

Sym2 absolute_sym(const Sym2 &t) {
  const SymEigen e = eigen_sym2(t);
  return compose_sym2(std::abs(e.l1), std::abs(e.l2), e.v1);
}

Sym2 metric_log(const MetricTensor &m) {
  const MetricEigen e = eigendecompose(m);
  return compose_sym2(std::log(e.l1), std::log(e.l2), e.v1);
}

MetricTensor metric_exp(const Sym2 &s) {
  const SymEigen e = eigen_sym2(s);
  return MetricTensor(compose_sym2(std::exp(e.l1), std::exp(e.l2), e.v1));
}

namespace {

// Square root (or inverse square root) of an SPD tensor.
Sym2 spd_pow_half(const MetricTensor &m, bool inverse) {
  const MetricEigen e = eigendecompose(m);
  const double p = inverse ? -0.5 : 0.5;
  return compose_sym2(std::pow(e.l1, p), std::pow(e.l2, p), e.v1);
}

Sym2 congruent(const Sym2 &r, const Sym2 &s) {
  // r * s * r with r, s symmetric
  const double a11 = r.xx * s.xx + r.xy * s.xy;
  const double a12 = r.xx * s.xy + r.xy * s.yy;
  const double a21 = r.xy * s.xx + r.yy * s.xy;
  const double a22 = r.xy * s.xy + r.yy * s.yy;
  return {a11 * r.xx + a12 * r.xy, a11 * r.xy + a12 * r.yy, a21 * r.xy + a22 * r.yy};
}

}  // namespace

MetricTensor intersect(const MetricTensor &a, const MetricTensor &b) {
  if (!a.spd() || !b.spd()) throw InvalidArgument("intersect: tensors must be SPD");
  // Simultaneous reduction through the symmetric pencil
  // W = a^-1/2 b a^-1/2, intersect in the common eigenbasis, map back.
  const Sym2 a_isqrt = spd_pow_half(a, true);
  const Sym2 a_sqrt = spd_pow_half(a, false);
  const Sym2 w = congruent(a_isqrt, b.sym());
  const SymEigen we = eigen_sym2(w);
  const Sym2 d = compose_sym2(std::max(1.0, we.l1), std::max(1.0, we.l2), we.v1);
  return MetricTensor(congruent(a_sqrt, d));
}

MetricTensor bound_eigenvalues(const Sym2 &m, double h_min, double h_max) {
  if (!(h_min > 0.0) || !(h_min < h_max))
    throw InvalidArgument("bound_eigenvalues: need 0 < h_min < h_max");
  const double lo = 1.0 / (h_max * h_max);
  const double hi = 1.0 / (h_min * h_min);
  const SymEigen e = eigen_sym2(m);
  const double l1 = std::clamp(e.l1, lo, hi);
  const double l2 = std::clamp(e.l2, lo, hi);
  return MetricTensor(compose_sym2(l1, l2, e.v1));
}

MetricTensor interpolate_log_euclidean(const MetricTensor &a, const MetricTensor &b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  const Sym2 la = metric_log(a), lb = metric_log(b);
  return metric_exp(la * (1.0 - t) + lb * t);
}

MetricTensor interpolate_log_euclidean(const MetricTensor &a, const MetricTensor &b,
                                       const MetricTensor &c, double wa, double wb, double wc) {
  return metric_exp(metric_log(a) * wa + metric_log(b) * wb + metric_log(c) * wc);
}

MetricTensor grow_sizes(const MetricTensor &m, double delta) {
  const MetricEigen e = eigendecompose(m);
  const double h1 = e.h1() + delta;
  const double h2 = e.h2() + delta;
  return MetricTensor(compose_sym2(1.0 / (h1 * h1), 1.0 / (h2 * h2), e.v1));
}

}  // namespace amat
