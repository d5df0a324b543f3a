#ifndef AMAT_GEOMETRY_H
#define AMAT_GEOMETRY_H

#include <array>
#include <cmath>

namespace amat {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 &operator+=(const Vec2 &o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
  double cross(const Vec2 &o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
  double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2 &v) { return {s * v.x, s * v.y}; }

// Symmetric 2x2 tensor, not necessarily definite. Used for recovered
// Hessians and their time integrals; SPD metrics live in MetricTensor.
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  Sym2() = default;
  Sym2(double xx_, double xy_, double yy_) : xx(xx_), xy(xy_), yy(yy_) {}

  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }
  Sym2 operator+(const Sym2 &o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  Sym2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
  Sym2 &operator+=(const Sym2 &o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  // v' S v
  double quad(const Vec2 &v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
  double frobenius() const { return std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy); }
};

struct SymEigen {
  double l1 = 0.0, l2 = 0.0;  // l1 >= l2
  Vec2 v1, v2;                // unit, orthogonal, v2 = rot90(v1)
};

// Closed-form eigendecomposition of a symmetric 2x2 matrix.
// Stable for near-diagonal and near-isotropic inputs.
inline SymEigen eigen_sym2(const Sym2 &m) {
  SymEigen e;
  const double half_tr = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double disc = std::sqrt(half_diff * half_diff + m.xy * m.xy);
  e.l1 = half_tr + disc;
  e.l2 = half_tr - disc;
  if (disc <= 1e-30 * std::abs(half_tr) || (m.xy == 0.0 && half_diff == 0.0)) {
    e.v1 = {1.0, 0.0};
  } else if (half_diff >= 0.0) {
    // l1 - m.yy = half_diff + disc is the larger pivot
    e.v1 = {half_diff + disc, m.xy};
  } else {
    e.v1 = {m.xy, disc - half_diff};
  }
  const double n = e.v1.norm();
  if (n > 0.0) {
    e.v1 = e.v1 * (1.0 / n);
  } else {
    e.v1 = {1.0, 0.0};
  }
  e.v2 = {-e.v1.y, e.v1.x};
  return e;
}

inline Sym2 compose_sym2(double l1, double l2, const Vec2 &v1) {
  const Vec2 v2{-v1.y, v1.x};
  return {l1 * v1.x * v1.x + l2 * v2.x * v2.x, l1 * v1.x * v1.y + l2 * v2.x * v2.y,
          l1 * v1.y * v1.y + l2 * v2.y * v2.y};
}

// Triangle signed area (positive for counter-clockwise vertices).
inline double signed_area(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  return 0.5 * ((b - a).cross(c - a));
}

struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double diameter() const { return std::sqrt(width() * width() + height() * height()); }
  bool contains(const Vec2 &p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

}  // namespace amat

#endif
