#include "recovery.h"

#include <Eigen/Dense>

#include <algorithm>
#include <set>

#include "errors.h"
#include "metric.h"

namespace amat {

namespace {

constexpr int kQuadraticTerms = 6;
constexpr double kPivotRatioLimit = 1e12;

void add_ring(const SimplicialMesh &mesh, std::set<int> &patch) {
  std::set<int> grown = patch;
  for (int v : patch) {
    for (int k = mesh.v2t_offset[v]; k < mesh.v2t_offset[v + 1]; ++k)
      for (int w : mesh.tris[mesh.v2t_data[k]]) grown.insert(w);
  }
  patch.swap(grown);
}

}  // namespace

std::vector<int> build_patch(const SimplicialMesh &mesh, int vertex) {
  if (vertex < 0 || vertex >= mesh.nv()) throw InvalidArgument("build_patch: bad vertex id");
  std::set<int> patch{vertex};
  add_ring(mesh, patch);
  while (static_cast<int>(patch.size()) < kQuadraticTerms) {
    const size_t before = patch.size();
    add_ring(mesh, patch);
    if (patch.size() == before)
      throw InsufficientPatch("build_patch: mesh too small for a quadratic fit around vertex " +
                              std::to_string(vertex));
  }
  std::vector<int> out;
  out.reserve(patch.size());
  out.push_back(vertex);
  for (int v : patch)
    if (v != vertex) out.push_back(v);
  return out;
}

RecoveryOperator RecoveryOperator::build(const SimplicialMesh &mesh) {
  RecoveryOperator op;
  op.fits_.resize(mesh.nv());

  for (int v = 0; v < mesh.nv(); ++v) {
    VertexFit &fit = op.fits_[v];
    fit.verts = build_patch(mesh, v);
    const int n = static_cast<int>(fit.verts.size());

    // Center and scale the patch by its radius before fitting.
    const Vec2 center = mesh.xy[v];
    double radius = 0.0;
    for (int w : fit.verts) radius = std::max(radius, (mesh.xy[w] - center).norm());

    Eigen::MatrixXd a(n, kQuadraticTerms);
    for (int row = 0; row < n; ++row) {
      const Vec2 d = mesh.xy[fit.verts[row]] - center;
      const double xs = d.x / radius, ys = d.y / radius;
      a(row, 0) = 1.0;
      a(row, 1) = xs;
      a(row, 2) = ys;
      a(row, 3) = xs * xs;
      a(row, 4) = xs * ys;
      a(row, 5) = ys * ys;
    }

    // Weight vectors for the two linear coefficients: c = pinv(A) f, so
    // c_k = (A n^-1 e_k) . f with n the normal matrix.
    Eigen::MatrixXd w2;  // n x 2
    bool ok = false;
    {
      const Eigen::MatrixXd normal = a.transpose() * a;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
      const auto d = ldlt.vectorD();
      const double dmax = d.maxCoeff(), dmin = d.minCoeff();
      if (ldlt.info() == Eigen::Success && dmin > 0.0 && dmax / dmin < kPivotRatioLimit) {
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(kQuadraticTerms, 2);
        rhs(1, 0) = 1.0;
        rhs(2, 1) = 1.0;
        w2 = a * ldlt.solve(rhs);
        ok = true;
      }
    }
    if (!ok) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
      qr.setThreshold(1e-10);
      if (qr.rank() == kQuadraticTerms) {
        Eigen::MatrixXd coef = qr.solve(Eigen::MatrixXd::Identity(n, n));  // 6 x n
        w2 = coef.middleRows(1, 2).transpose();
        ok = true;
      }
    }
    if (!ok) {
      // Rank-deficient quadratic: fall back to a linear fit.
      fit.linear = true;
      ++op.fallback_count_;
      Eigen::MatrixXd al = a.leftCols(3);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(al);
      qr.setThreshold(1e-10);
      if (qr.rank() < 3)
        throw InsufficientPatch("recovery: degenerate patch around vertex " + std::to_string(v));
      Eigen::MatrixXd coef = qr.solve(Eigen::MatrixXd::Identity(n, n));  // 3 x n
      w2 = coef.middleRows(1, 2).transpose();
    }

    fit.wx.resize(n);
    fit.wy.resize(n);
    for (int row = 0; row < n; ++row) {
      fit.wx[row] = w2(row, 0) / radius;
      fit.wy[row] = w2(row, 1) / radius;
    }
  }
  return op;
}

VectorField RecoveryOperator::gradient(const ScalarField &f) const {
  VectorField g(fits_.size());
  for (size_t v = 0; v < fits_.size(); ++v) {
    const VertexFit &fit = fits_[v];
    double gx = 0.0, gy = 0.0;
    for (size_t k = 0; k < fit.verts.size(); ++k) {
      const double fv = f[fit.verts[k]];
      gx += fit.wx[k] * fv;
      gy += fit.wy[k] * fv;
    }
    g[v] = {gx, gy};
  }
  return g;
}

TensorField RecoveryOperator::hessian(const ScalarField &f) const {
  const VectorField g = gradient(f);
  TensorField h(fits_.size());
  for (size_t v = 0; v < fits_.size(); ++v) {
    const VertexFit &fit = fits_[v];
    double gxx = 0.0, gxy = 0.0, gyx = 0.0, gyy = 0.0;
    for (size_t k = 0; k < fit.verts.size(); ++k) {
      const Vec2 &gv = g[fit.verts[k]];
      gxx += fit.wx[k] * gv.x;
      gxy += fit.wy[k] * gv.x;
      gyx += fit.wx[k] * gv.y;
      gyy += fit.wy[k] * gv.y;
    }
    h[v] = {gxx, 0.5 * (gxy + gyx), gyy};
  }
  return h;
}

VectorField recover_gradient(const SimplicialMesh &mesh, const ScalarField &f) {
  return RecoveryOperator::build(mesh).gradient(f);
}

TensorField recover_hessian(const SimplicialMesh &mesh, const ScalarField &f) {
  return RecoveryOperator::build(mesh).hessian(f);
}

TensorField absolute_tensor(const TensorField &t) {
  TensorField out(t.size());
  std::transform(t.begin(), t.end(), out.begin(), absolute_sym);
  return out;
}

}  // namespace amat
