#ifndef AMAT_FEM_H
#define AMAT_FEM_H

#include <Eigen/Sparse>

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "fields.h"
#include "mesh.h"
#include "recovery.h"
#include "transient_metric.h"

namespace amat {

// Reference solution, PDE source and domain for d_t(u) - lap(u) + f = 0
// with Dirichlet data taken from the reference.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual double value(const Vec2 &p, double t) const = 0;
  virtual double source(const Vec2 &p, double t) const = 0;
  virtual Rect domain() const = 0;
  virtual double final_time() const = 0;
};

// Steep front traveling at speed c: tanh((2(x - c t) - sin(5 y)) / delta).
// The source makes the front an exact solution of the heat equation.
struct MmsProblem final : Problem {
  double c = 1.0;
  double delta = 0.02;
  double T = 1.0;
  Rect rect{-2.0, 2.0, -1.0, 1.0};

  double value(const Vec2 &p, double t) const override;
  double source(const Vec2 &p, double t) const override;
  Rect domain() const override { return rect; }
  double final_time() const override { return T; }
};

using SparseMat = Eigen::SparseMatrix<double>;

struct P1Operators {
  SparseMat mass;
  SparseMat stiffness;
};

P1Operators assemble_operators(const SimplicialMesh &mesh);

// Load vector of the source term, degree-4 (6-point) quadrature.
Eigen::VectorXd source_load_vector(const SimplicialMesh &mesh, const Problem &prob, double t);

// L2(Omega) norm of (reference - P1 field) at time t, degree-4 quadrature.
// subdivisions > 0 splits each triangle 4^s times for self-consistency checks.
double l2_error(const SimplicialMesh &mesh, const ScalarField &u, const Problem &prob, double t,
                int subdivisions = 0);

struct TimeState {
  ScalarField u_now;
  ScalarField u_prev;
  ScalarField u_prevprev;
  double t = 0.0;
  double dt_last = 0.0;  // t - t_prev; 0 when no usable history
  bool has_history() const { return dt_last > 0.0 && !u_prev.empty(); }
};

// Implicit time stepper on a fixed mesh: BDF2 with variable-step
// coefficients, BDF1 for the very first step. Dirichlet values from the
// problem reference are imposed on all boundary vertices. Constrained
// systems are cached per coefficient, so repeated constant steps reuse
// the same matrix and preconditioner.
class TransientSolver {
 public:
  TransientSolver(const SimplicialMesh &mesh, const Problem &prob);
  ~TransientSolver();

  // Advances state by dt (BDF1 when the state has no history).
  void step(TimeState &state, double dt);

  const P1Operators &ops() const { return ops_; }
  long total_cg_iterations() const { return cg_iterations_; }

 private:
  struct System;
  System &system_for(double a0);

  const SimplicialMesh &mesh_;
  const Problem &prob_;
  P1Operators ops_;
  std::vector<int> dirichlet_;
  std::map<double, std::unique_ptr<System>> systems_;
  long cg_iterations_ = 0;
};

struct IntervalSolution {
  TimeState state;           // at t1
  IntervalHessian hessian;   // integral of |H(u_h)| over [t0, t1]
  long cg_iterations = 0;
};

// Advances from t0 to t1 in n_T constant steps, sampling the recovered
// Hessian of the discrete solution at every grid time. The initial state
// must sit at t0; without history the run starts with a BDF1 step of
// dt/10 followed by a variable-step BDF2 step reaching t0 + dt.
IntervalSolution solve_interval(const SimplicialMesh &mesh, TimeState initial, double t1, int n_T,
                                const Problem &prob, const RecoveryOperator *recovery = nullptr);

struct IntervalEndState {
  const SimplicialMesh *mesh = nullptr;
  ScalarField u;
  double t_end = 0.0;
  double weight = 0.0;  // n_T * dt, the sub-interval length
};

// E = sum_j weight_j * ||ref(., t_j) - u_j||_L2
double error_L1L2(const std::vector<IntervalEndState> &ends, const Problem &prob);

}  // namespace amat

#endif
