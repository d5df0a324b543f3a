#include "fem.h"

#include <Eigen/SparseCore>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>

#include "errors.h"

namespace amat {

double MmsProblem::value(const Vec2 &p, double t) const {
  return std::tanh((2.0 * (p.x - c * t) - std::sin(5.0 * p.y)) / delta);
}

double MmsProblem::source(const Vec2 &p, double t) const {
  const double th = value(p, t);
  const double s = 1.0 - th * th;
  const double gx = 2.0 / delta;
  const double gy = -5.0 * std::cos(5.0 * p.y) / delta;
  const double gyy = 25.0 * std::sin(5.0 * p.y) / delta;
  const double lap = s * (-2.0 * th * (gx * gx + gy * gy) + gyy);
  const double dt_ref = s * (-2.0 * c / delta);
  return lap - dt_ref;
}

namespace {

// Degree-4 rule on the reference triangle, 6 points, weights sum to 1.
struct QuadPoint {
  double w, b0, b1, b2;
};
constexpr QuadPoint kQuad6[6] = {
    {0.223381589678011, 0.108103018168070, 0.445948490915965, 0.445948490915965},
    {0.223381589678011, 0.445948490915965, 0.108103018168070, 0.445948490915965},
    {0.223381589678011, 0.445948490915965, 0.445948490915965, 0.108103018168070},
    {0.109951743655322, 0.816847572980459, 0.091576213509771, 0.091576213509771},
    {0.109951743655322, 0.091576213509771, 0.816847572980459, 0.091576213509771},
    {0.109951743655322, 0.091576213509771, 0.091576213509771, 0.816847572980459},
};

}  // namespace

P1Operators assemble_operators(const SimplicialMesh &mesh) {
  const int n = mesh.nv();
  std::vector<Eigen::Triplet<double>> tm, tk;
  tm.reserve(9 * mesh.nt());
  tk.reserve(9 * mesh.nt());

  for (int t = 0; t < mesh.nt(); ++t) {
    const auto &tr = mesh.tris[t];
    const Vec2 &a = mesh.xy[tr[0]], &b = mesh.xy[tr[1]], &c = mesh.xy[tr[2]];
    const double area = signed_area(a, b, c);
    if (!(area > 0.0))
      throw StructuralError("assemble_operators: degenerate element " + std::to_string(t));

    // Gradients of the barycentric shape functions.
    const double bx[3] = {b.y - c.y, c.y - a.y, a.y - b.y};
    const double by[3] = {c.x - b.x, a.x - c.x, b.x - a.x};

    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
        const double kij = (bx[i] * bx[j] + by[i] * by[j]) / (4.0 * area);
        tm.emplace_back(tr[i], tr[j], mij);
        tk.emplace_back(tr[i], tr[j], kij);
      }
    }
  }

  P1Operators ops;
  ops.mass.resize(n, n);
  ops.stiffness.resize(n, n);
  ops.mass.setFromTriplets(tm.begin(), tm.end());
  ops.stiffness.setFromTriplets(tk.begin(), tk.end());
  return ops;
}

Eigen::VectorXd source_load_vector(const SimplicialMesh &mesh, const Problem &prob, double t) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.nv());
  for (int e = 0; e < mesh.nt(); ++e) {
    const auto &tr = mesh.tris[e];
    const Vec2 &a = mesh.xy[tr[0]], &b = mesh.xy[tr[1]], &c = mesh.xy[tr[2]];
    const double area = mesh.area(e);
    for (const QuadPoint &q : kQuad6) {
      const Vec2 p = q.b0 * a + q.b1 * b + q.b2 * c;
      const double f = prob.source(p, t) * q.w * area;
      load[tr[0]] += f * q.b0;
      load[tr[1]] += f * q.b1;
      load[tr[2]] += f * q.b2;
    }
  }
  return load;
}

namespace {

double l2_error_tri(const Vec2 &a, const Vec2 &b, const Vec2 &c, double ua, double ub, double uc,
                    const Problem &prob, double t, int subdivisions) {
  if (subdivisions > 0) {
    const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    const double uab = 0.5 * (ua + ub), ubc = 0.5 * (ub + uc), uca = 0.5 * (uc + ua);
    const int s = subdivisions - 1;
    return l2_error_tri(a, ab, ca, ua, uab, uca, prob, t, s) +
           l2_error_tri(ab, b, bc, uab, ub, ubc, prob, t, s) +
           l2_error_tri(ca, bc, c, uca, ubc, uc, prob, t, s) +
           l2_error_tri(ab, bc, ca, uab, ubc, uca, prob, t, s);
  }
  const double area = signed_area(a, b, c);
  double acc = 0.0;
  for (const QuadPoint &q : kQuad6) {
    const Vec2 p = q.b0 * a + q.b1 * b + q.b2 * c;
    const double uh = q.b0 * ua + q.b1 * ub + q.b2 * uc;
    const double e = prob.value(p, t) - uh;
    acc += q.w * e * e;
  }
  return acc * area;
}

}  // namespace

double l2_error(const SimplicialMesh &mesh, const ScalarField &u, const Problem &prob, double t,
                int subdivisions) {
  double acc = 0.0;
  for (int e = 0; e < mesh.nt(); ++e) {
    const auto &tr = mesh.tris[e];
    acc += l2_error_tri(mesh.xy[tr[0]], mesh.xy[tr[1]], mesh.xy[tr[2]], u[tr[0]], u[tr[1]],
                        u[tr[2]], prob, t, subdivisions);
  }
  return std::sqrt(acc);
}

double error_L1L2(const std::vector<IntervalEndState> &ends, const Problem &prob) {
  double total = 0.0;
  for (const IntervalEndState &s : ends)
    total += s.weight * l2_error(*s.mesh, s.u, prob, s.t_end);
  return total;
}

struct TransientSolver::System {
  SparseMat full;  // a0 M + K, kept for the Dirichlet right-hand-side correction
  SparseMat constrained;
  Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
};

TransientSolver::TransientSolver(const SimplicialMesh &mesh, const Problem &prob)
    : mesh_(mesh), prob_(prob), ops_(assemble_operators(mesh)) {
  for (int v = 0; v < mesh.nv(); ++v)
    if (mesh.on_boundary(v)) dirichlet_.push_back(v);
}

TransientSolver::~TransientSolver() = default;

TransientSolver::System &TransientSolver::system_for(double a0) {
  auto it = systems_.find(a0);
  if (it != systems_.end()) return *it->second;

  auto sys = std::make_unique<System>();
  sys->full = a0 * ops_.mass + ops_.stiffness;
  std::vector<bool> is_dir(mesh_.nv(), false);
  for (int v : dirichlet_) is_dir[v] = true;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sys->full.nonZeros());
  for (int k = 0; k < sys->full.outerSize(); ++k)
    for (SparseMat::InnerIterator itA(sys->full, k); itA; ++itA)
      if (!is_dir[itA.row()] && !is_dir[itA.col()])
        trips.emplace_back(itA.row(), itA.col(), itA.value());
  for (int v : dirichlet_) trips.emplace_back(v, v, 1.0);

  sys->constrained.resize(mesh_.nv(), mesh_.nv());
  sys->constrained.setFromTriplets(trips.begin(), trips.end());
  sys->cg.setTolerance(1e-10);
  sys->cg.setMaxIterations(static_cast<int>(10.0 * std::sqrt(double(mesh_.nv()))) + 20);
  sys->cg.compute(sys->constrained);

  auto [pos, inserted] = systems_.emplace(a0, std::move(sys));
  return *pos->second;
}

void TransientSolver::step(TimeState &state, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  const int n = mesh_.nv();
  const double t_next = state.t + dt;

  Eigen::Map<const Eigen::VectorXd> u_now(state.u_now.data(), n);
  double a0;
  Eigen::VectorXd rhs(n);
  if (!state.has_history()) {
    a0 = 1.0 / dt;
    rhs = ops_.mass * (a0 * u_now);
  } else {
    // Variable-step BDF2; reduces to [3/2, -2, 1/2]/dt at equal steps.
    const double tau = dt, tau_p = state.dt_last;
    a0 = 1.0 / tau + 1.0 / (tau + tau_p);
    const double a1 = (tau + tau_p) / (tau * tau_p);
    const double a2 = -tau / (tau_p * (tau + tau_p));
    Eigen::Map<const Eigen::VectorXd> u_prev(state.u_prev.data(), n);
    rhs = ops_.mass * (a1 * u_now + a2 * u_prev);
  }
  rhs -= source_load_vector(mesh_, prob_, t_next);

  // Dirichlet elimination with symmetric right-hand-side correction.
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int v : dirichlet_) g[v] = prob_.value(mesh_.xy[v], t_next);
  System &sys = system_for(a0);
  rhs -= sys.full * g;
  for (int v : dirichlet_) rhs[v] = g[v];

  Eigen::VectorXd guess = u_now;
  for (int v : dirichlet_) guess[v] = g[v];
  Eigen::VectorXd u = sys.cg.solveWithGuess(rhs, guess);
  cg_iterations_ += sys.cg.iterations();
  if (sys.cg.info() != Eigen::Success)
    throw SolverError("conjugate gradient stalled at t = " + fmt_g17(t_next) +
                      ": residual " + fmt_g17(sys.cg.error()) + " after " +
                      std::to_string(sys.cg.iterations()) + " iterations");

  state.u_prevprev = std::move(state.u_prev);
  state.u_prev = std::move(state.u_now);
  state.u_now.assign(u.data(), u.data() + n);
  state.dt_last = dt;
  state.t = t_next;
}

IntervalSolution solve_interval(const SimplicialMesh &mesh, TimeState initial, double t1, int n_T,
                                const Problem &prob, const RecoveryOperator *recovery) {
  if (n_T < 1) throw InvalidArgument("solve_interval: n_T >= 1");
  if (static_cast<int>(initial.u_now.size()) != mesh.nv())
    throw InvalidArgument("solve_interval: initial state does not match the mesh");

  const double t0 = initial.t;
  const double dt = (t1 - t0) / n_T;
  if (!(dt > 0.0)) throw InvalidArgument("solve_interval: empty interval");

  RecoveryOperator local_recovery;
  if (!recovery) {
    local_recovery = RecoveryOperator::build(mesh);
    recovery = &local_recovery;
  }

  TransientSolver solver(mesh, prob);
  IntervalSolution out;
  out.hessian = make_interval_hessian(mesh);
  accumulate(out.hessian, recovery->hessian(initial.u_now), dt);

  TimeState state = std::move(initial);
  for (int k = 0; k < n_T; ++k) {
    if (k == 0 && !state.has_history()) {
      // Cold start: BDF1 over dt/10, then variable-step BDF2 to the grid.
      solver.step(state, dt / 10.0);
      solver.step(state, dt - dt / 10.0);
    } else {
      solver.step(state, dt);
    }
    accumulate(out.hessian, recovery->hessian(state.u_now), dt);
  }

  out.state = std::move(state);
  out.cg_iterations = solver.total_cg_iterations();
  return out;
}

}  // namespace amat
