#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fem.h"
#include "transfer.h"
#include "support.h"

using namespace amat;

namespace {

// d_t(u) - lap(u) + f = 0 with u = t^3 (x + y): linear in space (P1-exact),
// cubic in time, so only the time discretization error remains.
struct CubicTimeProblem final : Problem {
  double value(const Vec2 &p, double t) const override { return t * t * t * (p.x + p.y); }
  double source(const Vec2 &p, double t) const override { return -3.0 * t * t * (p.x + p.y); }
  Rect domain() const override { return {0, 1, 0, 1}; }
  double final_time() const override { return 1.0; }
};

struct ConstantProblem final : Problem {
  double value(const Vec2 &, double) const override { return 0.75; }
  double source(const Vec2 &, double) const override { return 0.0; }
  Rect domain() const override { return {0, 1, 0, 1}; }
  double final_time() const override { return 1.0; }
};

// Time-independent boundary data in [-1, 1], zero source.
struct FrozenFrontProblem final : Problem {
  double value(const Vec2 &p, double) const override { return std::tanh(p.x / 0.2); }
  double source(const Vec2 &, double) const override { return 0.0; }
  Rect domain() const override { return {-1, 1, -1, 1}; }
  double final_time() const override { return 1.0; }
};

}  // namespace

TEST_CASE("manufactured source agrees with finite differences") {
  MmsProblem prob;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ux(-1.9, 1.9), uy(-0.95, 0.95), ut(0.05, 0.95);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const Vec2 p{ux(rng), uy(rng)};
    const double t = ut(rng);
    const double dt_fd =
        (prob.value(p, t + h) - prob.value(p, t - h)) / (2.0 * h);
    const double lap_fd = (prob.value({p.x + h, p.y}, t) + prob.value({p.x - h, p.y}, t) +
                           prob.value({p.x, p.y + h}, t) + prob.value({p.x, p.y - h}, t) -
                           4.0 * prob.value(p, t)) /
                          (h * h);
    const double f_fd = lap_fd - dt_fd;
    // 1e-6 relative where the derivatives are sizeable; the 2e-5 floor is
    // the cancellation noise of the second difference at step 1e-5.
    const double tol = 1e-6 * (std::abs(lap_fd) + std::abs(dt_fd)) + 2e-5;
    CHECK(std::abs(prob.source(p, t) - f_fd) <= tol);
  }

  // Front line and far-field limits.
  for (double y : {-0.7, 0.0, 0.4}) {
    const double x_front = 0.3 + std::sin(5.0 * y) / 2.0;
    CHECK(prob.value({x_front, y}, 0.3) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(prob.value({1.9, 0.0}, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("assembly identities") {
  const SimplicialMesh unit = structured_rect_mesh(1, 1, Rect{0, 1, 0, 1});
  const P1Operators ops = assemble_operators(unit);
  CHECK(Eigen::VectorXd(ops.mass * Eigen::VectorXd::Ones(4)).sum() == doctest::Approx(1.0));

  const SimplicialMesh m = testing::perturbed_rect_mesh(7, 5, Rect{0, 2, 0, 1}, 0.2, 6);
  const P1Operators mo = assemble_operators(m);

  // Mass row sums are the lumped vertex areas.
  Eigen::VectorXd rows = mo.mass * Eigen::VectorXd::Ones(m.nv());
  for (int v = 0; v < m.nv(); ++v) {
    double lumped = 0.0;
    for (int k = m.v2t_offset[v]; k < m.v2t_offset[v + 1]; ++k)
      lumped += m.area(m.v2t_data[k]) / 3.0;
    CHECK(rows[v] == doctest::Approx(lumped).epsilon(1e-12));
  }

  // Stiffness annihilates constants and measures the Dirichlet energy of x.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.nv());
  CHECK((mo.stiffness * ones).lpNorm<Eigen::Infinity>() < 1e-12);
  Eigen::VectorXd xs(m.nv());
  for (int v = 0; v < m.nv(); ++v) xs[v] = m.xy[v].x;
  CHECK(xs.dot(mo.stiffness * xs) == doctest::Approx(2.0).epsilon(1e-12));  // area of the rect
}

TEST_CASE("steady state is preserved") {
  const SimplicialMesh m = structured_rect_mesh(6, 6, Rect{0, 1, 0, 1});
  ConstantProblem prob;
  TransientSolver solver(m, prob);
  TimeState state;
  state.u_now = ScalarField(m.nv(), 0.75);
  state.t = 0.0;
  for (int k = 0; k < 5; ++k) solver.step(state, 0.05);
  for (double v : state.u_now) CHECK(v == doctest::Approx(0.75).epsilon(1e-11));
}

TEST_CASE("temporal order 2 on the space-exact problem") {
  const SimplicialMesh m = structured_rect_mesh(4, 4, Rect{0, 1, 0, 1});
  CubicTimeProblem prob;

  std::vector<double> errs, dts;
  for (const int steps : {4, 8, 16, 32, 64}) {
    TimeState init;
    init.t = 0.0;
    init.u_now = ScalarField(m.nv(), 0.0);  // u(., 0) = 0
    const IntervalSolution sol = solve_interval(m, std::move(init), 1.0, steps, prob);
    errs.push_back(l2_error(m, sol.state.u_now, prob, 1.0));
    dts.push_back(1.0 / steps);
  }
  // Least-squares slope of log(err) vs log(dt).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < errs.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = errs.size();
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("interval solve: accumulation of a steady hessian") {
  const SimplicialMesh m = structured_rect_mesh(12, 12, Rect{0, 1, 0, 1});
  ConstantProblem prob;  // u stays 0.75, |H| = 0
  TimeState init;
  init.t = 0.0;
  init.u_now = ScalarField(m.nv(), 0.75);
  const IntervalSolution sol = solve_interval(m, std::move(init), 0.5, 5, prob);
  CHECK(sol.hessian.steps_seen == 6);
  for (const Sym2 &s : sol.hessian.accumulated) CHECK(s.frobenius() < 1e-8);
  CHECK(sol.state.t == doctest::Approx(0.5));
}

TEST_CASE("maximum principle sanity") {
  const SimplicialMesh m = testing::perturbed_rect_mesh(16, 16, Rect{-1, 1, -1, 1}, 0.15, 3);
  FrozenFrontProblem prob;
  TransientSolver solver(m, prob);
  TimeState state;
  state.t = 0.0;
  state.u_now = sample_vertices(m, [&](const Vec2 &p) { return prob.value(p, 0.0); });
  for (int k = 0; k < 10; ++k) solver.step(state, 0.01);
  for (double v : state.u_now) {
    CHECK(v >= -1.1);
    CHECK(v <= 1.1);
  }
}

TEST_CASE("interval error norm") {
  // Exact linear reference sampled on mesh vertices: zero error.
  const SimplicialMesh m = testing::perturbed_rect_mesh(5, 4, Rect{0, 1, 0, 1}, 0.2, 8);
  CubicTimeProblem prob;
  std::vector<IntervalEndState> ends;
  ends.push_back({&m, sample_vertices(m, [&](const Vec2 &p) { return prob.value(p, 0.5); }), 0.5, 0.5});
  CHECK(error_L1L2(ends, prob) == doctest::Approx(0.0).epsilon(1e-13));

  // Constant offset eps over a unit-area domain for total time T: eps * T.
  const double eps = 0.01, T = 1.0;
  std::vector<IntervalEndState> offs;
  ScalarField u1 = sample_vertices(m, [&](const Vec2 &p) { return prob.value(p, 0.25) + eps; });
  ScalarField u2 = sample_vertices(m, [&](const Vec2 &p) { return prob.value(p, 1.0) + eps; });
  offs.push_back({&m, u1, 0.25, T / 2});
  offs.push_back({&m, u2, 1.0, T / 2});
  CHECK(error_L1L2(offs, prob) == doctest::Approx(eps * T).epsilon(1e-12));
}

TEST_CASE("error quadrature self-consistency") {
  const SimplicialMesh m = structured_rect_mesh(48, 24, Rect{-2, 2, -1, 1});
  MmsProblem prob;
  prob.delta = 0.1;
  const ScalarField u = sample_vertices(m, [&](const Vec2 &p) { return prob.value(p, 0.4); });
  const double e0 = l2_error(m, u, prob, 0.4);
  const double e1 = l2_error(m, u, prob, 0.4, 1);
  CHECK(std::abs(e1 - e0) / e0 < 0.005);
}

TEST_CASE("cg failure reporting") {
  const SimplicialMesh m = structured_rect_mesh(3, 3, Rect{0, 1, 0, 1});
  ConstantProblem prob;
  TransientSolver solver(m, prob);
  TimeState state;
  state.t = 0.0;
  state.u_now = ScalarField(m.nv(), 0.75);
  CHECK_THROWS_AS(solver.step(state, -1.0), InvalidArgument);
}
