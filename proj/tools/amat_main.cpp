// Command-line front end: mesh inspection, one-shot metric adaptation,
// transient solves, the global fixed-point loop and convergence studies.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "adapt.h"
#include "errors.h"
#include "fem.h"
#include "fixed_point.h"
#include "metric_field.h"
#include "transfer.h"

namespace {

using namespace amat;

struct MmsFlags {
  double c = 1.0;
  double delta = 0.02;
  double t_final = 1.0;

  MmsProblem problem() const {
    MmsProblem p;
    p.c = c;
    p.delta = delta;
    p.T = t_final;
    return p;
  }
};

void add_mms_flags(CLI::App *cmd, MmsFlags &mms) {
  cmd->add_option("--speed", mms.c, "front speed");
  cmd->add_option("--delta", mms.delta, "front steepness");
  cmd->add_option("--t-final", mms.t_final, "final time");
}

void add_fixed_point_flags(CLI::App *cmd, FixedPointConfig &cfg) {
  cmd->add_option("--n-i", cfg.n_I, "time sub-intervals");
  cmd->add_option("--n-t", cfg.n_T, "solver steps per sub-interval");
  cmd->add_option("--n-avg", cfg.N_avg, "target average spatial complexity");
  cmd->add_option("--n-fp", cfg.n_fp, "fixed-point iterations");
  cmd->add_option("--p", cfg.p, "Lp exponent of the adaptation norm");
  cmd->add_option("--beta", cfg.beta, "gradation bound");
  cmd->add_option("--h-min", cfg.h_min, "minimum target size (0: auto)");
  cmd->add_option("--h-max", cfg.h_max, "maximum target size (0: auto)");
  cmd->add_flag("--cancel-transfer-error", cfg.cancel_transfer_error,
                "reinterpolate the exact solution at interval starts");
  cmd->add_option("--seed", cfg.seed, "seed for all randomized orderings");
  cmd->add_option("--nx", cfg.init_nx, "initial grid: cells in x");
  cmd->add_option("--ny", cfg.init_ny, "initial grid: cells in y");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_flag("--svg", cfg.write_svg_snapshots, "write per-interval mesh snapshots");
  cmd->add_flag("--dump-solutions", cfg.dump_solutions, "write per-interval nodal solutions");
  cmd->add_option("--max-passes", cfg.adapt.max_passes, "adaptation pass budget");
  cmd->add_option("--quality-floor", cfg.adapt.quality_floor, "adaptation quality floor");
}

int cmd_mesh_info(const std::string &mesh_path, const std::string &metric_path) {
  const SimplicialMesh mesh = load_mesh(mesh_path);
  const Rect b = mesh.bounds();
  std::printf("vertices   %d\n", mesh.nv());
  std::printf("triangles  %d\n", mesh.nt());
  std::printf("boundary   %zu edges\n", mesh.boundary_edges.size());
  std::printf("bounds     [%g, %g] x [%g, %g]\n", b.x0, b.x1, b.y0, b.y1);

  if (!metric_path.empty()) {
    const MetricField field = load_metric_field(mesh, metric_path);
    std::printf("complexity %.6g\n", complexity(field));
    const EdgeHistogram h = unit_edge_histogram(mesh, field);
    std::printf("metric edge lengths (%d edges):\n", h.total);
    for (size_t k = 0; k < h.counts.size(); ++k) {
      if (h.counts[k] == 0) continue;
      std::printf("  [%4.2f, %4.2f)  %d\n", k * h.bin_width, (k + 1) * h.bin_width, h.counts[k]);
    }
    if (h.overflow) std::printf("  longer        %d\n", h.overflow);
    std::printf("in quasi-unit range: %.1f%%\n",
                100.0 * edge_length_fraction(mesh, field, 1.0 / std::sqrt(2.0), std::sqrt(2.0)));
    double qmin = 1e300, qsum = 0.0;
    for (int t = 0; t < mesh.nt(); ++t) {
      const double q = quality_metric(mesh, t, field);
      qmin = std::min(qmin, q);
      qsum += q;
    }
    std::printf("quality    min %.3f  mean %.3f\n", qmin, qsum / mesh.nt());
  }
  return 0;
}

int cmd_adapt(const std::string &mesh_path, const std::string &metric_path,
              const std::string &out_path, const AdaptParams &params, const std::string &svg) {
  const SimplicialMesh mesh = load_mesh(mesh_path);
  const MetricField field = load_metric_field(mesh, metric_path);
  AdaptResult res = adapt_mesh(mesh, field, params);
  save_mesh(res.mesh, out_path);
  if (!svg.empty()) write_svg(res.mesh, svg);
  std::printf("%d -> %d vertices in %d passes (%ld splits, %ld collapses, %ld flips)\n", mesh.nv(),
              res.mesh.nv(), res.passes, res.splits, res.collapses, res.flips);
  if (!res.reached_fixed_point) std::fprintf(stderr, "warning: pass budget exhausted\n");
  std::printf("in quasi-unit range: %.1f%%\n",
              100.0 * edge_length_fraction(res.mesh, field, 1.0 / std::sqrt(2.0), std::sqrt(2.0)));
  return 0;
}

int cmd_solve(FixedPointConfig cfg, const MmsFlags &mms) {
  cfg.n_fp = 1;  // plain transient run, no adaptation applied
  const MmsProblem prob = mms.problem();
  const FixedPointResult res = global_fixed_point(cfg, prob);
  std::printf("E    %.8e\nN_st %.0f\n", res.E(), res.N_st());
  return 0;
}

int cmd_fixed_point(const FixedPointConfig &cfg, const MmsFlags &mms) {
  const MmsProblem prob = mms.problem();
  const FixedPointResult res = global_fixed_point(cfg, prob);
  for (size_t k = 0; k < res.E_per_iter.size(); ++k)
    std::printf("fp %zu: E %.8e  N_st %.0f\n", k + 1, res.E_per_iter[k], res.N_st_per_iter[k]);
  if (cfg.out_dir.empty()) std::fputs(records_csv(res.records).c_str(), stdout);
  return 0;
}

int cmd_study(const std::string &kind, const std::vector<double> &sweep, FixedPointConfig cfg,
              const MmsFlags &mms) {
  StudyKind sk;
  if (kind == "fixed-ni")
    sk = StudyKind::FixedIntervals;
  else if (kind == "fixed-navg")
    sk = StudyKind::FixedDensity;
  else
    throw CLI::ValidationError("--kind must be fixed-ni or fixed-navg");

  const MmsProblem prob = mms.problem();
  const StudyResult res = convergence_study(sk, cfg, sweep, prob);
  std::fputs(res.summary_csv.c_str(), stdout);
  std::printf("fitted rate r = %.3f (E ~ N_st^(-r/2))\n", res.fitted_rate);
  if (!cfg.out_dir.empty()) {
    std::ofstream out(cfg.out_dir + "/study_summary.csv");
    out << res.summary_csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"2D anisotropic mesh adaptation for unsteady problems"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");

  std::string mesh_path, metric_path, out_path, svg_path, study_kind;
  std::vector<double> sweep;
  FixedPointConfig cfg;
  MmsFlags mms;
  AdaptParams aparams;

  auto *info = app.add_subcommand("mesh-info", "print mesh statistics");
  info->add_option("--mesh", mesh_path, "mesh file")->required();
  info->add_option("--metric", metric_path, "metric file for histograms");

  auto *adapt = app.add_subcommand("adapt", "adapt a mesh to a metric file");
  adapt->add_option("--mesh", mesh_path, "input mesh")->required();
  adapt->add_option("--metric", metric_path, "metric file")->required();
  adapt->add_option("--out", out_path, "output mesh")->required();
  adapt->add_option("--svg", svg_path, "write an SVG snapshot");
  adapt->add_option("--seed", aparams.seed, "operation ordering seed");
  adapt->add_option("--max-passes", aparams.max_passes, "pass budget");
  adapt->add_option("--quality-floor", aparams.quality_floor, "quality floor");

  auto *solve = app.add_subcommand("solve", "single transient run without adaptation");
  add_fixed_point_flags(solve, cfg);
  add_mms_flags(solve, mms);

  auto *fp = app.add_subcommand("fixed-point", "global transient fixed-point loop");
  add_fixed_point_flags(fp, cfg);
  add_mms_flags(fp, mms);

  auto *study = app.add_subcommand("study", "convergence study sweeps");
  study->add_option("--kind", study_kind, "fixed-ni | fixed-navg")->required();
  study->add_option("--sweep", sweep, "sweep values")->required()->delimiter(',');
  add_fixed_point_flags(study, cfg);
  add_mms_flags(study, mms);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (info->parsed()) return cmd_mesh_info(mesh_path, metric_path);
    if (adapt->parsed()) return cmd_adapt(mesh_path, metric_path, out_path, aparams, svg_path);
    if (solve->parsed()) return cmd_solve(cfg, mms);
    if (fp->parsed()) return cmd_fixed_point(cfg, mms);
    if (study->parsed()) return cmd_study(study_kind, sweep, cfg, mms);
  } catch (const InvalidArgument &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
