#include "fixed_point.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.h"
#include "transfer.h"

namespace amat {

void FixedPointConfig::validate() const {
  if (n_I < 1 || n_T < 1 || n_fp < 1) throw InvalidArgument("config: n_I, n_T, n_fp >= 1");
  if (!(N_avg > 0.0)) throw InvalidArgument("config: N_avg > 0");
  if (p < 1) throw InvalidArgument("config: p >= 1");
  if (init_nx < 1 || init_ny < 1) throw InvalidArgument("config: initial grid needs nx, ny >= 1");
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, int k, int i) {
  std::uint64_t h = seed ^ (0x9e3779b97f4a7c15ull + (std::uint64_t(k) << 32) + std::uint64_t(i));
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

void write_solution_dump(const std::string &path, const ScalarField &u) {
  std::ofstream out(path);
  out << u.size() << "\n";
  for (double v : u) out << fmt_g17(v) << "\n";
}

}  // namespace

FixedPointResult global_fixed_point(const FixedPointConfig &config, const Problem &prob) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);

  const Rect rect = prob.domain();
  const double T = prob.final_time();
  const double diam = rect.diameter();
  const double h_min = config.h_min > 0.0 ? config.h_min : diam / 1e5;
  const double h_max = config.h_max > 0.0 ? config.h_max : diam / 2.0;

  const double interval_len = T / config.n_I;
  const double dt = T / (config.n_I * static_cast<double>(config.n_T));

  auto initial = std::make_shared<const SimplicialMesh>(
      structured_rect_mesh(config.init_nx, config.init_ny, rect));
  std::vector<std::shared_ptr<const SimplicialMesh>> meshes(config.n_I, initial);

  FixedPointResult result;

  for (int k = 1; k <= config.n_fp; ++k) {
    std::vector<IntervalHessian> hessians;
    hessians.reserve(config.n_I);
    std::vector<IntervalEndState> ends;
    std::vector<double> partial_errors(config.n_I, 0.0);

    double n_st = 0.0;
    for (const auto &m : meshes) n_st += m->nv();
    n_st *= config.n_T;

    // Sequential sweep over the sub-intervals; each consumes the previous
    // interval's end state.
    const SimplicialMesh *prev_mesh = nullptr;
    ScalarField carry_now, carry_prev;
    double carry_dt_last = 0.0;

    for (int i = 0; i < config.n_I; ++i) {
      const SimplicialMesh &mesh = *meshes[i];
      const double t0 = i * interval_len;
      const double t1 = (i + 1) * interval_len;

      TimeState init;
      init.t = t0;
      if (i == 0) {
        init.u_now = sample_vertices(mesh, [&](const Vec2 &x) { return prob.value(x, 0.0); });
        init.dt_last = 0.0;  // cold start
      } else if (config.cancel_transfer_error) {
        init.u_now = sample_vertices(mesh, [&](const Vec2 &x) { return prob.value(x, t0); });
        init.u_prev = sample_vertices(mesh, [&](const Vec2 &x) { return prob.value(x, t0 - dt); });
        init.dt_last = dt;
      } else {
        init.u_now = interpolate_field(*prev_mesh, carry_now, mesh);
        init.u_prev = interpolate_field(*prev_mesh, carry_prev, mesh);
        init.dt_last = carry_dt_last;
      }

      IntervalSolution sol = solve_interval(mesh, std::move(init), t1, config.n_T, prob);

      partial_errors[i] = interval_len * l2_error(mesh, sol.state.u_now, prob, t1);
      ends.push_back({&mesh, sol.state.u_now, t1, interval_len});
      hessians.push_back(std::move(sol.hessian));

      if (config.dump_solutions && !config.out_dir.empty())
        write_solution_dump(config.out_dir + "/solution_fp" + std::to_string(k) + "_interval" +
                                std::to_string(i + 1) + ".txt",
                            sol.state.u_now);

      carry_now = std::move(sol.state.u_now);
      carry_prev = std::move(sol.state.u_prev);
      carry_dt_last = sol.state.dt_last;
      prev_mesh = &mesh;
    }

    double e_total = 0.0;
    for (double e : partial_errors) e_total += e;

    NormalizationParams np;
    np.N_avg = config.N_avg;
    np.n_I = config.n_I;
    np.n_T = config.n_T;
    np.p = config.p;
    np.h_min = h_min;
    np.h_max = h_max;
    np.beta = config.beta;
    np.seed = mix_seed(config.seed, k, 0);
    std::vector<MetricField> metrics = interval_metrics(hessians, np);

    for (int i = 0; i < config.n_I; ++i) {
      result.records.push_back({k, i + 1, meshes[i]->nv(), complexity(metrics[i]), n_st,
                                partial_errors[i]});
    }
    result.E_per_iter.push_back(e_total);
    result.N_st_per_iter.push_back(n_st);

    if (!config.out_dir.empty() && config.write_svg_snapshots) {
      for (int i = 0; i < config.n_I; ++i)
        write_svg(*meshes[i], config.out_dir + "/mesh_fp" + std::to_string(k) + "_interval" +
                                  std::to_string(i + 1) + ".svg");
    }
    if (!config.out_dir.empty() && k == config.n_fp)
      write_interval_metrics(config.out_dir, metrics, np);

    if (k < config.n_fp) {
      for (int i = 0; i < config.n_I; ++i) {
        AdaptParams ap = config.adapt;
        ap.seed = mix_seed(config.seed, k, i + 1);
        AdaptResult adapted = adapt_mesh(*meshes[i], metrics[i], ap);
        meshes[i] = std::make_shared<const SimplicialMesh>(std::move(adapted.mesh));
      }
    }
  }

  for (const auto &m : meshes) result.final_vertex_counts.push_back(m->nv());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!config.out_dir.empty()) {
    std::ofstream csv(config.out_dir + "/run.csv");
    csv << records_csv(result.records);

    std::ofstream man(config.out_dir + "/run_manifest.txt");
    man << "n_I=" << config.n_I << "\nn_T=" << config.n_T << "\nN_avg=" << fmt_g17(config.N_avg)
        << "\nn_fp=" << config.n_fp << "\np=" << config.p << "\nbeta=" << fmt_g17(config.beta)
        << "\nh_min=" << fmt_g17(h_min) << "\nh_max=" << fmt_g17(h_max)
        << "\ncancel_transfer_error=" << (config.cancel_transfer_error ? 1 : 0)
        << "\nseed=" << config.seed << "\ninit_nx=" << config.init_nx
        << "\ninit_ny=" << config.init_ny << "\nwall_seconds=" << result.wall_seconds << "\n";
    for (size_t i = 0; i < result.final_vertex_counts.size(); ++i)
      man << "vertices_interval_" << i + 1 << "=" << result.final_vertex_counts[i] << "\n";
    for (size_t k = 0; k < result.E_per_iter.size(); ++k)
      man << "E_iter_" << k + 1 << "=" << fmt_g17(result.E_per_iter[k]) << "\n";
  }
  return result;
}

std::string records_csv(const std::vector<StudyRecord> &records) {
  std::ostringstream out;
  out << "fp_iter,interval,N_v,complexity,N_st,E\n";
  for (const StudyRecord &r : records) {
    out << r.fp_iter << "," << r.interval << "," << r.vertex_count << "," << fmt_g17(r.complexity)
        << "," << fmt_g17(r.N_st) << "," << fmt_g17(r.E_partial) << "\n";
  }
  return out.str();
}

double fit_rate(const std::vector<double> &n_st, const std::vector<double> &errors) {
  if (n_st.size() != errors.size() || n_st.size() < 3)
    throw InvalidArgument("fit_rate: need at least 3 sweep points");
  const size_t n = n_st.size();
  const size_t keep = (2 * n + 2) / 3;  // ceil(2n/3)
  const size_t first = n - keep;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = first; i < n; ++i) {
    const double x = std::log(n_st[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(keep);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -2.0 * slope;
}

StudyResult convergence_study(StudyKind kind, const FixedPointConfig &base,
                              const std::vector<double> &sweep, const Problem &prob) {
  if (sweep.size() < 3) throw InvalidArgument("convergence_study: need at least 3 sweep points");

  StudyResult out;
  out.sweep = sweep;
  std::vector<double> n_st, errors;

  std::ostringstream csv;
  csv << "sweep,n_I,n_T,N_avg,N_st,E\n";
  for (double value : sweep) {
    FixedPointConfig cfg = base;
    if (kind == StudyKind::FixedIntervals) {
      cfg.N_avg = value;
    } else {
      const int total_steps = base.n_I * base.n_T;
      cfg.n_I = static_cast<int>(value);
      if (cfg.n_I < 1 || total_steps % cfg.n_I != 0)
        throw InvalidArgument("convergence_study: n_I must divide the total step count");
      cfg.n_T = total_steps / cfg.n_I;
    }
    if (!base.out_dir.empty()) cfg.out_dir = base.out_dir + "/sweep_" + fmt_g17(value);

    FixedPointResult run = global_fixed_point(cfg, prob);
    n_st.push_back(run.N_st());
    errors.push_back(run.E());
    csv << fmt_g17(value) << "," << cfg.n_I << "," << cfg.n_T << "," << fmt_g17(cfg.N_avg) << ","
        << fmt_g17(run.N_st()) << "," << fmt_g17(run.E()) << "\n";
    out.runs.push_back(std::move(run));
  }

  out.fitted_rate = fit_rate(n_st, errors);
  out.summary_csv = csv.str();
  return out;
}

}  // namespace amat
