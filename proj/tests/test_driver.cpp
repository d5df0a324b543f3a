#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixed_point.h"

using namespace amat;

namespace {

FixedPointConfig small_config() {
  FixedPointConfig cfg;
  cfg.n_I = 2;
  cfg.n_T = 4;
  cfg.N_avg = 400.0;
  cfg.n_fp = 2;
  cfg.init_nx = 16;
  cfg.init_ny = 8;
  cfg.seed = 7;
  return cfg;
}

MmsProblem smooth_problem() {
  MmsProblem prob;
  prob.delta = 0.25;  // mild front keeps the small runs meaningful
  return prob;
}

}  // namespace

TEST_CASE("accounting: N_st equals n_T times the vertex totals") {
  const FixedPointConfig cfg = small_config();
  const MmsProblem prob = smooth_problem();
  const FixedPointResult res = global_fixed_point(cfg, prob);

  REQUIRE(res.records.size() == static_cast<size_t>(cfg.n_fp * cfg.n_I));
  for (int k = 1; k <= cfg.n_fp; ++k) {
    long total = 0;
    for (const StudyRecord &r : res.records)
      if (r.fp_iter == k) total += r.vertex_count;
    for (const StudyRecord &r : res.records)
      if (r.fp_iter == k) CHECK(r.N_st == doctest::Approx(cfg.n_T * double(total)));
  }
  // First iteration runs on the initial uniform grid.
  const int init_nv = (cfg.init_nx + 1) * (cfg.init_ny + 1);
  for (const StudyRecord &r : res.records)
    if (r.fp_iter == 1) CHECK(r.vertex_count == init_nv);
}

TEST_CASE("reproducibility: identical config and seed give identical CSV") {
  const FixedPointConfig cfg = small_config();
  const MmsProblem prob = smooth_problem();
  const FixedPointResult a = global_fixed_point(cfg, prob);
  const FixedPointResult b = global_fixed_point(cfg, prob);
  CHECK(records_csv(a.records) == records_csv(b.records));

  FixedPointConfig other = cfg;
  other.seed = 8;
  const FixedPointResult c = global_fixed_point(other, prob);
  CHECK(records_csv(a.records) != records_csv(c.records));
}

TEST_CASE("csv schema") {
  std::vector<StudyRecord> rec{{1, 1, 100, 50.5, 800.0, 0.25}};
  const std::string csv = records_csv(rec);
  CHECK(csv.rfind("fp_iter,interval,N_v,complexity,N_st,E\n", 0) == 0);
  CHECK(csv.find("1,1,100,50.5,800,0.25\n") != std::string::npos);
}

TEST_CASE("single iteration equals a plain transient solve") {
  FixedPointConfig cfg = small_config();
  cfg.n_fp = 1;
  const MmsProblem prob = smooth_problem();
  const FixedPointResult res = global_fixed_point(cfg, prob);
  CHECK(res.E_per_iter.size() == 1);
  // All intervals ran on the initial grid.
  for (int v : res.final_vertex_counts) CHECK(v == (cfg.init_nx + 1) * (cfg.init_ny + 1));
}

TEST_CASE("adaptation reduces the error on the smooth front") {
  FixedPointConfig cfg = small_config();
  cfg.n_fp = 3;
  cfg.N_avg = 600.0;
  const MmsProblem prob = smooth_problem();
  const FixedPointResult res = global_fixed_point(cfg, prob);
  CHECK(res.E_per_iter.back() < res.E_per_iter.front());
}

TEST_CASE("run artifacts land in the output directory") {
  FixedPointConfig cfg = small_config();
  cfg.write_svg_snapshots = true;
  cfg.out_dir = (std::filesystem::temp_directory_path() / "amat_run_artifacts").string();
  std::filesystem::remove_all(cfg.out_dir);
  const MmsProblem prob = smooth_problem();
  global_fixed_point(cfg, prob);

  CHECK(std::filesystem::exists(cfg.out_dir + "/run.csv"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/run_manifest.txt"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/mesh_fp1_interval1.svg"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/mesh_fp2_interval2.svg"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/metric_interval_1.txt"));
  std::ifstream man(cfg.out_dir + "/run_manifest.txt");
  std::string text((std::istreambuf_iterator<char>(man)), std::istreambuf_iterator<char>());
  CHECK(text.find("seed=7") != std::string::npos);
  CHECK(text.find("vertices_interval_1=") != std::string::npos);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("rate fitting uses the tail points") {
  // Synthetic data: E = N^-1 for the first two points, then E = N^-1.5.
  std::vector<double> n{100, 200, 400, 800, 1600, 3200};
  std::vector<double> e;
  for (double v : n) e.push_back(std::pow(v, -1.5));
  e[0] = std::pow(n[0], -1.0);
  CHECK(fit_rate(n, e) == doctest::Approx(3.0).epsilon(1e-6));  // r = -2 * (-1.5)

  std::vector<double> too_few{1, 2};
  CHECK_THROWS_AS(fit_rate(too_few, too_few), InvalidArgument);
}

TEST_CASE("study: sweep bookkeeping and divisibility") {
  FixedPointConfig base = small_config();
  base.n_fp = 1;
  base.n_I = 2;
  base.n_T = 8;  // total 16 steps
  const MmsProblem prob = smooth_problem();

  const StudyResult res =
      convergence_study(StudyKind::FixedDensity, base, {2.0, 4.0, 8.0}, prob);
  REQUIRE(res.runs.size() == 3);
  CHECK(res.summary_csv.rfind("sweep,n_I,n_T,N_avg,N_st,E\n", 0) == 0);

  CHECK_THROWS_AS(convergence_study(StudyKind::FixedDensity, base, {2.0, 4.0, 5.0}, prob),
                  InvalidArgument);
  CHECK_THROWS_AS(convergence_study(StudyKind::FixedIntervals, base, {100.0, 200.0}, prob),
                  InvalidArgument);
}
