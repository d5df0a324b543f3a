#ifndef AMAT_FIXED_POINT_H
#define AMAT_FIXED_POINT_H

#include <memory>
#include <string>
#include <vector>

#include "adapt.h"
#include "fem.h"
#include "transient_metric.h"

namespace amat {

struct FixedPointConfig {
  int n_I = 4;
  int n_T = 20;
  double N_avg = 2000.0;
  int n_fp = 5;
  int p = 2;
  double beta = 1.8;
  double h_min = 0.0, h_max = 0.0;  // <= 0: domain diameter / 1e5 and / 2
  bool cancel_transfer_error = false;
  std::uint64_t seed = 1;
  int init_nx = 32, init_ny = 16;
  std::string out_dir;  // empty: nothing written to disk
  bool write_svg_snapshots = false;
  bool dump_solutions = false;
  AdaptParams adapt;

  void validate() const;
};

struct StudyRecord {
  int fp_iter = 0;
  int interval = 0;  // 1-based
  int vertex_count = 0;
  double complexity = 0.0;  // of the interval metric
  double N_st = 0.0;        // n_T * total vertices of this iteration
  double E_partial = 0.0;   // this interval's contribution to E
};

struct FixedPointResult {
  std::vector<StudyRecord> records;
  std::vector<double> E_per_iter;
  std::vector<double> N_st_per_iter;
  std::vector<int> final_vertex_counts;  // per interval, last iteration
  double wall_seconds = 0.0;

  double E() const { return E_per_iter.back(); }
  double N_st() const { return N_st_per_iter.back(); }
};

// The global transient fixed-point loop: solve all sub-intervals, build the
// interval metrics, adapt each interval mesh, repeat n_fp times. The first
// iteration runs every interval on the initial uniform mesh.
FixedPointResult global_fixed_point(const FixedPointConfig &config, const Problem &prob);

// CSV with header fp_iter,interval,N_v,complexity,N_st,E; byte-stable for
// a given config and seed.
std::string records_csv(const std::vector<StudyRecord> &records);

enum class StudyKind {
  FixedIntervals,  // sweep N_avg at fixed n_I, n_T
  FixedDensity,    // sweep n_I at fixed N_avg, keeping n_I * n_T constant
};

struct StudyResult {
  std::vector<double> sweep;
  std::vector<FixedPointResult> runs;
  double fitted_rate = 0.0;  // r in E ~ N_st^(-r/2), last 2/3 of the points
  std::string summary_csv;
};

// Runs one fixed-point computation per sweep value and fits the log-log
// convergence rate. Needs at least 3 sweep points.
StudyResult convergence_study(StudyKind kind, const FixedPointConfig &base,
                              const std::vector<double> &sweep, const Problem &prob);

// Least-squares slope of log(E) against log(N_st) over the last
// ceil(2n/3) points, reported as r = -2 * slope.
double fit_rate(const std::vector<double> &n_st, const std::vector<double> &errors);

}  // namespace amat

#endif
