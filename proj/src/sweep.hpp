#ifndef WDRO_SWEEP_HPP
#define WDRO_SWEEP_HPP

#include <string>

#include "outer.hpp"

namespace wdro {

struct SweepRecord {
  double k = 0.0;
  Vec w;
  double norm = 0.0;
  double value = 0.0;
  double dist = 0.0;  // to the minimal-norm set
  int iterations = 0;
  double wall_ms = 0.0;
  double bound_at_min_norm = 0.0;  // shift upper bound at a minimal-norm point
  bool ok = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  double min_norm = 0.0;
  bool value_monotone_ok = true;  // u(k, w_k) non-increasing within 1e-7
};

struct SweepOptions {
  SolveOptions solve;
  bool warm_start_chain = true;  // sequential, warm-started; false -> per-k parallel
  int threads = 1;
};

SweepResult sweep_k(const UtilityFn& u, const DiscreteMeasure& P, double p,
                    std::span<const double> k_schedule, double x0, const ConstraintSet& D,
                    const SweepOptions& opts = {});

struct ConvergenceReport {
  struct K0Entry {
    double delta = 0.0;
    double k0 = 0.0;
    bool found = false;
  };
  std::vector<K0Entry> k0_table;  // smallest scheduled k with |w_k| - min_norm < delta
  int non_monotone_excursions = 0;  // count of dist increases along the schedule
  double final_dist = 0.0;
  double min_norm = 0.0;
  bool value_monotone_ok = true;
  // per-k divergence summary: value against the analytic shift bound
  std::vector<double> values;
  std::vector<double> bounds;
  std::vector<double> ks;
};

ConvergenceReport convergence_report(const SweepResult& sweep,
                                     std::span<const double> delta_grid);

}  // namespace wdro

#endif
