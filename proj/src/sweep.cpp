#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace wdro {

namespace {

double dist_to_set(const Vec& w, const std::vector<Vec>& targets) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : targets) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) d2 += (w[j] - t[j]) * (w[j] - t[j]);
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

}  // namespace

SweepResult sweep_k(const UtilityFn& u, const DiscreteMeasure& P, double p,
                    std::span<const double> k_schedule, double x0, const ConstraintSet& D,
                    const SweepOptions& opts) {
  require(!k_schedule.empty(), Errc::invalid_argument, "sweep: empty schedule");
  for (std::size_t i = 0; i < k_schedule.size(); ++i) {
    require(k_schedule[i] > 0.0, Errc::invalid_argument, "sweep: radii must be positive");
    if (i > 0)
      require(k_schedule[i] > k_schedule[i - 1], Errc::invalid_argument,
              "sweep: schedule must be strictly increasing");
  }

  const std::vector<Vec> targets = D.min_norm_points();
  SweepResult out;
  out.min_norm = D.min_norm();
  out.records.resize(k_schedule.size());

  auto run_one = [&](std::size_t idx, const std::optional<Vec>& warm) {
    SweepRecord& rec = out.records[idx];
    rec.k = k_schedule[idx];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      AmbiguitySpec spec(P, p, rec.k);
      SolveOptions so = opts.solve;
      so.warm_start = warm;
      const OuterSolution sol = maximize(u, spec, x0, D, so);
      rec.w = sol.w_k;
      rec.norm = norm2(sol.w_k);
      rec.value = sol.value;
      rec.dist = dist_to_set(sol.w_k, targets);
      rec.iterations = sol.iterations;
      // At a zero minimal-norm point the shift bound degenerates to U(x0).
      rec.bound_at_min_norm = norm2(targets.front()) > 0.0
                                  ? shift_upper_bound(u, P, x0, targets.front(), rec.k)
                                  : u.value(x0);
      rec.ok = true;
    } catch (const Error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  if (opts.warm_start_chain || opts.threads <= 1) {
    std::optional<Vec> warm = opts.solve.warm_start;
    for (std::size_t i = 0; i < k_schedule.size(); ++i) {
      run_one(i, opts.warm_start_chain ? warm : opts.solve.warm_start);
      if (out.records[i].ok && opts.warm_start_chain) warm = out.records[i].w;
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const int nthreads = std::max(1, opts.threads);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < k_schedule.size(); i = next.fetch_add(1))
          run_one(i, opts.solve.warm_start);
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i + 1 < out.records.size(); ++i) {
    if (!out.records[i].ok || !out.records[i + 1].ok) continue;
    if (out.records[i + 1].value > out.records[i].value + 1e-7) out.value_monotone_ok = false;
  }
  return out;
}

ConvergenceReport convergence_report(const SweepResult& sweep,
                                     std::span<const double> delta_grid) {
  require(!sweep.records.empty(), Errc::invalid_argument, "convergence_report: empty sweep");
  ConvergenceReport rep;
  rep.min_norm = sweep.min_norm;
  rep.value_monotone_ok = sweep.value_monotone_ok;

  for (double delta : delta_grid) {
    ConvergenceReport::K0Entry e;
    e.delta = delta;
    for (const auto& rec : sweep.records) {
      if (!rec.ok) continue;
      if (rec.norm - sweep.min_norm < delta) {
        e.k0 = rec.k;
        e.found = true;
        break;
      }
    }
    rep.k0_table.push_back(e);
  }

  const SweepRecord* prev = nullptr;
  for (const auto& rec : sweep.records) {
    if (!rec.ok) continue;
    if (prev && rec.dist > prev->dist + 1e-9) ++rep.non_monotone_excursions;
    prev = &rec;
    rep.final_dist = rec.dist;
    rep.values.push_back(rec.value);
    rep.bounds.push_back(rec.bound_at_min_norm);
    rep.ks.push_back(rec.k);
  }
  return rep;
}

}  // namespace wdro
