#pragma once

// Experiment driver: for every sweep value and trial, generate a fresh
// signal and measurement ensemble from per-trial derived seeds, run each
// configured method under ideal and/or cross-validated parameter selection,
// and collect per-trial metric rows plus aggregates. Also the wall-clock
// benchmark used for the fast-vs-naive comparison.
//
// Determinism contract: identical config and base seed produce bit-identical
// CSV output except for the time columns. Row order is (sweep value, method,
// mode, trial) regardless of how trials are executed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "onebit/config.hpp"
#include "onebit/metrics.hpp"
#include "onebit/oracles.hpp"
#include "onebit/select.hpp"
#include "onebit/signal.hpp"
#include "onebit/solver.hpp"

namespace onebit {

struct TrialRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  Method method = Method::passive;
  ParamMode mode = ParamMode::ideal;  // ideal or cv, never both
  std::size_t trial = 0;
  RecoveryMetrics metrics;
  double mu = 0.0;
  SolveStatus status = SolveStatus::certified;
  double time_ms = 0.0;  // wall clock of the final solve at the chosen parameters
  double lambda = 0.0;
  double b = 0.0;
  std::size_t n1 = 0;
};

struct AggregateRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  Method method = Method::passive;
  ParamMode mode = ParamMode::ideal;
  double mean_snr_db = 0.0, sd_snr_db = 0.0;
  double mean_ae = 0.0, mean_inr = 0.0, mean_fnr = 0.0, mean_fpr = 0.0;
  double mean_time_ms = 0.0, sd_time_ms = 0.0;
};

struct SweepResult {
  std::vector<TrialRow> rows;
  std::vector<AggregateRow> aggregates;
};

namespace detail {

/// Shortest decimal form that round-trips a double; integers print bare.
inline std::string format_number(double x) {
  char buf[40];
  if (x == std::floor(x) && std::abs(x) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  if (std::strtod(buf, nullptr) == x) {
    // try shorter representations for readability, longest first wins speed
    for (int prec = 1; prec <= 16; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
      if (std::strtod(shorter, nullptr) == x) return shorter;
    }
  }
  return buf;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0,
                         std::chrono::steady_clock::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

struct GridSet {
  std::vector<GridPoint> passive, mcp, l0, sorted_l1;
  const std::vector<GridPoint>& for_method(Method m) const {
    switch (m) {
      case Method::passive: return passive;
      case Method::mcp: return mcp;
      case Method::l0: return l0;
      case Method::sorted_l1: return sorted_l1;
    }
    throw std::logic_error("for_method: unknown method");
  }
};

inline GridSet make_grids(const ExperimentConfig& cfg) {
  const bool k_sweep = cfg.sweep_var == "k";
  const auto lam = default_lambda_grid();
  GridSet g;
  g.passive = build_grid(Method::passive,
                         cfg.passive_lambda.empty() ? lam : cfg.passive_lambda, {}, {});
  g.mcp = build_grid(Method::mcp, cfg.mcp_lambda.empty() ? lam : cfg.mcp_lambda,
                     cfg.mcp_b.empty() ? default_b_grid() : cfg.mcp_b, {});
  g.l0 = build_grid(Method::l0, cfg.l0_lambda.empty() ? lam : cfg.l0_lambda, {}, {});
  g.sorted_l1 = build_grid(Method::sorted_l1,
                           cfg.sorted_l1_lambda.empty() ? lam : cfg.sorted_l1_lambda, {},
                           cfg.sorted_l1_n1.empty() ? default_n1_grid(k_sweep)
                                                    : cfg.sorted_l1_n1);
  return g;
}

}  // namespace detail

/// Execute the configured sweep. Trials use seeds derived from
/// (base_seed, sweep index, trial index), so any subset can be reproduced
/// independently of execution order.
inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  SweepResult result;
  const detail::GridSet grids = detail::make_grids(cfg);
  const bool do_ideal = cfg.param_mode != ParamMode::cv;
  const bool do_cv = cfg.param_mode != ParamMode::ideal;

  for (std::size_t si = 0; si < cfg.sweep_size(); ++si) {
    const std::size_t m = cfg.m[cfg.sweep_var == "m" ? si : 0];
    const std::size_t k = cfg.k[cfg.sweep_var == "k" ? si : 0];
    const double s_n = cfg.s_n[cfg.sweep_var == "s_n" ? si : 0];
    const double sweep_value = cfg.sweep_var == "k"
                                   ? static_cast<double>(k)
                                   : (cfg.sweep_var == "s_n" ? s_n : static_cast<double>(m));

    // rows grouped per (method, mode) to emit in deterministic order
    std::vector<std::vector<TrialRow>> groups;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
      for (int mode = 0; mode < 2; ++mode) groups.emplace_back();

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t trial_root =
          derive_seed(derive_seed(cfg.base_seed, si), trial + 1);
      const SignalSpec spec{cfg.n, k, derive_seed(trial_root, 0)};
      const std::vector<double> x_true = generate_signal(spec);
      const NoiseModel noise{s_n, cfg.flip_ratio};
      const MeasurementEnsemble ens = sense(x_true, m, noise, derive_seed(trial_root, 1));
      const std::vector<double> v = correlation(ens);

      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const Method method = cfg.methods[mi];
        const auto& grid = grids.for_method(method);
        for (int mode = 0; mode < 2; ++mode) {
          if (mode == 0 && !do_ideal) continue;
          if (mode == 1 && !do_cv) continue;
          Selection sel;
          if (mode == 0) {
            sel = ideal_select(ens, x_true, grid);
          } else {
            sel = cross_validate(ens, grid, cfg.folds, derive_seed(trial_root, 2));
          }
          // Re-solve at the chosen parameters for the reported wall clock;
          // the result is identical to sel.solution by determinism.
          const auto t0 = std::chrono::steady_clock::now();
          const DualSolution sol = solve_grid_point(sel.point, v);
          const auto t1 = std::chrono::steady_clock::now();

          TrialRow row;
          row.sweep_var = cfg.sweep_var;
          row.sweep_value = sweep_value;
          row.method = method;
          row.mode = mode == 0 ? ParamMode::ideal : ParamMode::cv;
          row.trial = trial;
          row.metrics = compute_metrics(x_true, sol.x, ens);
          row.mu = sol.mu;
          row.status = sol.status;
          row.time_ms = detail::elapsed_ms(t0, t1);
          row.lambda = sel.point.lambda;
          row.b = sel.point.b;
          row.n1 = sel.point.n1;
          groups[mi * 2 + static_cast<std::size_t>(mode)].push_back(std::move(row));
        }
      }
    }

    for (auto& group : groups) {
      if (group.empty()) continue;
      AggregateRow agg;
      agg.sweep_var = group.front().sweep_var;
      agg.sweep_value = group.front().sweep_value;
      agg.method = group.front().method;
      agg.mode = group.front().mode;
      const double cnt = static_cast<double>(group.size());
      double snr_sum = 0, time_sum = 0;
      for (const TrialRow& r : group) {
        snr_sum += r.metrics.snr_db;
        agg.mean_ae += r.metrics.ae;
        agg.mean_inr += r.metrics.inr;
        agg.mean_fnr += r.metrics.fnr;
        agg.mean_fpr += r.metrics.fpr;
        time_sum += r.time_ms;
      }
      agg.mean_snr_db = snr_sum / cnt;
      agg.mean_ae /= cnt;
      agg.mean_inr /= cnt;
      agg.mean_fnr /= cnt;
      agg.mean_fpr /= cnt;
      agg.mean_time_ms = time_sum / cnt;
      if (group.size() > 1) {
        double snr_var = 0, time_var = 0;
        for (const TrialRow& r : group) {
          snr_var += (r.metrics.snr_db - agg.mean_snr_db) * (r.metrics.snr_db - agg.mean_snr_db);
          time_var += (r.time_ms - agg.mean_time_ms) * (r.time_ms - agg.mean_time_ms);
        }
        agg.sd_snr_db = std::sqrt(snr_var / (cnt - 1.0));
        agg.sd_time_ms = std::sqrt(time_var / (cnt - 1.0));
      }
      result.aggregates.push_back(std::move(agg));
      for (TrialRow& r : group) result.rows.push_back(std::move(r));
    }
  }
  return result;
}

inline void write_trial_csv(const SweepResult& res, std::ostream& out) {
  out << "sweep_var,sweep_value,method,param_mode,trial,snr_db,ae,inr,fnr,fpr,"
         "mu,status,time_ms,lambda,b,n1\n";
  for (const TrialRow& r : res.rows) {
    out << r.sweep_var << ',' << detail::format_number(r.sweep_value) << ','
        << to_string(r.method) << ',' << to_string(r.mode) << ',' << r.trial << ','
        << detail::format_number(r.metrics.snr_db) << ','
        << detail::format_number(r.metrics.ae) << ','
        << detail::format_number(r.metrics.inr) << ','
        << detail::format_number(r.metrics.fnr) << ','
        << detail::format_number(r.metrics.fpr) << ','
        << detail::format_number(r.mu) << ',' << to_string(r.status) << ','
        << detail::format_number(r.time_ms) << ','
        << detail::format_number(r.lambda) << ',' << detail::format_number(r.b) << ','
        << r.n1 << '\n';
  }
}

inline void write_aggregate_csv(const SweepResult& res, std::ostream& out) {
  out << "sweep_var,sweep_value,method,param_mode,mean_snr_db,sd_snr_db,mean_ae,"
         "mean_inr,mean_fnr,mean_fpr,mean_time_ms,sd_time_ms\n";
  for (const AggregateRow& a : res.aggregates) {
    out << a.sweep_var << ',' << detail::format_number(a.sweep_value) << ','
        << to_string(a.method) << ',' << to_string(a.mode) << ','
        << detail::format_number(a.mean_snr_db) << ','
        << detail::format_number(a.sd_snr_db) << ','
        << detail::format_number(a.mean_ae) << ',' << detail::format_number(a.mean_inr)
        << ',' << detail::format_number(a.mean_fnr) << ','
        << detail::format_number(a.mean_fpr) << ','
        << detail::format_number(a.mean_time_ms) << ','
        << detail::format_number(a.sd_time_ms) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Wall-clock benchmark (fast walk vs passive baseline vs naive re-solver).

struct TimingRow {
  std::string method;  // "passive", "mcp", "mcp_naive"
  double mean_ms = 0.0;
  double sd_ms = 0.0;
};

namespace detail {

/// Median wall-clock of reps >= 20 executions (one warm-up run first).
template <typename Fn>
double median_time_ms(Fn&& fn, std::size_t reps = 20) {
  reps = std::max<std::size_t>(reps, 20);
  fn();  // warm caches
  std::vector<double> samples(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples[r] = elapsed_ms(t0, t1);
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = reps / 2;
  return (reps % 2 == 1) ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

}  // namespace detail

/// Per-trial timing of the full recovery step (correlation + solve), matching
/// how solver cost is experienced end to end. Each measurement is the median
/// of `reps` warm repetitions; rows report mean and standard deviation over
/// trials for passive, the mcp walk, and the naive per-interval mcp solver.
inline std::vector<TimingRow> run_timing(std::size_t n, std::size_t m, double lambda, double b,
                                         std::size_t trials, std::uint64_t base_seed,
                                         std::size_t reps = 20) {
  if (trials == 0) throw std::invalid_argument("run_timing: trials must be positive");
  std::vector<std::vector<double>> samples(3);
  volatile double sink = 0.0;  // defeat dead-code elimination
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t root = derive_seed(derive_seed(base_seed, 7701), trial);
    const SignalSpec spec{n, std::min<std::size_t>(15, n), derive_seed(root, 0)};
    const auto x_true = generate_signal(spec);
    const NoiseModel noise{10.0, 0.1};
    const MeasurementEnsemble ens = sense(x_true, m, noise, derive_seed(root, 1));

    samples[0].push_back(detail::median_time_ms(
        [&] {
          const auto v = correlation(ens);
          sink = solve_passive(v, lambda).mu;
        },
        reps));
    samples[1].push_back(detail::median_time_ms(
        [&] {
          const auto v = correlation(ens);
          sink = solve_mcp(v, lambda, b).mu;
        },
        reps));
    samples[2].push_back(detail::median_time_ms(
        [&] {
          const auto v = correlation(ens);
          sink = mcp_naive(v, lambda, b).mu;
        },
        reps));
  }
  (void)sink;
  const char* names[3] = {"passive", "mcp", "mcp_naive"};
  std::vector<TimingRow> rows;
  for (std::size_t k = 0; k < 3; ++k) {
    TimingRow row;
    row.method = names[k];
    const double cnt = static_cast<double>(samples[k].size());
    for (double s : samples[k]) row.mean_ms += s;
    row.mean_ms /= cnt;
    if (samples[k].size() > 1) {
      double var = 0.0;
      for (double s : samples[k]) var += (s - row.mean_ms) * (s - row.mean_ms);
      row.sd_ms = std::sqrt(var / (cnt - 1.0));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_timing_csv(const std::vector<TimingRow>& rows, std::ostream& out) {
  out << "method,mean_ms,sd_ms\n";
  for (const TimingRow& r : rows)
    out << r.method << ',' << detail::format_number(r.mean_ms) << ','
        << detail::format_number(r.sd_ms) << '\n';
}

}  // namespace onebit
