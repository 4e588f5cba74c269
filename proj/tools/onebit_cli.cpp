// Command-line frontend for the one-bit sparse recovery toolkit.
//
// Subcommands:
//   solve         one penalty on a correlation vector (or ensemble) from file
//   sweep         full benchmark sweep from a config file -> CSV files
//   cv            cross-validated parameter selection for one instance
//   timing        wall-clock comparison: passive vs mcp walk vs naive mcp
//   oracle-check  run the solver-vs-oracle property suites
//
// Exit codes: 0 success, 2 configuration/input error, 3 internal
// certification failure (a solver or property suite contradicted itself).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "onebit/onebit.hpp"

namespace {

std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw onebit::ConfigError("cannot open vector file: " + path);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw onebit::ConfigError("malformed number in vector file: " + path);
  if (v.empty()) throw onebit::ConfigError("vector file is empty: " + path);
  return v;
}

// Ensemble file: header "m n", then one line per measurement holding y_i
// (+1 or -1) followed by the n entries of u_i.
onebit::MeasurementEnsemble read_ensemble_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw onebit::ConfigError("cannot open ensemble file: " + path);
  std::size_t m = 0, n = 0;
  if (!(in >> m >> n) || m == 0 || n == 0)
    throw onebit::ConfigError("ensemble file must start with positive 'm n': " + path);
  onebit::MeasurementEnsemble ens;
  ens.m = m;
  ens.n = n;
  ens.u.resize(m * n);
  ens.y.resize(m);
  ens.x_true.assign(n, 0.0);
  ens.noise.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(in >> ens.y[i]) || (ens.y[i] != 1.0 && ens.y[i] != -1.0))
      throw onebit::ConfigError("ensemble row " + std::to_string(i) + ": y must be +1 or -1");
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> ens.u[i * n + j]))
        throw onebit::ConfigError("ensemble row " + std::to_string(i) + ": truncated u entries");
  }
  return ens;
}

int run_solve(const std::string& v_path, const std::string& ens_path,
              const std::string& method_name, double lambda, double b, std::size_t n1,
              double tau) {
  std::vector<double> v;
  if (!v_path.empty()) {
    v = read_vector_file(v_path);
  } else {
    v = onebit::correlation(read_ensemble_file(ens_path));
  }
  const auto method = onebit::parse_method(method_name);
  if (!method) throw onebit::ConfigError("unknown method: " + method_name);

  onebit::SolverConfig cfg;
  cfg.tau = tau;
  onebit::DualSolution sol;
  switch (*method) {
    case onebit::Method::passive:
      sol = onebit::solve_passive(v, lambda, cfg);
      break;
    case onebit::Method::mcp:
      sol = onebit::solve_mcp(v, lambda, b, cfg);
      break;
    case onebit::Method::l0:
      sol = onebit::solve_l0(v, lambda, cfg);
      break;
    case onebit::Method::sorted_l1:
      sol = onebit::solve_sorted_l1(v, lambda, onebit::sorted_l1_top_weights(v.size(), n1),
                                    cfg);
      break;
  }

  std::size_t nnz = 0;
  for (double xi : sol.x)
    if (xi != 0.0) ++nnz;
  std::cout << "status " << onebit::to_string(sol.status) << '\n'
            << "mu " << onebit::detail::format_number(sol.mu) << '\n'
            << "gap " << onebit::detail::format_number(sol.gap) << '\n'
            << "nnz " << nnz << '\n';
  for (std::size_t j = 0; j < sol.x.size(); ++j)
    if (sol.x[j] != 0.0)
      std::cout << "x " << j << ' ' << onebit::detail::format_number(sol.x[j]) << '\n';
  return sol.status == onebit::SolveStatus::internal_error ? 3 : 0;
}

int run_sweep_cmd(const std::string& config_path) {
  const onebit::ExperimentConfig cfg = onebit::parse_config_file(config_path);
  const onebit::SweepResult res = onebit::run_sweep(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const auto trials_path = std::filesystem::path(cfg.output_dir) / "trials.csv";
  const auto agg_path = std::filesystem::path(cfg.output_dir) / "aggregate.csv";
  {
    std::ofstream out(trials_path);
    if (!out) throw onebit::ConfigError("cannot write " + trials_path.string());
    onebit::write_trial_csv(res, out);
  }
  {
    std::ofstream out(agg_path);
    if (!out) throw onebit::ConfigError("cannot write " + agg_path.string());
    onebit::write_aggregate_csv(res, out);
  }
  std::cout << "wrote " << res.rows.size() << " trial rows to " << trials_path.string()
            << '\n'
            << "wrote " << res.aggregates.size() << " aggregate rows to "
            << agg_path.string() << '\n';
  return 0;
}

int run_cv_cmd(const std::string& config_path, std::size_t sweep_index, std::size_t trial) {
  const onebit::ExperimentConfig cfg = onebit::parse_config_file(config_path);
  if (sweep_index >= cfg.sweep_size())
    throw onebit::ConfigError("sweep index out of range for this config");
  if (trial >= cfg.trials) throw onebit::ConfigError("trial index out of range");

  const std::size_t m = cfg.m[cfg.sweep_var == "m" ? sweep_index : 0];
  const std::size_t k = cfg.k[cfg.sweep_var == "k" ? sweep_index : 0];
  const double s_n = cfg.s_n[cfg.sweep_var == "s_n" ? sweep_index : 0];
  const std::uint64_t trial_root =
      onebit::derive_seed(onebit::derive_seed(cfg.base_seed, sweep_index), trial + 1);
  const auto x_true =
      onebit::generate_signal({cfg.n, k, onebit::derive_seed(trial_root, 0)});
  const onebit::NoiseModel noise{s_n, cfg.flip_ratio};
  const auto ens = onebit::sense(x_true, m, noise, onebit::derive_seed(trial_root, 1));

  const auto grids = onebit::detail::make_grids(cfg);
  std::cout << "method,lambda,b,n1,consistency\n";
  for (const onebit::Method method : cfg.methods) {
    const auto sel = onebit::cross_validate(ens, grids.for_method(method), cfg.folds,
                                            onebit::derive_seed(trial_root, 2));
    std::cout << onebit::to_string(method) << ','
              << onebit::detail::format_number(sel.point.lambda) << ','
              << onebit::detail::format_number(sel.point.b) << ',' << sel.point.n1 << ','
              << onebit::detail::format_number(sel.score) << '\n';
  }
  return 0;
}

int run_timing_cmd(const std::string& config_path) {
  onebit::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = onebit::parse_config_file(config_path);
  const double lambda = cfg.mcp_lambda.empty() ? 0.1 : cfg.mcp_lambda.front();
  const double b = cfg.mcp_b.empty() ? 3.0 : cfg.mcp_b.front();
  const auto rows =
      onebit::run_timing(cfg.n, cfg.m.front(), lambda, b, cfg.trials, cfg.base_seed);
  onebit::write_timing_csv(rows, std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle-check: seeded random instances, fast solvers vs reference oracles.

struct CheckInstance {
  std::vector<double> v;
  double lambda = 0.0;
  double b = 0.0;
  std::size_t n1 = 0;
};

CheckInstance make_instance(std::uint64_t seed) {
  onebit::RandomStream s(seed);
  CheckInstance inst;
  const std::size_t n = 1 + static_cast<std::size_t>(s.next_below(8));
  const double sigma = std::exp(std::log(0.03) +
                                s.next_unit() * (std::log(3.0) - std::log(0.03)));
  inst.v.resize(n);
  for (double& vi : inst.v) vi = sigma * s.next_normal();
  inst.lambda = std::pow(10.0, -3.0 + 3.0 * s.next_unit());
  const double bs[3] = {1.5, 3.0, 6.0};
  inst.b = bs[s.next_below(3)];
  inst.n1 = 1 + static_cast<std::size_t>(s.next_below(n));
  return inst;
}

int run_oracle_check(std::size_t instances, std::uint64_t seed) {
  using namespace onebit;
  std::size_t failures = 0;
  const auto fail = [&](const std::string& what, std::size_t t) {
    ++failures;
    std::cerr << "oracle-check FAIL (instance " << t << "): " << what << '\n';
  };

  for (std::size_t t = 0; t < instances; ++t) {
    const CheckInstance inst = make_instance(derive_seed(seed, t));
    const auto& v = inst.v;

    // mcp walk vs bisection, naive, and the root-solve budget
    const Penalty pm = Penalty::mcp(inst.lambda, inst.b);
    const DualSolution mcp_fast = solve_mcp(v, inst.lambda, inst.b);
    const DualSolution mcp_orc = dual_bisection(pm, v);
    if (std::abs(primal_value(pm, v, mcp_fast.x) - primal_value(pm, v, mcp_orc.x)) > 1e-8)
      fail("mcp objective differs from bisection oracle", t);
    if (mcp_fast.root_solves > 1) fail("mcp used more than one root solve", t);
    const DualSolution mcp_ref = mcp_naive(v, inst.lambda, inst.b);
    if (std::abs(mcp_ref.mu - mcp_fast.mu) > 1e-8) fail("naive mcp mu differs", t);

    // l0 walk vs bisection and exact enumeration
    const Penalty pl = Penalty::l0(inst.lambda);
    const DualSolution l0_fast = solve_l0(v, inst.lambda);
    const DualSolution l0_orc = dual_bisection(pl, v);
    if (std::abs(primal_value(pl, v, l0_fast.x) - primal_value(pl, v, l0_orc.x)) > 1e-8)
      fail("l0 objective differs from bisection oracle", t);
    const EnumerationResult l0_enum = l0_support_enumeration(v, inst.lambda);
    if (std::abs(primal_value(pl, v, l0_fast.x) - l0_enum.value) > 1e-10)
      fail("l0 objective differs from support enumeration", t);

    // homogeneous solvers: certification and the homogeneity identity
    // f(t) - <t, v> = -||t||^2 at the scale-1 proximal point
    for (int which = 0; which < 2; ++which) {
      const Penalty ph = which == 0
                             ? Penalty::l1(inst.lambda)
                             : Penalty::sorted_l1(inst.lambda,
                                                  sorted_l1_weights(v.size(), inst.n1));
      const DualSolution sol = solve_homogeneous(ph, v);
      if (sol.status != SolveStatus::certified && sol.status != SolveStatus::zero_solution)
        fail("homogeneous solve not certified", t);
      if (std::abs(sol.gap) > 1e-8) fail("homogeneous gap too large", t);
      const auto tstar = proximal_point(ph, v, 1.0).x;
      const double lhs = evaluate(ph, tstar) - dot(v, tstar);
      if (std::abs(lhs + squared_norm(tstar)) > 1e-10)
        fail("homogeneity identity violated at the scale-1 prox", t);
    }

    // dual subgradient monotonicity on a thinned subset
    if (t % 20 == 0) {
      const double hi = 2.0 * std::sqrt(squared_norm(v)) + 2.0;
      const Penalty penalties[4] = {Penalty::l1(inst.lambda), pm, pl,
                                    Penalty::sorted_l1(inst.lambda,
                                                       sorted_l1_weights(v.size(), inst.n1))};
      for (const Penalty& p : penalties) {
        double prev = -std::numeric_limits<double>::infinity();
        for (int g = 0; g <= 50; ++g) {
          const double mu = hi * static_cast<double>(g) / 50.0;
          const double sub = dual_value(p, v, mu).subgradient;
          if (sub < prev - 1e-10) fail("dual subgradient not monotone", t);
          prev = sub;
        }
      }
    }
  }

  if (failures > 0) {
    std::cerr << "oracle-check: " << failures << " failure(s) over " << instances
              << " instances\n";
    return 3;
  }
  std::cout << "oracle-check: all properties held over " << instances << " instances\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-bit sparse recovery toolkit"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "solve one penalty on a stored instance");
  std::string v_path, ens_path, method_name = "mcp";
  double lambda = 0.1, b = 3.0, tau = 0.0;
  std::size_t n1 = 10;
  auto* vopt = solve->add_option("--v", v_path, "file with the correlation vector entries");
  auto* eopt = solve->add_option("--ensemble", ens_path, "file with 'm n' then y_i and u_i rows");
  vopt->excludes(eopt);
  solve->add_option("--method", method_name, "passive | mcp | l0 | sorted_l1");
  solve->add_option("--lambda", lambda, "penalty strength");
  solve->add_option("--b", b, "mcp concavity scale");
  solve->add_option("--n1", n1, "sorted-l1 sparsity guess: top n1 ranks nearly unshrunk");
  solve->add_option("--tau", tau, "strong-convexity weight (homogeneous penalties only)");

  auto* sweep = app.add_subcommand("sweep", "run a benchmark sweep from a config file");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "experiment config file")->required();

  auto* cv = app.add_subcommand("cv", "cross-validated selection for one instance");
  std::string cv_config;
  std::size_t cv_sweep_index = 0, cv_trial = 0;
  cv->add_option("--config", cv_config, "experiment config file")->required();
  cv->add_option("--sweep-index", cv_sweep_index, "index into the sweep values");
  cv->add_option("--trial", cv_trial, "trial index");

  auto* timing = app.add_subcommand("timing", "wall-clock comparison of the mcp solvers");
  std::string timing_config;
  timing->add_option("--config", timing_config, "config file (n, m, trials, base_seed, mcp.*)");

  auto* oracle = app.add_subcommand("oracle-check", "run the solver-vs-oracle property suites");
  std::size_t instances = 200;
  std::uint64_t oc_seed = 20240901;
  oracle->add_option("--instances", instances, "number of random instances");
  oracle->add_option("--seed", oc_seed, "base seed for the property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) {
      if (v_path.empty() && ens_path.empty())
        throw onebit::ConfigError("solve: need --v or --ensemble");
      return run_solve(v_path, ens_path, method_name, lambda, b, n1, tau);
    }
    if (sweep->parsed()) return run_sweep_cmd(sweep_config);
    if (cv->parsed()) return run_cv_cmd(cv_config, cv_sweep_index, cv_trial);
    if (timing->parsed()) return run_timing_cmd(timing_config);
    if (oracle->parsed()) return run_oracle_check(instances, oc_seed);
  } catch (const onebit::CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << '\n';
    return 3;
  } catch (const onebit::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
