#pragma once

// Analytic solvers for the sphere-constrained sparse recovery problem
//
//     minimize  F(x) = f(x) - <v, x> + (tau/2)||x||^2   s.t.  ||x||^2 <= 1,
//
// where f is one of the penalties in penalty.hpp and v is the one-bit
// correlation vector. The Lagrangian L(x, mu) = F(x) + (mu/2)(||x||^2 - 1)
// is minimized in closed form by proximal_point at scale rho = tau + mu; a
// solution pair (x, mu) with ||x|| <= 1, mu >= 0, x a Lagrangian minimizer,
// and mu(||x||^2 - 1) = 0 is globally optimal (zero duality gap).
//
// Positive homogeneous penalties get the one-shot solver solve_homogeneous.
// mcp and l0 get breakpoint walks over the sorted magnitudes of v that locate
// the dual-optimal mu directly; solve_mcp performs at most one scalar
// norm-equation solve (counted in the returned solution). When the norm of
// the Lagrangian minimizer jumps across 1 at a breakpoint, no primal-dual
// pair satisfies complementary slackness; the solvers then report the
// dual-optimal mu with status dual_optimal_gap_nonzero and return the best
// feasible candidate assembled from the two supports adjacent to the jump.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onebit/penalty.hpp"

namespace onebit {

enum class SolveStatus { certified, dual_optimal_gap_nonzero, zero_solution, internal_error };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::certified: return "certified";
    case SolveStatus::dual_optimal_gap_nonzero: return "dual_optimal_gap_nonzero";
    case SolveStatus::zero_solution: return "zero_solution";
    case SolveStatus::internal_error: return "internal_error";
  }
  return "?";
}

struct SolverConfig {
  double tau = 0.0;        // strong-convexity weight in F
  double root_tol = 1e-12; // residual tolerance for the scalar norm equation
  double cert_tol = 1e-8;  // certification tolerance on gap / slackness
};

struct DualSolution {
  std::vector<double> x;
  double mu = 0.0;
  SolveStatus status = SolveStatus::internal_error;
  double gap = 0.0;     // F(x) - G(mu); ~0 when certified
  int root_solves = 0;  // scalar norm-equation solves performed
  bool tie = false;     // a breakpoint/threshold tie was hit on the way
};

/// Thrown when a path that guarantees certification produces a solution
/// failing its own certificate --- always a bug, never a data condition.
class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& what) : std::runtime_error(what) {}
};

inline double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// F(x) = f(x) - <v,x> + (tau/2)||x||^2.
inline double primal_value(const Penalty& p, std::span<const double> v,
                           std::span<const double> x, double tau = 0.0) {
  return evaluate(p, x) - dot(v, x) + 0.5 * tau * squared_norm(x);
}

/// L(x, mu) = F(x) + (mu/2)(||x||^2 - 1).
inline double lagrangian(const Penalty& p, std::span<const double> v,
                         std::span<const double> x, double mu, double tau = 0.0) {
  return primal_value(p, v, x, tau) + 0.5 * mu * (squared_norm(x) - 1.0);
}

struct DualPoint {
  double value = 0.0;            // G(mu) = min_x L(x, mu)
  std::vector<double> x;         // a Lagrangian minimizer at mu
  double subgradient = 0.0;      // (1 - ||x||^2)/2, a subgradient of -G
};

/// Evaluate the dual function via the proximal point at scale tau + mu.
/// At tau + mu = 0 the Lagrangian has no quadratic term: the minimum is 0
/// when the scale-1 proximal point is 0 (homogeneous f) or v = 0, and
/// -infinity otherwise.
inline DualPoint dual_value(const Penalty& p, std::span<const double> v, double mu,
                            const SolverConfig& cfg = {}) {
  if (!(mu >= 0.0)) throw std::invalid_argument("dual_value: mu must be >= 0");
  const double rho = cfg.tau + mu;
  DualPoint out;
  if (rho <= 0.0) {
    out.x.assign(v.size(), 0.0);
    bool bounded;
    if (p.positive_homogeneous()) {
      bounded = squared_norm(proximal_point(p, v, 1.0).x) == 0.0;
    } else {
      bounded = squared_norm(v) == 0.0;
    }
    if (bounded) {
      out.value = 0.0;
      out.subgradient = 0.5;
    } else {
      out.value = -std::numeric_limits<double>::infinity();
      out.subgradient = -std::numeric_limits<double>::infinity();
    }
    return out;
  }
  out.x = proximal_point(p, v, rho).x;
  out.value = lagrangian(p, v, out.x, mu, cfg.tau);
  out.subgradient = 0.5 * (1.0 - squared_norm(out.x));
  return out;
}

/// F(sol.x) - G(sol.mu): the duality gap certified against the dual bound.
inline double duality_gap(const Penalty& p, std::span<const double> v,
                          const DualSolution& sol, const SolverConfig& cfg = {}) {
  return primal_value(p, v, sol.x, cfg.tau) - dual_value(p, v, sol.mu, cfg).value;
}

/// Check the global-optimality certificate for (x, mu):
///   (a) feasibility  ||x||^2 <= 1 + cert_tol,
///   (b) x minimizes the Lagrangian: L(x, mu) <= G(mu) + cert_tol,
///   (c) complementary slackness |mu(||x||^2 - 1)| <= cert_tol.
/// All three -> certified. (a), (b) without (c) -> dual_optimal_gap_nonzero.
/// A violation of (a) or (b) means the solution is not even a Lagrangian
/// minimizer --- internal_error (solver bug surface).
inline SolveStatus certify(const Penalty& p, std::span<const double> v,
                           const DualSolution& sol, const SolverConfig& cfg = {}) {
  const double nx2 = squared_norm(sol.x);
  const bool a_ok = nx2 <= 1.0 + cfg.cert_tol;
  const DualPoint dp = dual_value(p, v, sol.mu, cfg);
  const double lag = lagrangian(p, v, sol.x, sol.mu, cfg.tau);
  const bool b_ok = lag <= dp.value + cfg.cert_tol;
  const bool c_ok = std::abs(sol.mu * (nx2 - 1.0)) <= cfg.cert_tol;
  if (!a_ok || !b_ok) return SolveStatus::internal_error;
  return c_ok ? SolveStatus::certified : SolveStatus::dual_optimal_gap_nonzero;
}

/// Solve d1/(mu - 1/b)^2 + d2/mu^2 = 1 for mu in the bracket (lo, hi], where
/// the left side is strictly decreasing. Safeguarded Newton (bisection
/// fallback), residual tolerance tol, at most 200 iterations.
inline double mcp_norm_root(double d1, double d2, double b, double lo, double hi,
                            double tol = 1e-12) {
  if (!(d1 >= 0.0) || !(d2 >= 0.0) || d1 + d2 <= 0.0)
    throw std::invalid_argument("mcp_norm_root: need d1, d2 >= 0 with d1 + d2 > 0");
  if (!(b > 0.0)) throw std::invalid_argument("mcp_norm_root: b must be positive");
  if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("mcp_norm_root: bad bracket");
  const double c = 1.0 / b;
  if (d1 > 0.0 && lo < c) throw std::invalid_argument("mcp_norm_root: lo must be >= 1/b when d1 > 0");

  const auto g = [&](double mu) -> double {
    double s = d2 / (mu * mu);
    if (d1 > 0.0) {
      const double e = mu - c;
      s += (e > 0.0) ? d1 / (e * e) : std::numeric_limits<double>::infinity();
    }
    return s - 1.0;
  };
  const auto dg = [&](double mu) -> double {
    double s = -2.0 * d2 / (mu * mu * mu);
    if (d1 > 0.0) {
      const double e = mu - c;
      s += -2.0 * d1 / (e * e * e);
    }
    return s;
  };

  // Closed forms when one term vanishes; still validated against the bracket.
  double root = -1.0;
  if (d1 == 0.0) root = std::sqrt(d2);
  if (d2 == 0.0) root = c + std::sqrt(d1);
  if (root >= 0.0) {
    if (!(root > lo - tol) || !(root <= hi * (1.0 + 1e-12) + tol))
      throw std::invalid_argument("mcp_norm_root: bracket does not contain the root");
    return root;
  }

  double glo = g(lo), ghi = g(hi);
  if (!(glo > 0.0) || !(ghi <= 0.0))
    throw std::invalid_argument("mcp_norm_root: bracket does not contain the root");
  if (ghi == 0.0) return hi;

  double a = lo, bnd = hi;   // g(a) > 0 >= g(bnd)
  double mu = hi;
  for (int it = 0; it < 200; ++it) {
    const double val = g(mu);
    if (std::abs(val) <= tol) return mu;
    if (val > 0.0)
      a = mu;
    else
      bnd = mu;
    double next = mu - val / dg(mu);
    if (!(next > a) || !(next < bnd)) next = 0.5 * (a + bnd);
    if (std::abs(next - mu) <= 1e-15 * std::max(1.0, mu)) return next;
    mu = next;
  }
  return mu;
}

namespace detail {

inline bool all_zero(std::span<const double> v) {
  for (double vi : v)
    if (vi != 0.0) return false;
  return true;
}

inline DualSolution zero_solution(std::size_t n) {
  DualSolution sol;
  sol.x.assign(n, 0.0);
  sol.mu = 0.0;
  sol.status = SolveStatus::zero_solution;
  sol.gap = 0.0;
  return sol;
}

/// Pick the F-minimizing feasible candidate at a jump breakpoint. Candidates
/// are tried in order (0, pre-jump support on the sphere, post-jump support
/// on the sphere) and replaced only on strict improvement, so the selection
/// is deterministic and shared by every solver that can hit a jump.
inline DualSolution jump_solution(const Penalty& p, std::span<const double> v,
                                  double mu_star,
                                  std::vector<std::vector<double>> candidates,
                                  const SolverConfig& cfg) {
  DualSolution sol;
  sol.mu = mu_star;
  sol.status = SolveStatus::dual_optimal_gap_nonzero;
  sol.tie = true;
  sol.x.assign(v.size(), 0.0);
  double best = primal_value(p, v, sol.x, cfg.tau);
  for (auto& cand : candidates) {
    if (cand.empty()) continue;
    const double val = primal_value(p, v, cand, cfg.tau);
    if (val < best) {
      best = val;
      sol.x = std::move(cand);
    }
  }
  sol.gap = best - dual_value(p, v, mu_star, cfg).value;
  return sol;
}

/// Magnitudes of v ascending, paired with original indices (stable on ties).
struct SortedMagnitudes {
  std::vector<double> mag;        // ascending
  std::vector<std::size_t> idx;   // original index of mag[i]
};

inline SortedMagnitudes sort_magnitudes(std::span<const double> v) {
  SortedMagnitudes s;
  const std::size_t n = v.size();
  s.idx = ascending_magnitude_order(v);
  s.mag.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.mag[i] = std::abs(v[s.idx[i]]);
  return s;
}

/// x supported on sorted positions [first, n) with x = v / mu there.
inline std::vector<double> scaled_suffix(std::span<const double> v, const SortedMagnitudes& s,
                                         std::size_t first, double mu) {
  std::vector<double> x(v.size(), 0.0);
  for (std::size_t i = first; i < s.idx.size(); ++i) {
    const std::size_t j = s.idx[i];
    x[j] = v[j] / mu;
  }
  return x;
}

inline void assert_certified(const Penalty& p, std::span<const double> v, DualSolution& sol,
                             const SolverConfig& cfg, const char* who) {
  sol.gap = duality_gap(p, v, sol, cfg);
  if (!(std::abs(sol.gap) <= cfg.cert_tol))
    throw CertificationError(std::string(who) + ": certified path failed its gap check");
  sol.status = SolveStatus::certified;
}

}  // namespace detail

/// One-shot solver for positive homogeneous penalties (l1, sorted_l1).
/// With t = proximal_point(f, v, 1): if ||t|| <= tau the sphere constraint
/// is slack and x = t/tau (0 when tau = 0); otherwise x = t/||t|| with
/// mu = ||t|| - tau. Always certified (or zero_solution when t = 0, tau = 0).
inline DualSolution solve_homogeneous(const Penalty& p, std::span<const double> v,
                                      const SolverConfig& cfg = {}) {
  if (!p.positive_homogeneous())
    throw std::invalid_argument("solve_homogeneous: penalty must be positive homogeneous");
  if (!(cfg.tau >= 0.0)) throw std::invalid_argument("solve_homogeneous: tau must be >= 0");
  const std::size_t n = v.size();
  const auto prox = proximal_point(p, v, 1.0);
  const double tnorm = std::sqrt(squared_norm(prox.x));

  DualSolution sol;
  if (tnorm == 0.0) {
    sol = detail::zero_solution(n);
    if (cfg.tau == 0.0) return sol;
    // tau > 0: x = 0 is the unconstrained minimizer; certified with mu = 0.
    detail::assert_certified(p, v, sol, cfg, "solve_homogeneous");
    return sol;
  }
  sol.x.assign(n, 0.0);
  if (tnorm <= cfg.tau) {
    for (std::size_t i = 0; i < n; ++i) sol.x[i] = prox.x[i] / cfg.tau;
    sol.mu = 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) sol.x[i] = prox.x[i] / tnorm;
    sol.mu = tnorm - cfg.tau;
  }
  detail::assert_certified(p, v, sol, cfg, "solve_homogeneous");
  return sol;
}

/// Soft-threshold v at lambda and normalize: the classical passive one-bit
/// recovery. Identical to solve_homogeneous with an l1 penalty.
inline DualSolution solve_passive(std::span<const double> v, double lambda,
                                  const SolverConfig& cfg = {}) {
  return solve_homogeneous(Penalty::l1(lambda), v, cfg);
}

/// Rank-wise shrink (sorted-l1 proximal point) and normalize. Weights must be
/// nonincreasing in ascending-magnitude rank.
inline DualSolution solve_sorted_l1(std::span<const double> v, double lambda,
                                    std::vector<double> weights,
                                    const SolverConfig& cfg = {}) {
  return solve_homogeneous(Penalty::sorted_l1(lambda, std::move(weights)), v, cfg);
}

/// Breakpoint walk for the mcp penalty (tau = 0). Sort |v| ascending, split
/// at lambda, and track the squared norm of the Lagrangian minimizer,
///     ||x(mu)||^2 = d1/(mu - 1/b)^2 + d2/mu^2,
/// where d1 sums (|v|-lambda)^2 over elbow-zone components and d2 sums v^2
/// over saturated ones. The norm at mu = 1/b is b^2 d2; if it exceeds 1 the
/// walk moves up through breakpoints |v|/(b lambda) (components migrate
/// saturated -> elbow) until the norm surrogate drops below 1 and one scalar
/// equation solve finishes the job. Otherwise it moves down through
/// breakpoints v^2/(b lambda^2) (sub-lambda components activate) where the
/// minimizer is a hard-thresholded v/mu and the crossing is mu = sqrt(d2).
inline DualSolution solve_mcp(std::span<const double> v, double lambda, double b,
                              const SolverConfig& cfg = {}) {
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_mcp: lambda must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("solve_mcp: b must be positive");
  if (cfg.tau != 0.0)
    throw std::invalid_argument("solve_mcp: the analytic walk requires tau = 0");
  const std::size_t n = v.size();
  const Penalty p = Penalty::mcp(lambda, b);
  if (detail::all_zero(v)) return detail::zero_solution(n);

  const auto s = detail::sort_magnitudes(v);
  const double c = 1.0 / b;
  // First sorted position with magnitude > lambda.
  const std::size_t L = static_cast<std::size_t>(
      std::upper_bound(s.mag.begin(), s.mag.end(), lambda) - s.mag.begin());
  double d2 = 0.0;
  for (std::size_t i = L; i < n; ++i) d2 += s.mag[i] * s.mag[i];

  DualSolution sol;
  sol.x.assign(n, 0.0);

  if (b * b * d2 > 1.0) {
    // Upward walk: mu > 1/b, norm is continuous, exactly one equation solve.
    double d1 = 0.0;
    double lo = c;
    double mu = 0.0;
    bool found = false;
    for (std::size_t i = L; i < n && !found; ++i) {
      const double bp = s.mag[i] / (b * lambda);
      const double val = d1 / ((bp - c) * (bp - c)) + d2 / (bp * bp);
      if (val <= 1.0) {
        if (val == 1.0) {
          mu = bp;
          sol.tie = true;
        } else {
          mu = mcp_norm_root(d1, d2, b, lo, bp, cfg.root_tol);
          sol.root_solves = 1;
        }
        found = true;
        break;
      }
      d1 += (s.mag[i] - lambda) * (s.mag[i] - lambda);
      d2 -= s.mag[i] * s.mag[i];
      if (d2 < 0.0) d2 = 0.0;
      lo = bp;
    }
    if (!found) {
      // All supra-lambda components in the elbow zone: d2 = 0 and the norm
      // equation reduces to d1/(mu - 1/b)^2 = 1.
      mu = c + std::sqrt(d1);
    }
    sol.mu = mu;
    const double top = b * lambda * mu;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::abs(v[j]);
      if (a <= lambda) continue;
      sol.x[j] = (a >= top) ? v[j] / mu : detail::sgn(v[j]) * (a - lambda) / (mu - c);
    }
    detail::assert_certified(p, v, sol, cfg, "solve_mcp");
    return sol;
  }

  // Downward walk: mu <= 1/b, hard-threshold regime. Active components form
  // a suffix of the sorted order; first_active tracks its start.
  std::size_t first_active = L;
  for (std::size_t step = L; step-- > 0;) {
    if (s.mag[step] == 0.0) break;  // remaining breakpoints sit at mu = 0
    const double nu = s.mag[step] * s.mag[step] / (b * lambda * lambda);
    const double pre = d2 / (nu * nu);
    if (pre >= 1.0) {
      sol.mu = std::sqrt(d2);
      sol.x = detail::scaled_suffix(v, s, first_active, sol.mu);
      if (pre == 1.0) sol.tie = true;
      detail::assert_certified(p, v, sol, cfg, "solve_mcp");
      return sol;
    }
    const double d2post = d2 + s.mag[step] * s.mag[step];
    const double post = d2post / (nu * nu);
    if (post >= 1.0) {
      if (post == 1.0) {
        sol.mu = nu;
        sol.tie = true;
        sol.x = detail::scaled_suffix(v, s, step, nu);
        detail::assert_certified(p, v, sol, cfg, "solve_mcp");
        return sol;
      }
      // The norm jumps across 1 at nu: dual optimum with a nonzero gap.
      std::vector<std::vector<double>> cands;
      if (d2 > 0.0) cands.push_back(detail::scaled_suffix(v, s, first_active, std::sqrt(d2)));
      cands.push_back(detail::scaled_suffix(v, s, step, std::sqrt(d2post)));
      DualSolution js = detail::jump_solution(p, v, nu, std::move(cands), cfg);
      js.root_solves = sol.root_solves;
      return js;
    }
    d2 = d2post;
    first_active = step;
  }
  // Every nonzero component active and the norm still below 1 at the last
  // positive breakpoint: the crossing is mu = sqrt(sum of active v^2).
  sol.mu = std::sqrt(d2);
  sol.x = detail::scaled_suffix(v, s, first_active, sol.mu);
  detail::assert_certified(p, v, sol, cfg, "solve_mcp");
  return sol;
}

/// Breakpoint walk for the l0 penalty (tau = 0). The Lagrangian minimizer
/// keeps component i at v_i/mu iff v_i^2 >= 2 lambda mu, so walking mu down
/// through the breakpoints v^2/(2 lambda) (largest magnitude first) grows the
/// active suffix; the norm d/mu^2 crosses 1 either inside an interval
/// (mu = sqrt(d), certified) or by jumping at a breakpoint (dual optimum with
/// nonzero gap; best feasible candidate returned, 0 when it wins on F).
inline DualSolution solve_l0(std::span<const double> v, double lambda,
                             const SolverConfig& cfg = {}) {
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_l0: lambda must be positive");
  if (cfg.tau != 0.0)
    throw std::invalid_argument("solve_l0: the analytic walk requires tau = 0");
  const std::size_t n = v.size();
  const Penalty p = Penalty::l0(lambda);
  if (detail::all_zero(v)) return detail::zero_solution(n);

  const auto s = detail::sort_magnitudes(v);
  DualSolution sol;
  sol.x.assign(n, 0.0);

  double d = 0.0;
  std::size_t first_active = n;
  for (std::size_t step = n; step-- > 0;) {
    if (s.mag[step] == 0.0) break;
    const double nu = s.mag[step] * s.mag[step] / (2.0 * lambda);
    const double pre = (d == 0.0) ? 0.0 : d / (nu * nu);
    if (pre >= 1.0) {
      sol.mu = std::sqrt(d);
      sol.x = detail::scaled_suffix(v, s, first_active, sol.mu);
      if (pre == 1.0) sol.tie = true;
      detail::assert_certified(p, v, sol, cfg, "solve_l0");
      return sol;
    }
    const double dpost = d + s.mag[step] * s.mag[step];
    const double post = dpost / (nu * nu);
    if (post >= 1.0) {
      if (post == 1.0) {
        sol.mu = nu;
        sol.tie = true;
        sol.x = detail::scaled_suffix(v, s, step, nu);
        detail::assert_certified(p, v, sol, cfg, "solve_l0");
        return sol;
      }
      std::vector<std::vector<double>> cands;
      if (d > 0.0) cands.push_back(detail::scaled_suffix(v, s, first_active, std::sqrt(d)));
      cands.push_back(detail::scaled_suffix(v, s, step, std::sqrt(dpost)));
      return detail::jump_solution(p, v, nu, std::move(cands), cfg);
    }
    d = dpost;
    first_active = step;
  }
  sol.mu = std::sqrt(d);
  sol.x = detail::scaled_suffix(v, s, first_active, sol.mu);
  detail::assert_certified(p, v, sol, cfg, "solve_l0");
  return sol;
}

}  // namespace onebit
