#pragma once

// Slow, independent reference implementations used to verify the fast
// solvers and to quantify the redundancy of the per-interval naive method:
//
//   dual_bisection         generic dual ascent by bisection on the
//                          subgradient sign; works for every penalty and
//                          any tau >= 0.
//   l0_support_enumeration exact primal minimizer for the l0 penalty by
//                          scanning support sizes (top-k magnitudes).
//   sphere_grid_search     brute-force scan of the unit ball, n <= 3.
//   mcp_naive              mcp solver that re-solves the scalar norm
//                          equation from scratch on every breakpoint
//                          interval; output-identical to solve_mcp but
//                          Theta(n) equation solves instead of at most one.
//
// All functions here are deterministic pure functions of their inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "onebit/penalty.hpp"
#include "onebit/solver.hpp"

namespace onebit {

struct BisectionOptions {
  double width_tol = 1e-10;    // stop when the mu bracket is this narrow
  double subgrad_tol = 1e-12;  // ... or the subgradient is this small
  double jump_eps = 1e-6;      // norm^2 deficit that flags a jump (gap) case
};

/// Maximize the dual G over mu >= 0 by bisection on the sign of the
/// subgradient (1 - ||x*(mu)||^2)/2. The initial bracket starts at
/// [0, ||v|| + 1] and doubles until the subgradient is nonnegative. When the
/// norm passes through 1 smoothly the feasible endpoint normalizes onto the
/// sphere and certifies; when it jumps across 1 the dual-optimal mu is
/// reported with the best feasible candidate assembled from the two bracket
/// endpoints (same candidate policy as the fast walks).
inline DualSolution dual_bisection(const Penalty& p, std::span<const double> v,
                                   const SolverConfig& cfg = {},
                                   const BisectionOptions& opt = {}) {
  if (!(cfg.tau >= 0.0)) throw std::invalid_argument("dual_bisection: tau must be >= 0");
  const std::size_t n = v.size();
  if (detail::all_zero(v)) return detail::zero_solution(n);

  // mu = 0 first: interior optimum or bounded-at-zero homogeneous case.
  if (cfg.tau == 0.0) {
    const DualPoint d0 = dual_value(p, v, 0.0, cfg);
    if (d0.value == 0.0 && squared_norm(d0.x) == 0.0) return detail::zero_solution(n);
  } else {
    DualPoint d0 = dual_value(p, v, 0.0, cfg);
    if (squared_norm(d0.x) <= 1.0) {
      DualSolution sol;
      sol.x = std::move(d0.x);
      sol.mu = 0.0;
      sol.status = certify(p, v, sol, cfg);
      sol.gap = duality_gap(p, v, sol, cfg);
      return sol;
    }
  }

  // Bracket [lo, hi]: subgradient < 0 at lo (norm > 1), >= 0 at hi.
  double lo = 0.0;
  double hi = std::sqrt(squared_norm(v)) + 1.0;
  DualPoint dhi = dual_value(p, v, hi, cfg);
  for (int guard = 0; dhi.subgradient < 0.0; ++guard) {
    if (guard > 200) throw std::runtime_error("dual_bisection: no feasible mu found");
    lo = hi;
    hi *= 2.0;
    dhi = dual_value(p, v, hi, cfg);
  }

  while (hi - lo > opt.width_tol) {
    const double mid = 0.5 * (lo + hi);
    DualPoint dm = dual_value(p, v, mid, cfg);
    if (std::abs(dm.subgradient) <= opt.subgrad_tol) {
      hi = mid;
      dhi = std::move(dm);
      break;
    }
    if (dm.subgradient < 0.0) {
      lo = mid;
    } else {
      hi = mid;
      dhi = std::move(dm);
    }
  }

  const double nx2 = squared_norm(dhi.x);
  if (nx2 >= 1.0 - opt.jump_eps) {
    // Smooth crossing: the minimizer at hi sits (numerically) on the sphere.
    DualSolution sol;
    const double nx = std::sqrt(nx2);
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sol.x[i] = dhi.x[i] / nx;
    sol.mu = hi;
    sol.status = certify(p, v, sol, cfg);
    sol.gap = duality_gap(p, v, sol, cfg);
    return sol;
  }

  // Jump: the norm skips across 1 inside the (now tiny) bracket. Scale each
  // endpoint's minimizer onto the sphere; these are the pre- and post-jump
  // supports, the same candidates the analytic walks construct.
  std::vector<std::vector<double>> cands;
  if (nx2 > 0.0) {
    std::vector<double> c(n);
    const double s = 1.0 / std::sqrt(nx2);
    for (std::size_t i = 0; i < n; ++i) c[i] = dhi.x[i] * s;
    cands.push_back(std::move(c));
  }
  const DualPoint dlo = dual_value(p, v, lo, cfg);
  const double nlo2 = squared_norm(dlo.x);
  if (nlo2 > 0.0 && std::isfinite(nlo2)) {
    std::vector<double> c(n);
    const double s = 1.0 / std::sqrt(nlo2);
    for (std::size_t i = 0; i < n; ++i) c[i] = dlo.x[i] * s;
    cands.push_back(std::move(c));
  }
  return detail::jump_solution(p, v, hi, std::move(cands), cfg);
}

struct EnumerationResult {
  std::vector<double> x;
  double value = 0.0;  // F(x) = lambda * ||x||_0 - <v, x>, exact for x
};

/// Exact minimizer of lambda*||x||_0 - <v,x> over the unit ball. For a fixed
/// support size k the best choice is the k largest magnitudes of v scaled
/// onto the sphere, so scanning k = 0..n is exhaustive. Ties prefer the
/// smaller support.
inline EnumerationResult l0_support_enumeration(std::span<const double> v, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("l0_support_enumeration: lambda must be positive");
  const std::size_t n = v.size();
  const auto s = detail::sort_magnitudes(v);

  std::size_t best_k = 0;
  double best_f = 0.0;
  double sumsq = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double mag = s.mag[n - k];
    sumsq += mag * mag;
    const double f = lambda * static_cast<double>(k) - std::sqrt(sumsq);
    if (f < best_f) {
      best_f = f;
      best_k = k;
    }
  }

  EnumerationResult out;
  out.x.assign(n, 0.0);
  if (best_k > 0) {
    double d = 0.0;
    for (std::size_t k = 1; k <= best_k; ++k) d += s.mag[n - k] * s.mag[n - k];
    const double norm = std::sqrt(d);
    for (std::size_t k = 1; k <= best_k; ++k) {
      const std::size_t j = s.idx[n - k];
      out.x[j] = v[j] / norm;
    }
  }
  out.value = evaluate(Penalty::l0(lambda), out.x) - dot(v, out.x);
  return out;
}

/// Brute-force minimizer of F(x) = f(x) - <v,x> over the unit ball for
/// n in {1, 2, 3} by scanning directions at the given angular resolution and
/// radii {k/resolution}. Accuracy is bounded by the grid spacing; compare
/// objectives with tolerance ~1e-3, not points.
inline std::vector<double> sphere_grid_search(const Penalty& p, std::span<const double> v,
                                              std::size_t resolution = 10000) {
  const std::size_t n = v.size();
  if (n == 0 || n > 3)
    throw std::invalid_argument("sphere_grid_search: only n in {1, 2, 3} supported");
  if (resolution == 0) throw std::invalid_argument("sphere_grid_search: resolution must be positive");

  std::vector<double> best(n, 0.0);
  double best_f = primal_value(p, v, best);
  std::vector<double> pt(n, 0.0);
  const auto consider = [&](const std::vector<double>& x) {
    const double f = primal_value(p, v, x);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  };

  const double two_pi = 8.0 * std::atan(1.0);
  const double res = static_cast<double>(resolution);
  if (n == 1) {
    for (std::size_t k = 1; k <= resolution; ++k) {
      const double r = static_cast<double>(k) / res;
      pt[0] = r;
      consider(pt);
      pt[0] = -r;
      consider(pt);
    }
  } else if (n == 2) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const double th = two_pi * static_cast<double>(j) / res;
      const double cx = std::cos(th), cy = std::sin(th);
      for (std::size_t k = 1; k <= resolution; ++k) {
        const double r = static_cast<double>(k) / res;
        pt[0] = r * cx;
        pt[1] = r * cy;
        consider(pt);
      }
    }
  } else {
    // Latitude-longitude grid with ~sqrt(resolution) polar steps.
    const std::size_t ps = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(std::sqrt(res))));
    for (std::size_t i = 0; i <= ps; ++i) {
      const double th = 0.5 * two_pi * static_cast<double>(i) / static_cast<double>(ps);
      const double sth = std::sin(th), cth = std::cos(th);
      for (std::size_t j = 0; j < 2 * ps; ++j) {
        const double ph = two_pi * static_cast<double>(j) / static_cast<double>(2 * ps);
        const double dx = sth * std::cos(ph), dy = sth * std::sin(ph), dz = cth;
        for (std::size_t k = 1; k <= resolution; ++k) {
          const double r = static_cast<double>(k) / res;
          pt[0] = r * dx;
          pt[1] = r * dy;
          pt[2] = r * dz;
          consider(pt);
        }
      }
    }
  }
  return best;
}

namespace detail {

/// Plain bisection on the norm equation g(mu) = d1/(mu-1/b)^2 + d2/mu^2 - 1
/// over [lo, hi]; always runs the full iteration budget (the redundancy the
/// naive method is meant to exhibit) and reports the final residual.
struct NaiveRootResult {
  double mu = 0.0;
  double residual = std::numeric_limits<double>::infinity();
};

inline NaiveRootResult naive_interval_root(double d1, double d2, double c, double lo, double hi) {
  const auto g = [&](double mu) -> double {
    double s = d2 / (mu * mu);
    if (d1 > 0.0) {
      const double e = mu - c;
      s += (e > 0.0) ? d1 / (e * e) : std::numeric_limits<double>::infinity();
    }
    return s - 1.0;
  };
  double a = lo, b = hi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (a + b);
    if (g(mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  NaiveRootResult out;
  out.mu = b;
  out.residual = std::abs(g(b));
  return out;
}

}  // namespace detail

/// Reference mcp solver that walks the same breakpoints as solve_mcp but, on
/// every interval of the upward walk, re-derives d1 and d2 with a full pass
/// over v and runs a fixed-budget bisection for the norm equation, accepting
/// the interval only when the root lands inside it with residual <= 1e-9.
/// Output matches solve_mcp (mu within 1e-8); cost is Theta(n) equation
/// solves plus Theta(n^2) scanning, which is the redundancy the fast walk
/// removes. root_solves reports the number of interval solves attempted.
inline DualSolution mcp_naive(std::span<const double> v, double lambda, double b,
                              const SolverConfig& cfg = {}) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mcp_naive: lambda must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("mcp_naive: b must be positive");
  if (cfg.tau != 0.0) throw std::invalid_argument("mcp_naive: requires tau = 0");
  const std::size_t n = v.size();
  const Penalty p = Penalty::mcp(lambda, b);
  if (detail::all_zero(v)) return detail::zero_solution(n);

  const auto s = detail::sort_magnitudes(v);
  const double c = 1.0 / b;
  const std::size_t L = static_cast<std::size_t>(
      std::upper_bound(s.mag.begin(), s.mag.end(), lambda) - s.mag.begin());

  double d2_all = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (s.mag[i] > lambda) d2_all += s.mag[i] * s.mag[i];

  DualSolution sol;
  sol.x.assign(n, 0.0);

  if (b * b * d2_all > 1.0) {
    // Upward walk over intervals (prev, bp_i]; elbow/saturated membership is
    // recomputed from scratch for every interval.
    double prev = c;
    double mu = -1.0;
    for (std::size_t i = L; i <= n && mu < 0.0; ++i) {
      double hi_end;
      if (i < n) {
        hi_end = s.mag[i] / (b * lambda);
        if (hi_end <= prev) continue;  // tied breakpoint: empty interval
      } else {
        hi_end = -1.0;  // tail interval, bracket fixed after d1 is known
      }
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double a = std::abs(v[j]);
        if (a <= lambda) continue;
        // Elbow membership for the whole interval is decided at its left end.
        // Compare breakpoints (a / (b*lambda)) rather than magnitudes against
        // b*lambda*prev: prev is itself a breakpoint, so the same expression
        // rounds the same way and the endpoint component lands in the elbow,
        // never on the saturated side of its own breakpoint.
        if (a / (b * lambda) <= prev)
          d1 += (a - lambda) * (a - lambda);
        else
          d2 += a * a;
      }
      if (i == n) hi_end = prev + std::sqrt(d1) + 1.0;
      ++sol.root_solves;
      const auto root = detail::naive_interval_root(d1, d2, c, prev, hi_end);
      if (root.residual <= 1e-9 && root.mu > prev &&
          root.mu <= hi_end * (1.0 + 1e-12)) {
        mu = root.mu;
      }
      prev = hi_end;
    }
    if (mu < 0.0) throw CertificationError("mcp_naive: upward walk found no interval");
    sol.mu = mu;
    const double top = b * lambda * mu;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::abs(v[j]);
      if (a <= lambda) continue;
      sol.x[j] = (a >= top) ? v[j] / mu : detail::sgn(v[j]) * (a - lambda) / (mu - c);
    }
    detail::assert_certified(p, v, sol, cfg, "mcp_naive");
    return sol;
  }

  // Downward walk, mirroring solve_mcp's decisions but recomputing the
  // active-set energy with a full pass at every step.
  const auto suffix_energy = [&](std::size_t first) {
    double d = 0.0;
    for (std::size_t i = first; i < n; ++i) d += s.mag[i] * s.mag[i];
    return d;
  };
  std::size_t first_active = L;
  for (std::size_t step = L; step-- > 0;) {
    if (s.mag[step] == 0.0) break;
    const double nu = s.mag[step] * s.mag[step] / (b * lambda * lambda);
    const double d2 = suffix_energy(first_active);
    const double pre = d2 / (nu * nu);
    if (pre >= 1.0) {
      sol.mu = std::sqrt(d2);
      sol.x = detail::scaled_suffix(v, s, first_active, sol.mu);
      if (pre == 1.0) sol.tie = true;
      detail::assert_certified(p, v, sol, cfg, "mcp_naive");
      return sol;
    }
    const double d2post = suffix_energy(step);
    const double post = d2post / (nu * nu);
    if (post >= 1.0) {
      if (post == 1.0) {
        sol.mu = nu;
        sol.tie = true;
        sol.x = detail::scaled_suffix(v, s, step, nu);
        detail::assert_certified(p, v, sol, cfg, "mcp_naive");
        return sol;
      }
      std::vector<std::vector<double>> cands;
      if (d2 > 0.0) cands.push_back(detail::scaled_suffix(v, s, first_active, std::sqrt(d2)));
      cands.push_back(detail::scaled_suffix(v, s, step, std::sqrt(d2post)));
      DualSolution js = detail::jump_solution(p, v, nu, std::move(cands), cfg);
      js.root_solves = sol.root_solves;
      return js;
    }
    first_active = step;
  }
  sol.mu = std::sqrt(suffix_energy(first_active));
  sol.x = detail::scaled_suffix(v, s, first_active, sol.mu);
  detail::assert_certified(p, v, sol, cfg, "mcp_naive");
  return sol;
}

}  // namespace onebit
