#pragma once

// The five recovery metrics reported by the benchmark harness. Conventions:
// x_true is the unit-norm reference, x_hat the estimate (any vector, zero
// allowed); supports use the absolute threshold 1e-3; degenerate cases take
// defined sentinel values so every CSV cell stays numeric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "onebit/signal.hpp"

namespace onebit {

inline constexpr double kSnrCapDb = 300.0;        // reported when the error is 0
inline constexpr double kSupportThreshold = 1e-3; // |x_i| > this counts as support

struct RecoveryMetrics {
  double snr_db = 0.0;  // 10 log10(||x_true||^2 / ||x_true - x_hat||^2), capped
  double ae = 0.0;      // arccos(x_true . x_hat / ||x_hat||) / pi; 0.5 for x_hat = 0
  double inr = 0.0;     // fraction of i with sign(u_i.x_true) != sign(u_i.x_hat)
  double fnr = 0.0;     // |supp(x_true) \ supp(x_hat)| / |supp(x_true)|
  double fpr = 0.0;     // |supp(x_hat) \ supp(x_true)| / (n - |supp(x_true)|)
};

inline RecoveryMetrics compute_metrics(std::span<const double> x_true,
                                       std::span<const double> x_hat,
                                       const MeasurementEnsemble& ens) {
  const std::size_t n = x_true.size();
  if (x_hat.size() != n || ens.n != n)
    throw std::invalid_argument("compute_metrics: dimension mismatch");

  RecoveryMetrics out;

  double err2 = 0.0, nt2 = 0.0, nh2 = 0.0, dp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = x_true[j] - x_hat[j];
    err2 += d * d;
    nt2 += x_true[j] * x_true[j];
    nh2 += x_hat[j] * x_hat[j];
    dp += x_true[j] * x_hat[j];
  }

  out.snr_db = (err2 == 0.0) ? kSnrCapDb
                             : std::min(kSnrCapDb, 10.0 * std::log10(nt2 / err2));

  if (nh2 == 0.0) {
    out.ae = 0.5;  // chance-level angle for the zero estimate
  } else {
    const double c = std::clamp(dp / std::sqrt(nh2), -1.0, 1.0);
    out.ae = std::acos(c) / (4.0 * std::atan(1.0));
  }

  std::size_t mism = 0;
  for (std::size_t i = 0; i < ens.m; ++i) {
    const double* ui = ens.u.data() + i * n;
    double st = 0.0, sh = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      st += ui[j] * x_true[j];
      sh += ui[j] * x_hat[j];
    }
    if (sign_bit(st) != sign_bit(sh)) ++mism;
  }
  out.inr = static_cast<double>(mism) / static_cast<double>(ens.m);

  std::size_t true_supp = 0, missing = 0, spurious = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const bool in_true = std::abs(x_true[j]) > kSupportThreshold;
    const bool in_hat = std::abs(x_hat[j]) > kSupportThreshold;
    if (in_true) {
      ++true_supp;
      if (!in_hat) ++missing;
    } else if (in_hat) {
      ++spurious;
    }
  }
  out.fnr = (true_supp == 0) ? 0.0
                             : static_cast<double>(missing) / static_cast<double>(true_supp);
  const std::size_t comp = n - true_supp;
  out.fpr = (comp == 0) ? 0.0 : static_cast<double>(spurious) / static_cast<double>(comp);
  return out;
}

}  // namespace onebit
