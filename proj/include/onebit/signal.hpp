#pragma once

// Synthetic one-bit measurement generation: sparse unit-norm ground truth,
// Gaussian sensing vectors, pre-quantization Gaussian noise at a prescribed
// variance ratio, and post-quantization sign flips. Everything is
// deterministic given the seeds; the three random ingredients of an ensemble
// (sensing matrix, noise, flip positions) draw from independently derived
// streams so that e.g. disabling noise does not shift the flip pattern.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "onebit/rng.hpp"

namespace onebit {

/// The sign convention used throughout: +1 for positive, -1 otherwise
/// (zero maps to -1).
inline double sign_bit(double t) { return t > 0.0 ? 1.0 : -1.0; }

struct SignalSpec {
  std::size_t n = 0;       // ambient dimension
  std::size_t k = 0;       // number of nonzeros
  std::uint64_t seed = 0;
};

/// Unit-norm vector with exactly k nonzeros at uniformly random positions,
/// values standard normal before normalization. Deterministic given the seed.
inline std::vector<double> generate_signal(const SignalSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("generate_signal: n must be positive");
  if (spec.k == 0 || spec.k > spec.n)
    throw std::invalid_argument("generate_signal: need 1 <= k <= n");
  RandomStream pos_stream(derive_seed(spec.seed, 0));
  RandomStream val_stream(derive_seed(spec.seed, 1));
  const auto positions = pos_stream.sample_without_replacement(spec.n, spec.k);

  std::vector<double> vals(spec.k);
  while (true) {  // reject the measure-zero draws that would break "exactly k nonzeros"
    double nrm2 = 0.0;
    bool ok = true;
    for (std::size_t j = 0; j < spec.k; ++j) {
      vals[j] = val_stream.next_normal();
      if (vals[j] == 0.0) ok = false;
      nrm2 += vals[j] * vals[j];
    }
    if (ok && nrm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(nrm2);
      std::vector<double> x(spec.n, 0.0);
      for (std::size_t j = 0; j < spec.k; ++j) x[positions[j]] = vals[j] * inv;
      return x;
    }
  }
}

struct NoiseModel {
  // Ratio between the variance of the clean measurements u^T x (which is 1
  // for unit x and standard-normal u) and the noise variance; the noise
  // standard deviation is 1/sqrt(s_n). s_n = infinity disables noise.
  double s_n = std::numeric_limits<double>::infinity();
  double flip_ratio = 0.0;  // fraction of measurements whose sign is negated

  static NoiseModel noiseless() { return {}; }
  bool noise_disabled() const { return std::isinf(s_n); }
};

struct MeasurementEnsemble {
  std::size_t m = 0, n = 0;
  std::vector<double> u;             // m x n row-major; row i is sensing vector u_i
  std::vector<double> y;             // observed signs, each +1 or -1
  std::vector<double> x_true;        // unit-norm ground truth
  std::vector<double> noise;         // stored pre-quantization noise draws
  std::vector<std::size_t> flipped;  // sorted indices whose sign was negated

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(u.data() + i * n, n);
  }
};

/// y_i = sign(u_i^T x + eps_i) with u entries i.i.d. standard normal and eps
/// i.i.d. normal with variance 1/s_n, then exactly round(flip_ratio * m)
/// distinct uniformly chosen signs negated. The sensing matrix, the noise,
/// and the flip positions come from independent derived streams.
inline MeasurementEnsemble sense(std::span<const double> x_true, std::size_t m,
                                 const NoiseModel& noise, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("sense: m must be positive");
  if (x_true.empty()) throw std::invalid_argument("sense: empty signal");
  if (!(noise.s_n > 0.0)) throw std::invalid_argument("sense: s_n must be positive");
  if (!(noise.flip_ratio >= 0.0) || !(noise.flip_ratio <= 1.0))
    throw std::invalid_argument("sense: flip_ratio must lie in [0, 1]");

  MeasurementEnsemble ens;
  ens.m = m;
  ens.n = x_true.size();
  ens.x_true.assign(x_true.begin(), x_true.end());

  RandomStream u_stream(derive_seed(seed, 0));
  ens.u.resize(m * ens.n);
  u_stream.fill_normal(ens.u);

  ens.noise.assign(m, 0.0);
  if (!noise.noise_disabled()) {
    RandomStream eps_stream(derive_seed(seed, 1));
    const double sd = 1.0 / std::sqrt(noise.s_n);
    for (std::size_t i = 0; i < m; ++i) ens.noise[i] = sd * eps_stream.next_normal();
  }

  ens.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double t = ens.noise[i];
    const double* ui = ens.u.data() + i * ens.n;
    for (std::size_t j = 0; j < ens.n; ++j) t += ui[j] * x_true[j];
    ens.y[i] = sign_bit(t);
  }

  const auto nflips = static_cast<std::size_t>(std::llround(noise.flip_ratio * static_cast<double>(m)));
  if (nflips > 0) {
    RandomStream flip_stream(derive_seed(seed, 2));
    ens.flipped = flip_stream.sample_without_replacement(m, nflips);
    std::sort(ens.flipped.begin(), ens.flipped.end());
    for (std::size_t i : ens.flipped) ens.y[i] = -ens.y[i];
  }
  return ens;
}

/// The correlation vector v = (1/m) sum_i y_i u_i: the sufficient statistic
/// every solver consumes.
inline std::vector<double> correlation(const MeasurementEnsemble& ens) {
  std::vector<double> v(ens.n, 0.0);
  for (std::size_t i = 0; i < ens.m; ++i) {
    const double yi = ens.y[i];
    const double* ui = ens.u.data() + i * ens.n;
    for (std::size_t j = 0; j < ens.n; ++j) v[j] += yi * ui[j];
  }
  const double inv = 1.0 / static_cast<double>(ens.m);
  for (double& vj : v) vj *= inv;
  return v;
}

}  // namespace onebit
