#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "onebit/penalty.hpp"
#include "onebit/rng.hpp"
#include "test_util.hpp"

using namespace onebit;
using Catch::Approx;

TEST_CASE("sorted-l1 weights follow the rank rule and are nonincreasing") {
  const auto w = sorted_l1_weights(4, 2);
  REQUIRE(w.size() == 4);
  CHECK(w[0] == 1.0);  // rank 1 < n1
  CHECK(w[1] == Approx(std::exp(-5.0)).margin(1e-15));
  CHECK(w[2] == Approx(std::exp(-7.5)).margin(1e-15));
  CHECK(w[3] == Approx(std::exp(-10.0)).margin(1e-15));

  // n1 = 1 puts every rank on the exponential tail
  const auto w1 = sorted_l1_weights(3, 1);
  CHECK(w1[0] == Approx(std::exp(-5.0)).margin(1e-15));

  for (std::size_t n1 = 1; n1 <= 16; ++n1) {
    const auto ws = sorted_l1_weights(16, n1);
    for (std::size_t r = 1; r < ws.size(); ++r) CHECK(ws[r] <= ws[r - 1]);
    for (double x : ws) CHECK(x > 0.0);
  }

  CHECK_THROWS_AS(sorted_l1_weights(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sorted_l1_weights(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(sorted_l1_weights(4, 5), std::invalid_argument);
}

TEST_CASE("keep-the-top sorted-l1 weights free the n1 largest ranks") {
  // Full weight below the top block, exponential decay across it: the last
  // entry (largest magnitude) always gets exp(-5).
  const auto w = sorted_l1_top_weights(5, 2);
  REQUIRE(w.size() == 5);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 1.0);
  CHECK(w[2] == 1.0);
  CHECK(w[3] == Approx(std::exp(-2.5)).margin(1e-15));
  CHECK(w[4] == Approx(std::exp(-5.0)).margin(1e-15));

  // n1 = n puts every rank on the decay ramp.
  const auto wall = sorted_l1_top_weights(3, 3);
  CHECK(wall[0] == Approx(std::exp(-5.0 / 3.0)).margin(1e-15));
  CHECK(wall[1] == Approx(std::exp(-10.0 / 3.0)).margin(1e-15));
  CHECK(wall[2] == Approx(std::exp(-5.0)).margin(1e-15));

  for (std::size_t n1 = 1; n1 <= 16; ++n1) {
    const auto ws = sorted_l1_top_weights(16, n1);
    for (std::size_t r = 1; r < ws.size(); ++r) CHECK(ws[r] <= ws[r - 1]);
    for (double x : ws) CHECK(x > 0.0);
  }

  CHECK_THROWS_AS(sorted_l1_top_weights(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sorted_l1_top_weights(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(sorted_l1_top_weights(4, 5), std::invalid_argument);
}

TEST_CASE("penalty constructors validate their parameters") {
  CHECK_THROWS_AS(Penalty::l1(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(Penalty::mcp(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Penalty::mcp(-1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(Penalty::sorted_l1(0.2, {}), std::invalid_argument);
  CHECK_THROWS_AS(Penalty::sorted_l1(0.2, {0.5, 1.0}), std::invalid_argument);  // increasing
  CHECK_THROWS_AS(Penalty::sorted_l1(0.2, {1.0, -0.5}), std::invalid_argument);

  CHECK(Penalty::l1(0.1).positive_homogeneous());
  CHECK(Penalty::sorted_l1(0.2, {1.0, 0.5}).positive_homogeneous());
  CHECK_FALSE(Penalty::mcp(0.1, 3.0).positive_homogeneous());
  CHECK_FALSE(Penalty::l0(0.1).positive_homogeneous());
}

TEST_CASE("penalty evaluation matches hand arithmetic") {
  const std::vector<double> x{0.4, -0.3, 0.0};
  CHECK(evaluate(Penalty::l1(0.1), x) == Approx(0.07).margin(1e-15));

  // mcp scalar: quadratic inside |x| <= b*lambda, constant b*lambda^2/2 outside
  const Penalty m = Penalty::mcp(0.1, 3.0);
  CHECK(evaluate(m, std::vector<double>{0.5}) == Approx(0.015).margin(1e-15));
  CHECK(evaluate(m, std::vector<double>{0.1}) == Approx(0.1 * 0.1 - 0.01 / 6.0).margin(1e-15));
  CHECK(evaluate(m, std::vector<double>{0.3}) == Approx(0.015).margin(1e-15));  // elbow top

  CHECK(evaluate(Penalty::l0(0.5), std::vector<double>{0.0, 1.1}) == 0.5);
  CHECK(evaluate(Penalty::l0(0.5), std::vector<double>{0.9, 1.1}) == 1.0);

  const Penalty s = Penalty::sorted_l1(0.2, {1.0, 0.5});
  CHECK(evaluate(s, std::vector<double>{0.3, 0.4}) == Approx(0.1).margin(1e-15));
  // rank weights attach to sorted magnitudes, not positions
  CHECK(evaluate(s, std::vector<double>{0.4, 0.3}) == Approx(0.1).margin(1e-15));
  CHECK_THROWS_AS(evaluate(s, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("proximal points match the frozen examples") {
  SECTION("l1 soft threshold") {
    const auto r = proximal_point(Penalty::l1(0.1), std::vector<double>{0.4, -0.3, 0.0}, 1.0);
    CHECK(r.x[0] == Approx(0.3).margin(1e-15));
    CHECK(r.x[1] == Approx(-0.2).margin(1e-15));
    CHECK(r.x[2] == 0.0);
    CHECK_FALSE(r.tie);
  }
  SECTION("mcp three-zone regime at rho > 1/b") {
    const Penalty p = Penalty::mcp(0.1, 3.0);
    CHECK(proximal_point(p, std::vector<double>{0.05}, 1.0).x[0] == 0.0);
    CHECK(proximal_point(p, std::vector<double>{0.2}, 1.0).x[0] ==
          Approx(0.15).margin(1e-15));
    CHECK(proximal_point(p, std::vector<double>{0.5}, 1.0).x[0] ==
          Approx(0.5).margin(1e-15));
    CHECK(proximal_point(p, std::vector<double>{-0.2}, 1.0).x[0] ==
          Approx(-0.15).margin(1e-15));
  }
  SECTION("mcp hard threshold at rho <= 1/b") {
    const Penalty p = Penalty::mcp(0.1, 3.0);
    const double rho = 0.2;  // 1/b = 1/3
    CHECK(proximal_point(p, std::vector<double>{0.05}, rho).x[0] == 0.0);
    CHECK(proximal_point(p, std::vector<double>{0.1}, rho).x[0] ==
          Approx(0.5).margin(1e-15));  // 0.01 > b lam^2 rho = 0.006 -> v/rho
  }
  SECTION("l0 hard threshold") {
    const auto r = proximal_point(Penalty::l0(0.5), std::vector<double>{0.9, 1.1}, 1.0);
    CHECK(r.x[0] == 0.0);
    CHECK(r.x[1] == Approx(1.1).margin(1e-15));
    CHECK_FALSE(r.tie);
  }
  SECTION("sorted-l1 rank-wise shrink") {
    const Penalty p = Penalty::sorted_l1(0.2, {1.0, 0.5});
    const auto r = proximal_point(p, std::vector<double>{0.3, 0.4}, 1.0);
    CHECK(r.x[0] == Approx(0.1).margin(1e-15));
    CHECK(r.x[1] == Approx(0.3).margin(1e-15));
    CHECK_THROWS_AS(proximal_point(p, std::vector<double>{1.0}, 1.0), std::invalid_argument);
  }
  SECTION("rho must be positive") {
    CHECK_THROWS_AS(proximal_point(Penalty::l1(0.1), std::vector<double>{1.0}, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("threshold ties take the nonzero branch and raise the flag") {
  // dyadic values keep the tie comparisons exact in floating point
  const auto rm = proximal_point(Penalty::mcp(1.0, 1.0), std::vector<double>{0.5}, 0.25);
  CHECK(rm.tie);
  CHECK(rm.x[0] == Approx(2.0).margin(1e-15));  // v / rho

  const auto rl = proximal_point(Penalty::l0(0.5), std::vector<double>{0.5}, 0.25);
  CHECK(rl.tie);
  CHECK(rl.x[0] == Approx(2.0).margin(1e-15));

  // just below / above the threshold: no tie
  CHECK_FALSE(proximal_point(Penalty::l0(0.5), std::vector<double>{0.4999}, 0.25).tie);
  CHECK_FALSE(proximal_point(Penalty::l0(0.5), std::vector<double>{0.5001}, 0.25).tie);
}

TEST_CASE("proximal point beats a dense scalar scan on random instances") {
  // separable penalties: componentwise scan; the prox objective must not
  // exceed the best grid objective (one-sided; the grid cannot win)
  const auto scalar_penalty = [](const Penalty& p, double x) {
    switch (p.kind) {
      case PenaltyKind::l1: return p.lambda * std::abs(x);
      case PenaltyKind::mcp: return detail::mcp_scalar(x, p.lambda, p.b);
      case PenaltyKind::l0: return x != 0.0 ? p.lambda : 0.0;
      default: throw std::logic_error("not separable");
    }
  };
  for (std::uint64_t t = 0; t < 150; ++t) {
    const RandomInstance inst = random_instance(derive_seed(404, t), 3);
    onebit::RandomStream s(derive_seed(505, t));
    const double rho = 0.05 + 2.0 * s.next_unit();
    const Penalty penalties[3] = {Penalty::l1(inst.lambda),
                                  Penalty::mcp(inst.lambda, inst.b), Penalty::l0(inst.lambda)};
    for (const Penalty& p : penalties) {
      const auto res = proximal_point(p, inst.v, rho);
      for (std::size_t j = 0; j < inst.v.size(); ++j) {
        const double vj = inst.v[j];
        const auto obj = [&](double x) {
          const double d = x - vj / rho;
          return scalar_penalty(p, x) + 0.5 * rho * d * d;
        };
        const double got = obj(res.x[j]);
        const double span = 2.0 * std::abs(vj) + 1.0;
        double best = obj(0.0);
        for (double x = -span; x <= span; x += 1e-3) best = std::min(best, obj(x));
        CHECK(got <= best + 1e-9);
      }
    }
  }
}

TEST_CASE("sorted-l1 proximal point beats a 2-d grid scan") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    onebit::RandomStream s(derive_seed(606, t));
    const std::vector<double> v{s.next_normal(), s.next_normal()};
    const double lambda = 0.05 + 0.5 * s.next_unit();
    const double rho = 0.2 + 2.0 * s.next_unit();
    const Penalty p = Penalty::sorted_l1(lambda, sorted_l1_weights(2, 1 + s.next_below(2)));
    const auto res = proximal_point(p, v, rho);
    const auto obj = [&](const std::vector<double>& x) {
      double q = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        const double d = x[j] - v[j] / rho;
        q += d * d;
      }
      return evaluate(p, x) + 0.5 * rho * q;
    };
    const double got = obj(res.x);
    const double span = 2.0 * std::max(std::abs(v[0]), std::abs(v[1])) / std::min(rho, 1.0) + 0.5;
    double best = got + 1.0;
    std::vector<double> x(2);
    for (x[0] = -span; x[0] <= span; x[0] += 1e-2)
      for (x[1] = -span; x[1] <= span; x[1] += 1e-2) best = std::min(best, obj(x));
    CHECK(got <= best + 1e-9);
  }
}

TEST_CASE("positive homogeneous proximal points scale as prox(v, rho) = prox(v, 1)/rho") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const RandomInstance inst = random_instance(derive_seed(707, t));
    onebit::RandomStream s(derive_seed(808, t));
    const double rho = 0.1 + 3.0 * s.next_unit();
    const Penalty penalties[2] = {
        Penalty::l1(inst.lambda),
        Penalty::sorted_l1(inst.lambda, sorted_l1_weights(inst.v.size(), inst.n1))};
    for (const Penalty& p : penalties) {
      const auto unit = proximal_point(p, inst.v, 1.0);
      const auto scaled = proximal_point(p, inst.v, rho);
      for (std::size_t j = 0; j < inst.v.size(); ++j)
        CHECK(scaled.x[j] == Approx(unit.x[j] / rho).margin(1e-12));
    }
  }
}

TEST_CASE("proximal points are sign equivariant") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const RandomInstance inst = random_instance(derive_seed(909, t));
    std::vector<double> neg(inst.v.size());
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -inst.v[j];
    const Penalty penalties[4] = {
        Penalty::l1(inst.lambda), Penalty::mcp(inst.lambda, inst.b), Penalty::l0(inst.lambda),
        Penalty::sorted_l1(inst.lambda, sorted_l1_weights(inst.v.size(), inst.n1))};
    for (const Penalty& p : penalties) {
      const auto plus = proximal_point(p, inst.v, 0.7);
      const auto minus = proximal_point(p, neg, 0.7);
      for (std::size_t j = 0; j < neg.size(); ++j) CHECK(minus.x[j] == -plus.x[j]);
    }
  }
}
