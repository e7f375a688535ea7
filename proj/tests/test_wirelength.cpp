#include "oracles.hpp"
#include "picplace/state.hpp"
#include "picplace/wirelength.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace picplace;
using picplace::testing::numeric_gradient;
using picplace::testing::relative_error;

namespace {

WirelengthParams coswa(double gamma, double alpha = 1.4, double margin = 0.0) {
  WirelengthParams p;
  p.gamma = gamma;
  p.alpha = alpha;
  p.margin = margin;
  return p;
}

// Random point away from the ε degeneracy and from the bend-penalty kinks.
NetGeometry random_net(Rng& rng) {
  NetGeometry g;
  for (;;) {
    g.p1 = {rng.uniform(-100, 100), rng.uniform(-100, 100)};
    g.p2 = {rng.uniform(-100, 100), rng.uniform(-100, 100)};
    g.v1 = static_cast<Dir>(rng.below(4));
    g.v2 = static_cast<Dir>(rng.below(4));
    const Vec2 w = g.p2 - g.p1;
    if (std::abs(w.x) > 1.0 && std::abs(w.y) > 1.0) return g;
  }
}

}  // namespace

TEST(BendPenalty, FacingPortsArePenaltyFree) {
  const BendPenalty bp = bend_penalty({10, 0}, Dir::E, Dir::W, 0.0);
  EXPECT_DOUBLE_EQ(bp.cos1, 1.0);
  EXPECT_DOUBLE_EQ(bp.cos2, 1.0);
  EXPECT_EQ(bp.value, 0.0);
}

TEST(BendPenalty, ReversedPorts) {
  const BendPenalty bp = bend_penalty({-10, 0}, Dir::E, Dir::W, 0.0);
  EXPECT_DOUBLE_EQ(bp.cos1, -1.0);
  EXPECT_DOUBLE_EQ(bp.cos2, -1.0);
  EXPECT_DOUBLE_EQ(bp.value, 2.0);
}

TEST(BendPenalty, AcuteAngleIsFree) {
  const BendPenalty bp = bend_penalty({10, 10}, Dir::E, Dir::W, 0.0);
  EXPECT_NEAR(bp.cos1, 1.0 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(bp.cos2, 1.0 / std::numbers::sqrt2, 1e-15);
  EXPECT_EQ(bp.value, 0.0);
}

TEST(BendPenalty, DegenerateSeparation) {
  const BendPenalty bp = bend_penalty({1e-7, 0}, Dir::W, Dir::W, 1.0);
  EXPECT_EQ(bp.value, 0.0);
  EXPECT_EQ(bp.grad(), (Vec2{}));
}

TEST(BendPenalty, RawSecondAngle) {
  // Literal reading measures θ₂ against +w, so the facing pair is penalised.
  const BendPenalty bp = bend_penalty({10, 0}, Dir::E, Dir::W, 0.0, true);
  EXPECT_DOUBLE_EQ(bp.cos2, -1.0);
  EXPECT_DOUBLE_EQ(bp.value, 1.0);
}

TEST(BendPenalty, ZeroExactlyWhenBothCosinesClearMargin) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const Vec2 w{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const double c = rng.uniform();
    const BendPenalty bp =
        bend_penalty(w, static_cast<Dir>(rng.below(4)), static_cast<Dir>(rng.below(4)), c);
    EXPECT_GE(bp.value, 0.0);
    EXPECT_EQ(bp.value == 0.0, bp.cos1 >= c && bp.cos2 >= c);
  }
}

TEST(SmoothSpan, MatchesDirectEvaluation) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-50, 50), b = rng.uniform(-50, 50);
    const double g = rng.uniform(2.0, 20.0);
    EXPECT_NEAR(wa_span(a, b, g).value, oracle::wa_span(a, b, g), 1e-9);
    EXPECT_NEAR(lse_span(a, b, g).value, oracle::lse_span(a, b, g), 1e-9);
  }
}

TEST(SmoothSpan, BracketsTheTrueSpan) {
  // Weighted average sits below the span and log-sum-exp above it.
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-1e3, 1e3), b = rng.uniform(-1e3, 1e3);
    const double g = rng.uniform(0.01, 100.0);
    const double span = std::abs(a - b);
    EXPECT_LE(wa_span(a, b, g).value, span + 1e-9);
    EXPECT_GE(lse_span(a, b, g).value, span - 1e-9);
  }
}

TEST(SmoothSpan, WaConvergesToSpan) {
  EXPECT_NEAR(wa_span(0.0, 40.0, 1e-3).value, 40.0, 1e-9);
  EXPECT_NEAR(wa_span(0.0, 40.0, 0.5).value, 40.0, 1e-9);
}

TEST(SmoothSpan, StableForLargeCoordinates) {
  const SmoothSpan s = wa_span(1e6, 1e6 + 500.0, 0.1);
  EXPECT_TRUE(std::isfinite(s.value));
  EXPECT_NEAR(s.value, 500.0, 1e-6);
}

TEST(Baselines, Quadratic) {
  WirelengthParams p;
  p.model = WirelengthModel::Quadratic;
  const NetCost c = baseline_net({{0, 0}, {3, 4}, Dir::E, Dir::W}, p);
  EXPECT_DOUBLE_EQ(c.cost, 25.0);
}

TEST(Baselines, LseOfEqualCoordinates) {
  WirelengthParams p;
  p.model = WirelengthModel::LSE;
  p.gamma = 3.0;
  const NetCost c = baseline_net({{5, 5}, {5, 5}, Dir::E, Dir::W}, p);
  EXPECT_NEAR(c.cost, 2.0 * (2.0 * 3.0 * std::log(2.0)), 1e-12);
}

TEST(CosWA, ZeroSpan) {
  const NetCost c = coswa_net({{7, 7}, {7, 7}, Dir::E, Dir::N}, coswa(5.0));
  EXPECT_EQ(c.cost, 0.0);
  EXPECT_EQ(c.grad1, (Vec2{}));
  EXPECT_EQ(c.grad2, (Vec2{}));
}

TEST(CosWA, FacingPairAgainstScalarOracle) {
  const NetCost c = coswa_net({{0, 0}, {100, 0}, Dir::E, Dir::W}, coswa(10.0, 1.4));
  EXPECT_NEAR(c.cost, std::pow(oracle::wa_span(0.0, 100.0, 10.0), 1.4), 1e-9);
}

TEST(CosWA, ReducesToWaForAlignedFacingPorts) {
  Rng rng(4);
  WirelengthParams wa;
  wa.model = WirelengthModel::WA;
  for (int i = 0; i < 100; ++i) {
    const double g = rng.uniform(1.0, 20.0);
    wa.gamma = g;
    // Pins on one row, ports facing each other: every cosine is exactly 1.
    const double x1 = rng.uniform(-100, 0), x2 = rng.uniform(1, 100), y = rng.uniform(-50, 50);
    NetGeometry net{{x1, y}, {x2, y}, Dir::E, Dir::W};
    for (double c : {0.0, 1.0}) {
      const double a = coswa_net(net, coswa(g, 1.0, c)).cost;
      const double b = baseline_net(net, wa).cost;
      EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(b)));
    }
    // With c = 0 every configuration inside the facing cone also reduces.
    net.p2.y = y + rng.uniform(-1.0, 1.0) * (x2 - x1);
    EXPECT_NEAR(coswa_net(net, coswa(g, 1.0, 0.0)).cost, baseline_net(net, wa).cost,
                1e-9 * std::max(1.0, baseline_net(net, wa).cost));
  }
}

TEST(CosWA, TranslationInvariant) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    NetGeometry g = random_net(rng);
    const WirelengthParams p = coswa(rng.uniform(1.0, 10.0), rng.uniform(1.0, 2.0), rng.uniform());
    const double before = coswa_net(g, p).cost;
    const Vec2 t{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    g.p1 += t;
    g.p2 += t;
    EXPECT_NEAR(coswa_net(g, p).cost, before, 1e-9 * std::max(1.0, before));
  }
}

TEST(CosWA, MonotoneInFacingSeparation) {
  const WirelengthParams p = coswa(5.0);
  double last = -1.0;
  for (double dx = 0.0; dx <= 200.0; dx += 0.5) {
    const NetCost c = coswa_net({{0, 3}, {dx, 3}, Dir::E, Dir::W}, p);
    EXPECT_GE(c.cost, last);
    last = c.cost;
  }
}

TEST(CosWA, NetGradientMatchesFiniteDifferences) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const NetGeometry g0 = random_net(rng);
    const WirelengthParams p = coswa(rng.uniform(2.0, 20.0), rng.uniform(1.0, 2.0), rng.uniform());
    const NetCost c = coswa_net(g0, p);
    auto f = [&](std::span<const double> x) {
      NetGeometry g = g0;
      g.p1 = {x[0], x[1]};
      g.p2 = {x[2], x[3]};
      return coswa_net(g, p).cost;
    };
    const auto num = numeric_gradient(f, {g0.p1.x, g0.p1.y, g0.p2.x, g0.p2.y}, 1e-4);
    const std::vector<double> ana{c.grad1.x, c.grad1.y, c.grad2.x, c.grad2.y};
    // Skip draws that straddle a bend-penalty kink within the stencil.
    const BendPenalty bp = bend_penalty(g0.p2 - g0.p1, g0.v1, g0.v2, p.margin);
    if (std::abs(bp.cos1 - p.margin) < 1e-4 || std::abs(bp.cos2 - p.margin) < 1e-4) continue;
    EXPECT_LT(relative_error(ana, num), 1e-5) << "trial " << trial;
  }
}

TEST(Baselines, GradientsMatchFiniteDifferences) {
  Rng rng(7);
  for (WirelengthModel m : {WirelengthModel::WA, WirelengthModel::LSE, WirelengthModel::Quadratic}) {
    for (int trial = 0; trial < 30; ++trial) {
      const NetGeometry g0 = random_net(rng);
      WirelengthParams p;
      p.model = m;
      p.gamma = rng.uniform(2.0, 20.0);
      const NetCost c = baseline_net(g0, p);
      auto f = [&](std::span<const double> x) {
        NetGeometry g = g0;
        g.p1 = {x[0], x[1]};
        g.p2 = {x[2], x[3]};
        return baseline_net(g, p).cost;
      };
      const auto num = numeric_gradient(f, {g0.p1.x, g0.p1.y, g0.p2.x, g0.p2.y}, 1e-4);
      EXPECT_LT(relative_error(std::vector<double>{c.grad1.x, c.grad1.y, c.grad2.x, c.grad2.y}, num),
                1e-5);
    }
  }
}

TEST(TotalWirelength, EmptyNetSet) {
  Rng rng(9);
  Design d = picplace::testing::random_design(rng, 4, 0);
  const PlacementState s = state_from_design(d, 3);
  const StateGradient r = total_wirelength(d, s, coswa(5.0));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.grad.size(), s.size());
  for (double g : r.grad) EXPECT_EQ(g, 0.0);
}

TEST(TotalWirelength, WeightIsLinear) {
  Rng rng(10);
  Design d = picplace::testing::random_design(rng, 2, 1);
  d.nets[0].weight = 1.0;
  const auto pos = component_positions(d, state_from_design(d).coords);
  const double one = total_wirelength(d, pos, coswa(5.0)).value;
  d.nets[0].weight = 2.0;
  EXPECT_EQ(total_wirelength(d, pos, coswa(5.0)).value, 2.0 * one);
}

TEST(TotalWirelength, StateGradientMatchesFiniteDifferences) {
  Rng rng(12);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Design d = picplace::testing::random_design(rng, 12, 20);
    const WirelengthParams p = coswa(rng.uniform(2.0, 20.0), rng.uniform(1.0, 2.0), 0.0);
    PlacementState s = state_from_design(d, 2);
    const StateGradient r = total_wirelength(d, s, p);
    auto f = [&](std::span<const double> x) {
      PlacementState t = s;
      t.coords.assign(x.begin(), x.end());
      return total_wirelength(d, t, p).value;
    };
    const auto num = numeric_gradient(f, s.coords, 1e-3);
    // The c = 0 kink sits where a pin pair is exactly perpendicular to a
    // port; central differences with h = 1e-3 µm straddle it only there.
    const double err = relative_error(r.grad, num);
    if (err > 1e-5) {
      bool near_kink = false;
      const auto pos = component_positions(d, s.coords);
      for (const Net& n : d.nets) {
        const NetGeometry g = net_geometry(d, n, pos);
        const BendPenalty bp = bend_penalty(g.p2 - g.p1, g.v1, g.v2, 0.0);
        near_kink |= std::abs(bp.cos1) < 1e-4 || std::abs(bp.cos2) < 1e-4;
      }
      EXPECT_TRUE(near_kink) << "trial " << trial << " error " << err;
      continue;
    }
    ++checked;
    // Fillers belong to no net.
    for (std::size_t i = 2 * s.num_movable; i < s.size(); ++i) EXPECT_EQ(r.grad[i], 0.0);
  }
  EXPECT_GE(checked, 95);
}

TEST(GammaSchedule, Range) {
  EXPECT_DOUBLE_EQ(gamma_schedule(10.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(gamma_schedule(10.0, 1.0), 50.0);
  EXPECT_DOUBLE_EQ(gamma_schedule(10.0, 7.0), 50.0);
  EXPECT_LT(gamma_schedule(10.0, 0.2), gamma_schedule(10.0, 0.3));
}

TEST(Hpwl, SumOfManhattanPinDistances) {
  Design d;
  d.die = {100, 100};
  d.components.push_back(picplace::testing::box("a", 10, 10, {Dir::E}, {0, 0}));
  d.components.push_back(picplace::testing::box("b", 10, 10, {Dir::W}, {30, 20}));
  d.nets.push_back(picplace::testing::net("n", 0, 0, 1, 0));
  finalize_design(d);
  std::vector<Vec2> pos{{0, 0}, {30, 20}};
  EXPECT_DOUBLE_EQ(hpwl(d, pos), 20.0 + 20.0);
}

TEST(Wirelength, ValidateRejectsBadParams) {
  EXPECT_THROW(validate(coswa(0.0)), std::invalid_argument);
  EXPECT_THROW(validate(coswa(1.0, 2.5)), std::invalid_argument);
  EXPECT_THROW(validate(coswa(1.0, 1.4, -0.1)), std::invalid_argument);
  EXPECT_NO_THROW(validate(coswa(1.0)));
}
