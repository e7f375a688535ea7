#include "picplace/benchgen.hpp"
#include "picplace/legalize.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace picplace;
using picplace::testing::box;

namespace {

std::vector<Vec2> positions_of(const Design& d) {
  std::vector<Vec2> p;
  for (const Component& c : d.components) p.push_back(c.position);
  return p;
}

Design squares(std::initializer_list<Vec2> at, double size = 1.0, double die = 100.0) {
  Design d;
  d.name = "sq";
  d.die = {die, die};
  int k = 0;
  for (Vec2 p : at) d.components.push_back(box("s" + std::to_string(k++), size, size, {Dir::E}, p));
  finalize_design(d);
  return d;
}

}  // namespace

TEST(VerifyLegal, OverlapArea) {
  const Design d = squares({{0, 0}, {5, 0}}, 10.0);
  const auto v = verify_legal(d, positions_of(d));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::Overlap);
  EXPECT_DOUBLE_EQ(v[0].area, 50.0);
}

TEST(VerifyLegal, OutsideDieNamesSide) {
  const Design d = squares({{-5, 20}, {40, 95}}, 10.0);
  const auto v = verify_legal(d, positions_of(d));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, Violation::Kind::OutOfDie);
  EXPECT_EQ(v[0].side, "left");
  EXPECT_EQ(v[1].side, "top");
}

TEST(VerifyLegal, TouchingIsLegal) {
  const Design d = squares({{0, 0}, {10, 0}, {0, 10}}, 10.0);
  EXPECT_TRUE(verify_legal(d, positions_of(d)).empty());
}

TEST(VerifyLegal, HaloClearance) {
  Design d = squares({{0, 0}, {30, 0}}, 10.0);
  d.components[0].halo = 50;
  EXPECT_EQ(clearance(d.components[0], d.components[1]), 50.0);
  EXPECT_EQ(verify_legal(d, positions_of(d)).size(), 1u);
  std::vector<Vec2> far{{0, 0}, {60, 0}};
  EXPECT_TRUE(verify_legal(d, far).empty());
}

TEST(Legalize, LegalInputUnchanged) {
  const Design d = squares({{0, 0}, {20, 0}, {40, 40}}, 10.0);
  const LegalizeResult r = legalize(d, positions_of(d));
  EXPECT_EQ(r.status, LegalStatus::Success);
  EXPECT_EQ(r.positions, positions_of(d));
  EXPECT_EQ(r.total_displacement, 0.0);
  EXPECT_EQ(r.max_displacement, 0.0);
}

TEST(Legalize, IdenticalUnitSquares) {
  const Design d = squares({{50, 50}, {50, 50}});
  const LegalizeResult r = legalize(d, positions_of(d));
  ASSERT_EQ(r.status, LegalStatus::Success);
  EXPECT_TRUE(verify_legal(d, r.positions).empty());
  EXPECT_NEAR(r.total_displacement, 1.0, 1e-12);
  EXPECT_NEAR(r.max_displacement, 1.0, 1e-12);
}

TEST(Legalize, HaloRespected) {
  Design d = squares({{100, 100}, {105, 100}}, 10.0, 400.0);
  d.components[1].halo = 50;
  const LegalizeResult r = legalize(d, positions_of(d));
  ASSERT_EQ(r.status, LegalStatus::Success);
  EXPECT_TRUE(verify_legal(d, r.positions).empty());
}

TEST(Legalize, FixedNeverMove) {
  Design d = squares({{40, 40}, {42, 41}, {45, 45}}, 10.0);
  d.components[0].fixed = true;
  finalize_design(d);
  const LegalizeResult r = legalize(d, positions_of(d));
  ASSERT_EQ(r.status, LegalStatus::Success);
  EXPECT_EQ(r.positions[0], (Vec2{40, 40}));
  EXPECT_TRUE(verify_legal(d, r.positions).empty());
}

TEST(Legalize, InfeasibleFails) {
  const Design d = squares({{0, 0}, {1, 1}}, 8.0, 10.0);
  const LegalizeResult r = legalize(d, positions_of(d));
  EXPECT_EQ(r.status, LegalStatus::Failure);
  EXPECT_FALSE(r.violations.empty());
}

TEST(Legalize, RandomPilesBecomeLegal) {
  Rng rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    Design d = picplace::testing::random_design(rng, 5 + rng.below(20), 0, 400.0);
    // Pile everything near the centre.
    std::vector<Vec2> gp = positions_of(d);
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] = {rng.uniform(150, 200), rng.uniform(150, 200)};
    const LegalizeResult r = legalize(d, gp);
    ASSERT_EQ(r.status, LegalStatus::Success) << "trial " << trial;
    EXPECT_TRUE(verify_legal(d, r.positions).empty());
    double total = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const double m = std::abs(r.positions[i].x - gp[i].x) + std::abs(r.positions[i].y - gp[i].y);
      total += m;
      worst = std::max(worst, m);
    }
    EXPECT_NEAR(r.total_displacement, total, 1e-9 * (1 + total));
    EXPECT_NEAR(r.max_displacement, worst, 1e-9 * (1 + worst));

    // A legal result is a fixed point.
    const LegalizeResult again = legalize(d, r.positions);
    EXPECT_EQ(again.positions, r.positions);
    EXPECT_EQ(again.total_displacement, 0.0);
  }
}

TEST(Legalize, GridClementsIsLegal) {
  ClementsSpec s;
  s.modes = 8;
  const Design d = gen_clements(s);
  EXPECT_TRUE(verify_legal(d, positions_of(d)).empty());
}
