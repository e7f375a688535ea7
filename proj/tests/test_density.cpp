#include "picplace/density.hpp"
#include "picplace/state.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace picplace;
using picplace::testing::box;
using picplace::testing::numeric_gradient;
using picplace::testing::relative_error;

namespace {

// −∇² with the 5-point stencil and mirrored ghost cells (zero normal flux).
std::vector<double> neumann_laplacian(std::span<const double> psi, int nx, int ny, double hx,
                                      double hy) {
  std::vector<double> out(psi.size());
  auto at = [&](int ix, int iy) {
    ix = std::clamp(ix, 0, nx - 1);
    iy = std::clamp(iy, 0, ny - 1);
    return psi[static_cast<std::size_t>(iy) * nx + ix];
  };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double c = at(ix, iy);
      const double lx = (at(ix - 1, iy) - 2 * c + at(ix + 1, iy)) / (hx * hx);
      const double ly = (at(ix, iy - 1) - 2 * c + at(ix, iy + 1)) / (hy * hy);
      out[static_cast<std::size_t>(iy) * nx + ix] = -(lx + ly);
    }
  }
  return out;
}

Design die_with(double w, double h, std::vector<Component> comps) {
  Design d;
  d.name = "density";
  d.die = {w, h};
  d.components = std::move(comps);
  finalize_design(d);
  return d;
}

}  // namespace

TEST(Binning, OneBinExactly) {
  const GridSpec g = GridSpec::for_die({80, 80}, 8);
  std::vector<double> map(g.bins(), 0.0);
  stamp(make_charge(Rect::from_corner(20, 30, 10, 10), g), g, map);
  for (std::size_t b = 0; b < map.size(); ++b) {
    EXPECT_NEAR(map[b], b == 3 * 8 + 2 ? 1.0 : 0.0, 1e-15) << b;
  }
}

TEST(Binning, StraddlingTwoBins) {
  const GridSpec g = GridSpec::for_die({80, 80}, 8);
  std::vector<double> map(g.bins(), 0.0);
  stamp(make_charge(Rect::from_corner(25, 30, 10, 10), g), g, map);
  EXPECT_NEAR(map[3 * 8 + 2], 0.5, 1e-15);
  EXPECT_NEAR(map[3 * 8 + 3], 0.5, 1e-15);
  EXPECT_NEAR(std::accumulate(map.begin(), map.end(), 0.0), 1.0, 1e-15);
}

TEST(Binning, SmallChargeKeepsItsMass) {
  const GridSpec g = GridSpec::for_die({80, 80}, 8);
  const Charge c = make_charge(Rect::from_corner(41, 41, 2, 3), g);
  EXPECT_NEAR(c.rect.width(), 10.0, 1e-12);
  EXPECT_NEAR(c.rect.height(), 10.0, 1e-12);
  EXPECT_NEAR(c.weight * c.rect.area(), 6.0, 1e-12);
}

TEST(Binning, MassConservation) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const double W = rng.uniform(100, 1000), H = rng.uniform(100, 1000);
    const GridSpec g = GridSpec::for_die({W, H}, 1 << (3 + rng.below(4)));
    std::vector<double> map(g.bins(), 0.0);
    double mass = 0.0;
    for (int k = 0; k < 40; ++k) {
      const double w = rng.uniform(0.5, W / 3), h = rng.uniform(0.5, H / 3);
      // Keep the expanded charge inside the die so nothing is clipped.
      const double ew = std::max(w, g.bin_w), eh = std::max(h, g.bin_h);
      const double cx = rng.uniform(ew / 2, W - ew / 2), cy = rng.uniform(eh / 2, H - eh / 2);
      stamp(make_charge({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}, g), g, map);
      mass += w * h;
    }
    const double binned = std::accumulate(map.begin(), map.end(), 0.0) * g.bin_area();
    EXPECT_NEAR(binned, mass, 1e-6 * mass);
  }
}

TEST(Poisson, DiscreteLaplacianReproducesSource) {
  Rng rng(42);
  for (auto [nx, ny] : {std::pair{8, 8}, std::pair{32, 16}, std::pair{64, 64}}) {
    const double hx = rng.uniform(1, 10), hy = rng.uniform(1, 10);
    PoissonSolver solver(nx, ny, hx, hy);
    std::vector<double> f(static_cast<std::size_t>(nx) * ny), psi(f.size());
    for (double& v : f) v = rng.uniform(0.0, 3.0);
    solver.solve(f, psi);
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / f.size();
    const auto lap = neumann_laplacian(psi, nx, ny, hx, hy);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      num += (lap[k] - (f[k] - mean)) * (lap[k] - (f[k] - mean));
      den += (f[k] - mean) * (f[k] - mean);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-6) << nx << "x" << ny;
    EXPECT_NEAR(std::accumulate(psi.begin(), psi.end(), 0.0), 0.0, 1e-9 * f.size());
  }
}

TEST(Poisson, UniformDensityHasNoField) {
  PoissonSolver solver(16, 16, 2.0, 3.0);
  std::vector<double> f(256, 0.7), psi(256), ex(256), ey(256);
  solver.solve(f, psi);
  solver.field(ex, ey);
  for (std::size_t k = 0; k < f.size(); ++k) {
    EXPECT_NEAR(psi[k], 0.0, 1e-12);
    EXPECT_NEAR(ex[k], 0.0, 1e-12);
    EXPECT_NEAR(ey[k], 0.0, 1e-12);
  }
}

TEST(Poisson, SingleCosineModeField) {
  // A cosine eigenvector of the discrete operator: ψ = f/λ and the field is
  // the analytic derivative of that cosine, sampled at bin centres.
  const int nx = 32, ny = 16;
  const double hx = 2.5, hy = 4.0, lx = nx * hx;
  PoissonSolver solver(nx, ny, hx, hy);
  for (int u : {1, 3, 7}) {
    std::vector<double> f(static_cast<std::size_t>(nx) * ny), psi(f.size()), ex(f.size()), ey(f.size());
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        f[static_cast<std::size_t>(iy) * nx + ix] = std::cos(std::numbers::pi * u * (ix + 0.5) / nx);
    solver.solve(f, psi);
    solver.field(ex, ey);
    const double lam = (2.0 - 2.0 * std::cos(std::numbers::pi * u / nx)) / (hx * hx);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const std::size_t k = static_cast<std::size_t>(iy) * nx + ix;
        const double x = (ix + 0.5) * hx;
        EXPECT_NEAR(psi[k], f[k] / lam, 1e-9);
        const double expect = std::numbers::pi * u / lx * std::sin(std::numbers::pi * u * x / lx) / lam;
        EXPECT_NEAR(ex[k], expect, 1e-9);
        EXPECT_NEAR(ey[k], 0.0, 1e-9);
      }
    }
  }
}

TEST(Poisson, CentredChargeIsPointSymmetric) {
  const int n = 32;
  PoissonSolver solver(n, n, 1.0, 1.0);
  std::vector<double> f(n * n, 0.0), psi(f.size()), ex(f.size()), ey(f.size());
  for (int iy = n / 2 - 2; iy < n / 2 + 2; ++iy)
    for (int ix = n / 2 - 2; ix < n / 2 + 2; ++ix) f[iy * n + ix] = 1.0;
  solver.solve(f, psi);
  solver.field(ex, ey);
  double sx = 0.0, sy = 0.0, scale = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int k = iy * n + ix, m = (n - 1 - iy) * n + (n - 1 - ix);
      EXPECT_NEAR(psi[k], psi[m], 1e-9);
      EXPECT_NEAR(ex[k], -ex[m], 1e-9);
      EXPECT_NEAR(ey[k], -ey[m], 1e-9);
      sx += ex[k];
      sy += ey[k];
      scale = std::max({scale, std::abs(ex[k]), std::abs(ey[k])});
    }
  }
  // The field points away from the charge.
  EXPECT_GT(ex[(n / 2) * n + n / 2 + 3], 0.0);
  EXPECT_LT(ex[(n / 2) * n + n / 2 - 4], 0.0);
  // Zero mean holds for point-symmetric sources.
  EXPECT_NEAR(sx, 0.0, 1e-9 * scale * n * n);
  EXPECT_NEAR(sy, 0.0, 1e-9 * scale * n * n);
}

TEST(DensityTerm, GradientMatchesFiniteDifferences) {
  Rng rng(43);
  DensityParams p;
  p.grid = 8;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Component> comps;
    for (int k = 0; k < 5; ++k) {
      const double w = rng.uniform(12, 60), h = rng.uniform(12, 60);
      comps.push_back(box("c" + std::to_string(k), w, h, {Dir::E},
                          {rng.uniform(0, 160 - w), rng.uniform(0, 160 - h)}));
    }
    const Design d = die_with(160, 160, comps);
    DensityModel model(d, {}, p);
    const PlacementState s = state_from_design(d);
    const DensityTerm t = model.evaluate(s.coords);
    auto f = [&](std::span<const double> x) { return model.evaluate(x).D; };
    const auto num = numeric_gradient(f, s.coords, 1e-4);
    EXPECT_LT(relative_error(t.grad, num), 1e-2) << "trial " << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 20);
}

TEST(DensityTerm, FillerGradientMatchesFiniteDifferences) {
  Rng rng(44);
  DensityParams p;
  p.grid = 16;
  std::vector<Component> comps;
  for (int k = 0; k < 4; ++k) comps.push_back(box("c" + std::to_string(k), 30, 20, {Dir::E}, {50.3 + 10 * k, 60.7 + 7 * k}));
  const Design d = die_with(200, 200, comps);
  const FillerSet fillers{6, 15, 35};
  DensityModel model(d, fillers, p);
  PlacementState s = state_from_design(d, fillers.count);
  for (std::size_t f = 0; f < fillers.count; ++f) s.set_filler(f, {rng.uniform(0, 185), rng.uniform(0, 165)});
  const DensityTerm t = model.evaluate(s.coords);
  auto fn = [&](std::span<const double> x) { return model.evaluate(x).D; };
  EXPECT_LT(relative_error(t.grad, numeric_gradient(fn, s.coords, 1e-4)), 1e-2);
}

TEST(DensityTerm, EnergyDecreasesAlongNegativeGradient) {
  Rng rng(45);
  DensityParams p;
  p.grid = 16;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Component> comps;
    for (int k = 0; k < 6; ++k) comps.push_back(box("c" + std::to_string(k), 25, 25, {Dir::E}, {rng.uniform(70, 100), rng.uniform(70, 100)}));
    const Design d = die_with(200, 200, comps);
    DensityModel model(d, {}, p);
    PlacementState s = state_from_design(d);
    const DensityTerm t = model.evaluate(s.coords);
    double gn = 0.0;
    for (double g : t.grad) gn = std::max(gn, std::abs(g));
    ASSERT_GT(gn, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) s.coords[i] -= 0.05 / gn * t.grad[i];
    EXPECT_LT(model.evaluate(s.coords).D, t.D);
  }
}

TEST(AugmentedDensity, Reductions) {
  DensityTerm t;
  t.D = 0.3;
  t.grad = {1.0, -2.0, 0.5};
  const AugmentedDensity r0 = augmented_density(t, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(r0.value, 2.0 * 0.3);
  EXPECT_DOUBLE_EQ(r0.grad[1], -4.0);
  const AugmentedDensity r = augmented_density(t, 2.0, 10.0);
  EXPECT_DOUBLE_EQ(r.value, 2.0 * (0.3 + 0.5 * 10.0 * 0.09));
  EXPECT_DOUBLE_EQ(r.grad[0], 2.0 * (1.0 + 10.0 * 0.3));
  const AugmentedDensity z = augmented_density(t, 0.0, 2000.0);
  EXPECT_EQ(z.value, 0.0);
  for (double g : z.grad) EXPECT_EQ(g, 0.0);
}

TEST(Overflow, Examples) {
  const GridSpec g = GridSpec::for_die({80, 80}, 8);
  {
    // Half-overlapped 20×20 pair: the shared column holds density 2.
    std::vector<double> map(g.bins(), 0.0);
    stamp(make_charge(Rect::from_corner(0, 0, 20, 20), g), g, map);
    stamp(make_charge(Rect::from_corner(10, 0, 20, 20), g), g, map);
    EXPECT_NEAR(overflow(map, g, 1.0, 800.0), 0.25, 1e-12);
  }
  {
    std::vector<double> map(g.bins(), 0.0);
    for (int k = 0; k < 100; ++k) stamp(make_charge(Rect::from_corner(30, 30, 10, 10), g), g, map);
    EXPECT_NEAR(overflow(map, g, 1.0, 100 * 100.0), 0.99, 1e-12);
  }
  {
    std::vector<double> map(g.bins(), 0.0);
    for (int k = 0; k < 4; ++k) stamp(make_charge(Rect::from_corner(20.0 * k, 0, 10, 10), g), g, map);
    EXPECT_EQ(overflow(map, g, 1.0, 400.0), 0.0);
  }
}

TEST(Overflow, FillersAreExcluded) {
  DensityParams p;
  p.grid = 8;
  const Design d = die_with(80, 80, {box("a", 10, 10, {Dir::E}, {0, 0})});
  const FillerSet fillers{3, 10, 10};
  DensityModel model(d, fillers, p);
  PlacementState s = state_from_design(d, 3);
  for (std::size_t f = 0; f < 3; ++f) s.set_filler(f, {0, 0});
  EXPECT_EQ(model.evaluate(s.coords).overflow, 0.0);
  EXPECT_EQ(model.overflow_at(s.coords), 0.0);
}

TEST(Fillers, ZeroWhitespace) {
  const Design d = die_with(20, 10, {box("a", 10, 10, {Dir::E}, {0, 0}), box("b", 10, 10, {Dir::W}, {10, 0})});
  EXPECT_EQ(make_fillers(d, DensityParams{}).count, 0u);
}

TEST(Fillers, TallForHorizontalFlow) {
  std::vector<Component> comps;
  for (int k = 0; k < 5; ++k) comps.push_back(box("c" + std::to_string(k), 40, 20, {Dir::E}));
  const Design d = die_with(400, 400, comps);
  const FillerSet f = make_fillers(d, DensityParams{});
  ASSERT_GT(f.count, 0u);
  EXPECT_NEAR(f.height / f.width, 2.0, 1e-12);
  EXPECT_NEAR(f.count * f.area(), 400.0 * 400.0 - 5 * 800.0, 1e-6);
  EXPECT_NEAR(f.area(), 0.25 * 800.0, 0.25 * 800.0 * 0.01);
}

TEST(Fillers, AspectIsClamped) {
  std::vector<Component> comps;
  for (int k = 0; k < 3; ++k) comps.push_back(box("c" + std::to_string(k), 5, 40, {Dir::E}));
  const Design d = die_with(300, 300, comps);
  const FillerSet f = make_fillers(d, DensityParams{});
  EXPECT_NEAR(f.height / f.width, 5.0, 1e-12);
}

TEST(Fillers, HalosAndTargetShrinkWhitespace) {
  Component a = box("a", 10, 10, {Dir::E});
  a.halo = 5;
  const Design d = die_with(100, 100, {a});
  DensityParams p;
  p.target_density = 0.5;
  const FillerSet f = make_fillers(d, p);
  EXPECT_NEAR(f.count * f.area(), 0.5 * 10000.0 - 400.0, 1e-6);
}

TEST(DensityWeight, Schedule) {
  EXPECT_DOUBLE_EQ(DensityWeight::balance(10.0, 4.0, 0.5, 2.0), 10.0 / (2.0 * 4.0));
  EXPECT_EQ(DensityWeight::balance(0.0, 4.0, 0.0, 2.0), 1.0);
  EXPECT_EQ(DensityWeight::balance(1.0, 0.0, 0.0, 2.0), 1.0);

  DensityWeight w(1.0);
  w.advance();
  EXPECT_DOUBLE_EQ(w.value(), 1.05);
  // Growth over any 100-iteration window never exceeds 10×.
  DensityWeight fast(1.0, 1.2);
  std::vector<double> h{fast.value()};
  for (int k = 0; k < 400; ++k) {
    fast.advance();
    h.push_back(fast.value());
  }
  for (std::size_t k = 100; k < h.size(); ++k) EXPECT_LE(h[k], 10.0 * h[k - 100] * (1 + 1e-12));
  // 1.2^13 > 10, so the cap holds the weight flat until the window slides.
  EXPECT_GT(h[12], h[11]);
  EXPECT_DOUBLE_EQ(h[13], 10.0);
  EXPECT_DOUBLE_EQ(h[50], 10.0);
}

TEST(Density, GridSize) {
  EXPECT_EQ(auto_grid_size(10), 64);
  EXPECT_EQ(auto_grid_size(5000), 256);
  EXPECT_EQ(auto_grid_size(100000000), 1024);
  DensityParams p;
  p.grid = 12;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.grid = 0;
  p.target_density = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
}
