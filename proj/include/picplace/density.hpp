#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"
#include "picplace/state.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace picplace {

struct DensityParams {
  int grid = 0;                 // bins per side; 0 picks one from the design size
  double target_density = 1.0;  // τ_d
  double rho = 2000.0;          // quadratic coefficient of the augmented term
  double overflow_stop = 0.07;
};

void validate(const DensityParams& p);

/// Next power of two >= 2·sqrt(count), clamped to [64, 1024].
int auto_grid_size(std::size_t count);

/// Bins are indexed row-major: bin (ix, iy) lives at iy·nx + ix.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double bin_w = 0.0;
  double bin_h = 0.0;

  static GridSpec for_die(const Die& die, int m) {
    return {m, m, die.width / m, die.height / m};
  }
  std::size_t bins() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double bin_area() const { return bin_w * bin_h; }
  double bin_size() const { return std::sqrt(bin_w * bin_h); }
};

/// A rectangle stamped into the grid with its overlap area scaled by `weight`.
struct Charge {
  Rect rect;
  double weight = 1.0;
};

/// Expands a rectangle narrower or shorter than one bin to bin size about its
/// center, scaling the weight so the stamped mass stays the same.
Charge make_charge(const Rect& r, const GridSpec& g);

/// Adds weight·overlap/bin_area of the charge into every covered bin. Parts
/// outside the grid are dropped.
void stamp(const Charge& c, const GridSpec& g, std::span<double> map);

/// Σ max(0, ρ_b − τ)·A_bin / movable_area.
double overflow(std::span<const double> map, const GridSpec& g, double target,
                double movable_area);

/// Solves −∇²ψ = f − mean(f) on a cell-centred grid with zero normal
/// derivative at the boundary. The eigenvalues are those of the 5-point
/// Laplacian, so the discrete operator reproduces the source to round-off.
class PoissonSolver {
 public:
  PoissonSolver(int nx, int ny, double hx, double hy);
  ~PoissonSolver();
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  void solve(std::span<const double> source, std::span<double> psi);
  /// ξ = −∇ψ of the cosine interpolant of the last solution, sampled at bin
  /// centres.
  void field(std::span<double> ex, std::span<double> ey);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct DensityGrid {
  GridSpec spec;
  std::vector<double> density;  // all charges, fillers included
  std::vector<double> psi;
  std::vector<double> field_x;
  std::vector<double> field_y;
};

/// Dimensionless filler footprint chosen for a design.
FillerSet make_fillers(const Design& design, const DensityParams& p);

struct DensityTerm {
  double energy = 0.0;       // ½ Σ q_b ψ_b, µm⁴
  double D = 0.0;            // energy / movable_area²
  std::vector<double> grad;  // ∂D/∂coords in state layout
  double overflow = 0.0;
};

/// Binning, Poisson solve and energy gradient for one design. `extra_halo`
/// (per component, may be empty) inflates density footprints beyond the
/// design halos.
class DensityModel {
 public:
  DensityModel(const Design& design, const FillerSet& fillers, const DensityParams& p,
               std::span<const double> extra_halo = {});

  DensityTerm evaluate(std::span<const double> coords);
  /// Overflow of movable and fixed components only, without a Poisson solve.
  double overflow_at(std::span<const double> coords) const;
  void compute_field();

  const GridSpec& spec() const { return grid_.spec; }
  const DensityGrid& grid() const { return grid_; }
  double movable_area() const { return movable_area_; }
  Rect footprint(std::size_t comp, Vec2 pos) const;

 private:
  const Design& design_;
  FillerSet fillers_;
  DensityParams params_;
  std::vector<double> halo_;
  double movable_area_ = 0.0;
  DensityGrid grid_;
  std::vector<double> own_;  // non-filler map for overflow
  std::unique_ptr<PoissonSolver> solver_;
};

struct AugmentedDensity {
  double value = 0.0;
  std::vector<double> grad;
};

/// λ_D(D + ½ρD²) and its gradient λ_D(1 + ρD)∇D.
AugmentedDensity augmented_density(const DensityTerm& term, double lambda, double rho);

/// Multiplicative density weight with a growth cap over a sliding window.
class DensityWeight {
 public:
  DensityWeight() = default;
  DensityWeight(double initial, double factor = 1.05, double window_cap = 10.0, int window = 100);

  /// ‖∇WL‖₁ / ((1 + ρD₀)‖∇D‖₁), or 1 when either norm vanishes.
  static double balance(double wl_grad_l1, double d_grad_l1, double D0, double rho);

  double value() const { return history_.empty() ? 0.0 : history_.back(); }
  void advance();

 private:
  double factor_ = 1.05;
  double cap_ = 10.0;
  int window_ = 100;
  std::vector<double> history_;
};

}  // namespace picplace
