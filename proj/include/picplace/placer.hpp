#pragma once

#include "picplace/constraints.hpp"
#include "picplace/density.hpp"
#include "picplace/netlist.hpp"
#include "picplace/optimizer.hpp"
#include "picplace/spacing.hpp"
#include "picplace/state.hpp"
#include "picplace/wirelength.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace picplace {

enum class InitMode : std::uint8_t { CenterRandom, Manual };

struct RunConfig {
  std::uint64_t seed = 1;
  InitMode init = InitMode::CenterRandom;
  WirelengthParams wirelength;
  double gamma0_bins = 0.1;
  SpacingParams spacing;
  DensityParams density;
  bool density_enabled = true;
  ProjectionSchedule projection;  // T follows optimizer.max_iters
  OptimizerParams optimizer;
  int snapshot_every = 10;
};

void validate(const RunConfig& c);

enum class PlaceStatus : std::uint8_t { Success, MaxIterations, Diverged };
std::string_view status_name(PlaceStatus s);

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;
  double wirelength = 0.0;
  double spacing = 0.0;
  double density = 0.0;  // augmented term
  double overflow = 0.0;
  double hpwl = 0.0;
  double gamma = 0.0;
  double lambda_density = 0.0;
  double sharpness = 0.0;
  std::optional<std::size_t> crossings;  // set at spacing refreshes
};

struct Snapshot {
  int iteration = 0;
  std::vector<double> coords;
};

struct PlaceResult {
  PlacementState state;
  FillerSet fillers;
  PlaceStatus status = PlaceStatus::MaxIterations;
  int iterations = 0;
  double final_overflow = 0.0;
  std::vector<TraceRecord> trace;
  std::vector<Snapshot> snapshots;
  std::string message;
};

struct ObjectiveBreakdown {
  double value = 0.0;
  double wirelength = 0.0;
  double spacing = 0.0;
  double density = 0.0;
  double overflow = 0.0;
};

/// Holds the schedules and caches of one global placement run.
class Placer {
 public:
  Placer(const Design& design, const RunConfig& config);

  PlacementState initialize() const;

  /// Σ cosWA + λ_NS Σ NS + 𝒟 at `coords` under the current schedules.
  /// Fillers receive only the density gradient.
  ObjectiveBreakdown objective(std::span<const double> coords, std::span<double> grad);

  PlaceResult run();

  // Schedule state, exposed for tests.
  double gamma() const { return wl_.gamma; }
  void set_gamma(double g) { wl_.gamma = g; }
  double lambda_density() const { return lambda_d_; }
  void set_lambda_density(double l) { lambda_d_ = l; }
  void refresh_spacing(std::span<const double> coords);
  const NetSpacing& net_spacing() const { return spacing_cache_; }
  const FillerSet& fillers() const { return fillers_; }
  DensityModel* density_model() { return density_.get(); }
  double bin_size() const { return bin_size_; }

 private:
  const Design& design_;
  RunConfig cfg_;
  FillerSet fillers_;
  std::unique_ptr<DensityModel> density_;
  Projector projector_;
  WirelengthParams wl_;
  double lambda_d_ = 0.0;
  double bin_size_ = 1.0;
  NetSpacing spacing_cache_;
  ObjectiveBreakdown last_;
  std::size_t last_crossings_ = 0;
};

PlaceResult run_global(const Design& design, const RunConfig& config);

}  // namespace picplace
