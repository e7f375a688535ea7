#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace picplace {

struct LossModel {
  double propagation_db_per_cm = 2.0;
  double bend_db = 0.01;  // per 90° bend
  double crossing_db = 0.2;
};

void validate(const LossModel& m);

/// Fewest 90° turns of an axis-aligned route that leaves p1 heading v1 and
/// arrives at p2 heading −v2 (into the port). The route must leave and enter
/// with positive-length straight segments.
int predict_bends(Vec2 p1, Dir v1, Vec2 p2, Dir v2);

/// |dx| + |dy| corrected for rounded bends, never below the straight distance.
double estimated_length(Vec2 p1, Vec2 p2, int bends, double bend_radius);

struct MetricsReport {
  std::size_t crossings = 0;
  double hpwl = 0.0;
  double ba_tot = 0.0;  // degrees
  double il_max = 0.0;  // dB
  std::size_t spacing_violations = 0;
  double wall_time = 0.0;  // seconds
  bool il_cyclic = false;  // IL_max fell back to the worst single net
  std::vector<double> net_loss;
  std::vector<int> net_bends;
};

MetricsReport evaluate(const Design& design, std::span<const Vec2> positions,
                       const LossModel& loss = {});

/// Nets whose clearance from the attributed endpoint falls short of the full
/// spacing demand at these positions.
std::size_t spacing_violations(const Design& design, std::span<const Vec2> positions);

/// Longest path over a DAG given as edges (from, to, weight) on `nodes`
/// vertices. Returns false if the graph has a cycle.
bool longest_path(std::size_t nodes, std::span<const std::size_t> from,
                  std::span<const std::size_t> to, std::span<const double> weight,
                  double& out);

std::string metrics_json(const MetricsReport& r);

}  // namespace picplace
