#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"
#include "picplace/state.hpp"

#include <span>
#include <string>
#include <vector>

namespace picplace {

struct ProjectionSchedule {
  double s0 = 0.05;
  double sT = 1.0;
  int T = 1500;
};

void validate(const ProjectionSchedule& s);

/// s0 + (sT - s0)(1 - cos(πt/T))/2, with t clamped to [0, T].
double sharpness(int t, const ProjectionSchedule& s);

/// Target of the aligned coordinate. `values` are left edges for AlignLeft
/// and centres otherwise.
double alignment_target(GroupKind kind, std::span<const double> values);

/// Evenly spaced targets between the extreme centres, assigned by rank of
/// the current centre. Equal centres are ordered by `names`. Returns the
/// input unchanged when the extremes coincide.
std::vector<double> uniform_targets(std::span<const double> centers,
                                    std::span<const std::string> names);

/// Footprint including the halo on all four sides.
inline Rect effective_rect(const Component& c, Vec2 pos) { return c.rect_at(pos).inflated(c.halo); }

class Projector {
 public:
  Projector(const Design& design, const ProjectionSchedule& schedule, const FillerSet& fillers = {});

  /// Projects every group with strength s_t, then clamps movables and
  /// fillers into the die.
  void apply(std::span<double> coords, int t) const { apply_with(coords, sharpness(t, schedule_)); }
  void apply_with(std::span<double> coords, double s) const;
  void clamp(std::span<double> coords) const;

  const ProjectionSchedule& schedule() const { return schedule_; }

 private:
  const Design& design_;
  ProjectionSchedule schedule_;
  FillerSet fillers_;
  std::vector<std::ptrdiff_t> slot_;  // component index -> movable slot or -1
};

/// Largest deviation from the target shape over all groups: spread of the
/// aligned coordinate for alignment groups, spread of adjacent gaps for
/// uniform groups.
double max_group_error(const Design& design, std::span<const double> coords);

}  // namespace picplace
