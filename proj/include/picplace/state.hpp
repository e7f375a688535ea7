#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace picplace {

/// Uniformly sized dummy cells that occupy whitespace.
struct FillerSet {
  std::size_t count = 0;
  double width = 0.0;
  double height = 0.0;

  double area() const { return width * height; }
};

/// Optimisation variables. Coordinates are lower-left corners in µm and are
/// stored as four contiguous blocks:
///   [movable x | movable y | filler x | filler y]
struct PlacementState {
  std::size_t num_movable = 0;
  std::size_t num_fillers = 0;
  std::vector<double> coords;
  int iteration = 0;
  std::uint64_t seed = 0;

  PlacementState() = default;
  PlacementState(std::size_t movables, std::size_t fillers)
      : num_movable(movables), num_fillers(fillers), coords(2 * (movables + fillers), 0.0) {}

  std::size_t size() const { return coords.size(); }

  std::size_t movable_x_index(std::size_t i) const { return i; }
  std::size_t movable_y_index(std::size_t i) const { return num_movable + i; }
  std::size_t filler_x_index(std::size_t i) const { return 2 * num_movable + i; }
  std::size_t filler_y_index(std::size_t i) const { return 2 * num_movable + num_fillers + i; }

  Vec2 movable(std::size_t i) const { return {coords[i], coords[num_movable + i]}; }
  Vec2 filler(std::size_t i) const {
    return {coords[filler_x_index(i)], coords[filler_y_index(i)]};
  }
  void set_movable(std::size_t i, Vec2 p) {
    coords[i] = p.x;
    coords[num_movable + i] = p.y;
  }
  void set_filler(std::size_t i, Vec2 p) {
    coords[filler_x_index(i)] = p.x;
    coords[filler_y_index(i)] = p.y;
  }
};

/// Lower-left position of every component: movables from `coords`, fixed
/// components from the design.
std::vector<Vec2> component_positions(const Design& design, std::span<const double> coords);
inline std::vector<Vec2> component_positions(const Design& design, const PlacementState& state) {
  return component_positions(design, state.coords);
}

/// Adds a per-component gradient into the state-layout gradient vector.
/// Entries for fixed components are dropped.
void scatter_gradient(const Design& design, std::span<const Vec2> component_grad,
                      std::span<double> state_grad);

/// Packs the current design positions of all movables into a state with
/// `fillers` (zero-initialised) filler slots.
PlacementState state_from_design(const Design& design, std::size_t fillers = 0);

/// Copies movable positions from the state back into the design.
void apply_state(Design& design, std::span<const double> coords);

/// Serialises `design` with movable positions taken from `state` and an
/// optional `placement_meta` block. Throws std::invalid_argument if the state
/// does not match the design's movable count.
std::string write_placement(const Design& design, const PlacementState& state,
                            const PlacementMeta* meta = nullptr);

}  // namespace picplace
