#include "picplace/state.hpp"

#include <stdexcept>

namespace picplace {

std::vector<Vec2> component_positions(const Design& design, std::span<const double> coords) {
  const std::size_t n = design.movable.size();
  if (coords.size() < 2 * n) throw std::invalid_argument("state smaller than movable set");
  std::vector<Vec2> pos;
  pos.reserve(design.components.size());
  for (const Component& c : design.components) pos.push_back(c.position);
  for (std::size_t k = 0; k < n; ++k) pos[design.movable[k]] = {coords[k], coords[n + k]};
  return pos;
}

void scatter_gradient(const Design& design, std::span<const Vec2> component_grad,
                      std::span<double> state_grad) {
  const std::size_t n = design.movable.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 g = component_grad[design.movable[k]];
    state_grad[k] += g.x;
    state_grad[n + k] += g.y;
  }
}

PlacementState state_from_design(const Design& design, std::size_t fillers) {
  PlacementState s(design.movable.size(), fillers);
  for (std::size_t k = 0; k < design.movable.size(); ++k) {
    s.set_movable(k, design.components[design.movable[k]].position);
  }
  return s;
}

void apply_state(Design& design, std::span<const double> coords) {
  const std::size_t n = design.movable.size();
  if (coords.size() < 2 * n) throw std::invalid_argument("state smaller than movable set");
  for (std::size_t k = 0; k < n; ++k) {
    Component& c = design.components[design.movable[k]];
    c.position = {coords[k], coords[n + k]};
    c.has_position = true;
  }
}

std::string write_placement(const Design& design, const PlacementState& state,
                            const PlacementMeta* meta) {
  if (state.num_movable != design.movable.size() ||
      state.coords.size() != 2 * (state.num_movable + state.num_fillers)) {
    throw std::invalid_argument("placement state has " + std::to_string(state.num_movable) +
                                " movables, design has " + std::to_string(design.movable.size()));
  }
  Design out = design;
  apply_state(out, state.coords);
  if (meta) out.meta = *meta;
  return write_design(out);
}

}  // namespace picplace
