#pragma once

#include "picplace/geometry.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace picplace {

/// Raised for any schema or semantic violation in a netlist document.
/// `path()` points at the offending node, e.g. `nets[3].pins[1].port`.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct Die {
  double width = 0.0;
  double height = 0.0;

  Rect rect() const { return {0.0, 0.0, width, height}; }
  double area() const { return width * height; }
};

struct Tech {
  double bend_radius = 5.0;
  double crossing_size = 10.0;
  double waveguide_width = 0.5;
};

struct Port {
  std::string name;
  Vec2 offset;  // relative to the owning component's lower-left corner
  Dir dir = Dir::E;
};

struct Component {
  std::string name;
  std::string cell;
  double width = 0.0;
  double height = 0.0;
  Vec2 position;  // lower-left corner
  bool fixed = false;
  bool has_position = false;
  double halo = 0.0;
  std::vector<Port> ports;

  Rect rect() const { return Rect::from_corner(position.x, position.y, width, height); }
  Rect rect_at(Vec2 p) const { return Rect::from_corner(p.x, p.y, width, height); }
  double area() const { return width * height; }
  std::optional<std::size_t> find_port(std::string_view port_name) const;
};

struct PinRef {
  std::size_t comp = 0;
  std::size_t port = 0;

  friend bool operator==(const PinRef&, const PinRef&) = default;
};

struct Net {
  std::string name;
  std::array<PinRef, 2> pins;
  double weight = 1.0;
};

enum class GroupKind : std::uint8_t {
  AlignLeft,
  AlignXCenter,
  AlignYCenter,
  UniformX,
  UniformY,
};

constexpr Axis group_axis(GroupKind k) {
  switch (k) {
    case GroupKind::AlignLeft:
    case GroupKind::AlignXCenter:
    case GroupKind::UniformX: return Axis::X;
    case GroupKind::AlignYCenter:
    case GroupKind::UniformY: return Axis::Y;
  }
  return Axis::X;
}

constexpr bool is_alignment(GroupKind k) {
  return k == GroupKind::AlignLeft || k == GroupKind::AlignXCenter ||
         k == GroupKind::AlignYCenter;
}

struct ConstraintGroup {
  GroupKind kind = GroupKind::AlignLeft;
  std::vector<std::size_t> members;  // component indices
};

struct PlacementMeta {
  int iterations = 0;
  double final_overflow = 0.0;
  std::uint64_t seed = 0;
};

struct Design {
  std::string name;
  Die die;
  Tech tech;
  Axis signal_flow = Axis::X;
  std::vector<Component> components;
  std::vector<Net> nets;
  std::vector<ConstraintGroup> groups;
  std::optional<PlacementMeta> meta;

  /// Component indices of the movable components, in document order.
  /// Filled in by `finalize_design`.
  std::vector<std::size_t> movable;

  std::optional<std::size_t> find_component(std::string_view comp_name) const;

  Vec2 pin_position(const PinRef& pin) const {
    const auto& c = components[pin.comp];
    return c.position + c.ports[pin.port].offset;
  }
  Dir pin_dir(const PinRef& pin) const { return components[pin.comp].ports[pin.port].dir; }
  double movable_area() const;
  double total_area() const;
};

/// Checks every structural invariant of a design and fills the derived
/// indices. Throws ParseError naming the offending element.
void finalize_design(Design& design);

Design parse_design(std::string_view yaml_text);
Design load_design(const std::filesystem::path& path);

/// Serialises the design with all component positions taken from
/// `design.components[*].position`. Doubles are written with 17 significant
/// digits, so `parse_design(write_design(d))` reproduces every coordinate
/// bit-exactly.
std::string write_design(const Design& design);

std::string_view group_kind_name(GroupKind kind);

}  // namespace picplace
