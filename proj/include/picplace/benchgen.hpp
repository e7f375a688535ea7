#pragma once

#include "picplace/netlist.hpp"

#include <cstdint>
#include <optional>

namespace picplace {

enum class DieClass : std::uint8_t { S, L };

/// Compact (S) dies target 50% utilisation with a 5 µm bend radius; relaxed
/// (L) dies target 35% with a 10 µm bend radius.
double target_utilization(DieClass c);
double class_bend_radius(DieClass c);

inline constexpr double kMaxUtilization = 0.85;

struct ClementsSpec {
  int modes = 8;
  double mzi_width = 300.0;
  double mzi_height = 50.0;
  double column_pitch = 0.0;  // 0 selects the pitch from the utilisation target
  DieClass size = DieClass::S;
  double terminal_size = 10.0;
  double crossing_size = 10.0;
  std::optional<Die> die;  // explicit override
};

struct ButterflySpec {
  int ports = 8;
  int stages = 0;  // 0 selects log2(ports)
  double coupler_width = 20.0;
  double coupler_height = 10.0;
  std::uint64_t seed = 0;  // 0 keeps the identity input order
  DieClass size = DieClass::S;
  double terminal_size = 10.0;
  double crossing_size = 10.0;
  std::optional<Die> die;
};

/// Rectangular Clements MZI mesh. Movable MZIs carry their ideal grid
/// position so the design can also be used with manual initialisation.
/// Throws std::invalid_argument on an invalid spec or an over-full die.
Design gen_clements(const ClementsSpec& spec);

/// Butterfly network of 2x2 couplers; crossing-heavy by construction.
Design gen_butterfly(const ButterflySpec& spec);

}  // namespace picplace
