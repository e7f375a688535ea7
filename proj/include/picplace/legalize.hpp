#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace picplace {

/// Overlaps thinner than this (µm) are treated as touching.
inline constexpr double kLegalTolerance = 1e-9;

struct Violation {
  enum class Kind : std::uint8_t { Overlap, OutOfDie };
  Kind kind = Kind::Overlap;
  std::size_t a = 0;
  std::size_t b = 0;   // second component for overlaps
  double area = 0.0;   // overlap area for overlaps
  std::string side;    // left/right/bottom/top for boundary violations
};

/// Required gap between two components: the larger of their halos.
double clearance(const Component& a, const Component& b);

/// Every pair closer than its clearance and every component whose body leaves
/// the die. Empty iff the layout is legal.
std::vector<Violation> verify_legal(const Design& design, std::span<const Vec2> positions);

enum class LegalStatus : std::uint8_t { Success, Failure };

struct LegalizeResult {
  std::vector<Vec2> positions;  // every component
  double total_displacement = 0.0;
  double max_displacement = 0.0;
  LegalStatus status = LegalStatus::Failure;
  std::vector<Violation> violations;
  int rounds = 0;
};

/// Two-stage greedy legalization of the movable components starting from the
/// global-placement positions. Fixed components never move.
LegalizeResult legalize(const Design& design, std::span<const Vec2> gp_positions,
                        int max_rounds = 3);

}  // namespace picplace
