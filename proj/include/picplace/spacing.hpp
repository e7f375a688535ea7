#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace picplace {

enum class SpacingVariant : std::uint8_t {
  None,           // no spacing term
  PortInflation,  // halo ∝ ports × bend radius, density side only
  RbendOnly,      // demand = r_bend
  PortCountOnly,  // demand = ½ · P_num · S_crs
  Full,           // demand = P_dens + R_cong
};

struct SpacingParams {
  double lambda = 1.0;
  int refresh_period = 100;
  int refresh_start = 100;
  SpacingVariant variant = SpacingVariant::Full;
  // Penalise clearance *above* the demand, (v·d - S)_+, instead of the
  // deficit (S - v·d)_+.
  bool literal = false;
};

void validate(const SpacingParams& p);

/// True on the iterations at which crossing congestion is re-estimated.
bool is_refresh_iteration(int iteration, const SpacingParams& p);

/// Number of ports on `comp` sharing the direction of `port` (itself included).
int same_direction_ports(const Component& comp, std::size_t port);

/// r_bend + ½ · P_num · S_crs.
double port_density(const Component& comp, std::size_t port, const Tech& tech);

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// True when the segments share a point interior to both, or overlap
/// collinearly over a positive length. Shared endpoints and T-junctions do
/// not count.
bool segments_cross(const Segment& s, const Segment& t);

struct CrossingCount {
  std::size_t total = 0;
  std::vector<std::size_t> per_segment;
};

/// Counts crossing pairs. Uses all-pairs testing up to
/// `kSweepThreshold` segments and an x-sorted sweep with an active list above.
inline constexpr std::size_t kSweepThreshold = 2000;
CrossingCount count_crossings(std::span<const Segment> segments);
CrossingCount count_crossings_sweep(std::span<const Segment> segments);

/// Pin-to-pin segment of every net.
std::vector<Segment> net_segments(const Design& design, std::span<const Vec2> positions);

/// R_cong = #CR_net × S_crs for each net.
std::vector<double> congestion(std::span<const std::size_t> per_net_crossings, const Tech& tech);

/// Per-net spacing demand. `endpoint` is the pin (0 or 1) whose port
/// density attains the max; ties go to pin 0. The endpoint choice depends on
/// port density only, so it is shared by every variant.
struct NetSpacing {
  std::vector<double> demand;
  std::vector<std::uint8_t> endpoint;
  std::vector<double> port_density;  // of the attributed endpoint
  std::vector<std::size_t> crossings;
  std::vector<double> congestion;
};

NetSpacing compute_net_spacing(const Design& design, SpacingVariant variant,
                               std::span<const std::size_t> per_net_crossings = {});

struct NetPenalty {
  double value = 0.0;
  Vec2 grad_endpoint;  // gradient w.r.t. the attributed pin
  Vec2 grad_other;
};

/// Deficit form [(S - v_x·dx)_+]^2 + [(S - v_y·dy)_+]^2 where (dx, dy) points
/// from the attributed pin to the other pin and only the axis of the port
/// direction contributes.
NetPenalty net_spacing_penalty(Vec2 endpoint_pin, Dir endpoint_dir, Vec2 other_pin, double demand,
                               bool literal = false);

struct SpacingResult {
  double value = 0.0;
  std::vector<Vec2> grad;  // per component, already scaled by lambda
};

SpacingResult spacing_penalty(const Design& design, std::span<const Vec2> positions,
                              const NetSpacing& spacing, const SpacingParams& p);

/// Indices of nets whose penalty is positive (deficit form).
std::vector<std::size_t> penalized_nets(const Design& design, std::span<const Vec2> positions,
                                        const NetSpacing& spacing);

/// Halo increment per component: ports on the densest edge × r_bend.
std::vector<double> inflate_for_ports(const Design& design, const Tech& tech);

}  // namespace picplace
