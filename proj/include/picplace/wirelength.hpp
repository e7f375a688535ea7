#pragma once

#include "picplace/geometry.hpp"
#include "picplace/netlist.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace picplace {

enum class WirelengthModel : std::uint8_t { CosWA, WA, LSE, Quadratic };

struct WirelengthParams {
  double gamma = 1.0;   // smoothing length, µm
  double alpha = 1.4;   // span exponent in [1, 2]
  double margin = 0.0;  // angle margin c in [0, 1]
  WirelengthModel model = WirelengthModel::CosWA;
  // Evaluate the second port's angle against +w instead of -w.
  bool theta2_raw = false;
};

/// Throws std::invalid_argument if gamma <= 0, alpha outside [1,2] or margin
/// outside [0,1].
void validate(const WirelengthParams& p);

/// Below this pin separation the bend penalty and its gradient are zero.
inline constexpr double kDegenerateSeparation = 1e-6;

/// Port-orientation penalty of a two-pin net with pin-to-pin vector `w`.
/// `first`/`second` are the per-port terms [(c - cos θ_i)_+]^2; `value` is
/// their sum and the gradients are with respect to `w`.
struct BendPenalty {
  double value = 0.0;
  double cos1 = 1.0;
  double cos2 = 1.0;
  double first = 0.0;
  double second = 0.0;
  Vec2 grad_first;
  Vec2 grad_second;

  Vec2 grad() const { return grad_first + grad_second; }
};

BendPenalty bend_penalty(Vec2 w, Dir v1, Dir v2, double margin, bool theta2_raw = false);

/// Pin world coordinates and port orientations of a two-pin net.
struct NetGeometry {
  Vec2 p1;
  Vec2 p2;
  Dir v1 = Dir::E;
  Dir v2 = Dir::W;
};

/// Cost of one net plus its gradient with respect to both pin positions.
struct NetCost {
  double cost = 0.0;
  Vec2 grad1;
  Vec2 grad2;
};

/// Two-pin weighted-average span d*tanh(d/(2γ)) and its derivative with
/// respect to d = b - a, evaluated through max-shifted exponentials.
struct SmoothSpan {
  double value = 0.0;
  double slope = 0.0;
};
SmoothSpan wa_span(double a, double b, double gamma);
SmoothSpan lse_span(double a, double b, double gamma);

NetCost coswa_net(const NetGeometry& net, const WirelengthParams& p);
NetCost baseline_net(const NetGeometry& net, const WirelengthParams& p);
NetCost net_wirelength(const NetGeometry& net, const WirelengthParams& p);

NetGeometry net_geometry(const Design& design, const Net& net, std::span<const Vec2> positions);

struct WirelengthResult {
  double value = 0.0;
  std::vector<Vec2> grad;  // per component
};

/// Σ_e w_e · cost_e over all nets, with per-component gradient (including
/// fixed components; callers drop those when scattering into a state).
WirelengthResult total_wirelength(const Design& design, std::span<const Vec2> positions,
                                  const WirelengthParams& p);

/// State-layout variant: gradient has 2·(movables + fillers) entries with
/// zeros in the filler blocks.
struct StateGradient {
  double value = 0.0;
  std::vector<double> grad;
};
struct PlacementState;
StateGradient total_wirelength(const Design& design, const PlacementState& state,
                               const WirelengthParams& p);

/// Smoothing schedule γ_k = γ0 · 10^{b·overflow}, spanning [0.1, 5] bin
/// sizes for overflow in [0, 1] when gamma0_bins = 0.1.
double gamma_schedule(double bin_size, double overflow, double gamma0_bins = 0.1);

double hpwl(const Design& design, std::span<const Vec2> positions);

}  // namespace picplace
