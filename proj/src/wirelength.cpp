#include "picplace/wirelength.hpp"

#include "picplace/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace picplace {

void validate(const WirelengthParams& p) {
  if (!(p.gamma > 0.0)) throw std::invalid_argument("wirelength gamma must be positive");
  if (!(p.alpha >= 1.0 && p.alpha <= 2.0)) {
    throw std::invalid_argument("wirelength alpha must lie in [1, 2]");
  }
  if (!(p.margin >= 0.0 && p.margin <= 1.0)) {
    throw std::invalid_argument("angle margin must lie in [0, 1]");
  }
}

BendPenalty bend_penalty(Vec2 w, Dir v1, Dir v2, double margin, bool theta2_raw) {
  BendPenalty out;
  const double n = norm(w);
  if (n < kDegenerateSeparation) return out;

  const Vec2 u1 = unit(v1);
  const Vec2 u2 = theta2_raw ? unit(v2) : -unit(v2);
  const double n3 = n * n * n;
  out.cos1 = dot(w, u1) / n;
  out.cos2 = dot(w, u2) / n;
  const Vec2 dcos1 = (1.0 / n) * u1 - (dot(w, u1) / n3) * w;
  const Vec2 dcos2 = (1.0 / n) * u2 - (dot(w, u2) / n3) * w;

  const double r1 = std::max(0.0, margin - out.cos1);
  const double r2 = std::max(0.0, margin - out.cos2);
  out.first = r1 * r1;
  out.second = r2 * r2;
  out.value = out.first + out.second;
  out.grad_first = (-2.0 * r1) * dcos1;
  out.grad_second = (-2.0 * r2) * dcos2;
  return out;
}

SmoothSpan wa_span(double a, double b, double gamma) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double ea = std::exp((a - hi) / gamma);
  const double eb = std::exp((b - hi) / gamma);
  const double fa = std::exp((lo - a) / gamma);
  const double fb = std::exp((lo - b) / gamma);
  const double s_max = ea + eb;
  const double s_min = fa + fb;
  const double x_max = (a * ea + b * eb) / s_max;
  const double x_min = (a * fa + b * fb) / s_min;
  SmoothSpan out;
  out.value = x_max - x_min;
  const double dmax_db = eb / s_max * (1.0 + (b - x_max) / gamma);
  const double dmin_db = fb / s_min * (1.0 - (b - x_min) / gamma);
  out.slope = dmax_db - dmin_db;
  return out;
}

SmoothSpan lse_span(double a, double b, double gamma) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double ea = std::exp((a - hi) / gamma);
  const double eb = std::exp((b - hi) / gamma);
  const double fa = std::exp((lo - a) / gamma);
  const double fb = std::exp((lo - b) / gamma);
  SmoothSpan out;
  out.value = hi - lo + gamma * (std::log(ea + eb) + std::log(fa + fb));
  out.slope = eb / (ea + eb) - fb / (fa + fb);
  return out;
}

namespace {

struct Powered {
  double value = 0.0;
  double slope = 0.0;  // d(value)/d(coordinate difference)
};

Powered power(const SmoothSpan& s, double alpha) {
  if (!(s.value > 0.0)) return {};
  const double v = std::pow(s.value, alpha);
  return {v, alpha * v / s.value * s.slope};
}

}  // namespace

NetCost coswa_net(const NetGeometry& net, const WirelengthParams& p) {
  const Vec2 w = net.p2 - net.p1;
  const BendPenalty bp = bend_penalty(w, net.v1, net.v2, p.margin, p.theta2_raw);

  // Each port's term scales the axis its orientation lies along.
  double fx = 1.0, fy = 1.0;
  Vec2 dfx, dfy;
  if (is_horizontal(net.v1)) {
    fx += bp.first;
    dfx += bp.grad_first;
  } else {
    fy += bp.first;
    dfy += bp.grad_first;
  }
  if (is_horizontal(net.v2)) {
    fx += bp.second;
    dfx += bp.grad_second;
  } else {
    fy += bp.second;
    dfy += bp.grad_second;
  }

  const Powered px = power(wa_span(net.p1.x, net.p2.x, p.gamma), p.alpha);
  const Powered py = power(wa_span(net.p1.y, net.p2.y, p.gamma), p.alpha);

  NetCost out;
  out.cost = fx * px.value + fy * py.value;
  // Gradient with respect to w (= p2 - p1); the cost is translation invariant.
  const Vec2 gw{fx * px.slope + dfx.x * px.value + dfy.x * py.value,
                fy * py.slope + dfx.y * px.value + dfy.y * py.value};
  out.grad2 = gw;
  out.grad1 = -gw;
  return out;
}

NetCost baseline_net(const NetGeometry& net, const WirelengthParams& p) {
  NetCost out;
  Vec2 gw;
  switch (p.model) {
    case WirelengthModel::WA:
    case WirelengthModel::LSE: {
      const auto span = p.model == WirelengthModel::WA ? wa_span : lse_span;
      const SmoothSpan sx = span(net.p1.x, net.p2.x, p.gamma);
      const SmoothSpan sy = span(net.p1.y, net.p2.y, p.gamma);
      out.cost = sx.value + sy.value;
      gw = {sx.slope, sy.slope};
      break;
    }
    case WirelengthModel::Quadratic: {
      const Vec2 w = net.p2 - net.p1;
      out.cost = w.x * w.x + w.y * w.y;
      gw = 2.0 * w;
      break;
    }
    case WirelengthModel::CosWA:
      throw std::invalid_argument("baseline_net called with the cosWA model");
  }
  out.grad2 = gw;
  out.grad1 = -gw;
  return out;
}

NetCost net_wirelength(const NetGeometry& net, const WirelengthParams& p) {
  return p.model == WirelengthModel::CosWA ? coswa_net(net, p) : baseline_net(net, p);
}

NetGeometry net_geometry(const Design& design, const Net& net, std::span<const Vec2> positions) {
  const auto& [a, b] = net.pins;
  const Component& ca = design.components[a.comp];
  const Component& cb = design.components[b.comp];
  return {positions[a.comp] + ca.ports[a.port].offset, positions[b.comp] + cb.ports[b.port].offset,
          ca.ports[a.port].dir, cb.ports[b.port].dir};
}

WirelengthResult total_wirelength(const Design& design, std::span<const Vec2> positions,
                                  const WirelengthParams& p) {
  WirelengthResult out;
  out.grad.assign(design.components.size(), Vec2{});
  for (const Net& net : design.nets) {
    const NetCost c = net_wirelength(net_geometry(design, net, positions), p);
    out.value += net.weight * c.cost;
    out.grad[net.pins[0].comp] += net.weight * c.grad1;
    out.grad[net.pins[1].comp] += net.weight * c.grad2;
  }
  return out;
}

StateGradient total_wirelength(const Design& design, const PlacementState& state,
                               const WirelengthParams& p) {
  const auto pos = component_positions(design, state);
  const WirelengthResult r = total_wirelength(design, pos, p);
  StateGradient out;
  out.value = r.value;
  out.grad.assign(state.size(), 0.0);
  scatter_gradient(design, r.grad, out.grad);
  return out;
}

double gamma_schedule(double bin_size, double overflow, double gamma0_bins) {
  const double clamped = std::clamp(overflow, 0.0, 1.0);
  // 10^{b·overflow} with 10^b = 50.
  return gamma0_bins * bin_size * std::pow(50.0, clamped);
}

double hpwl(const Design& design, std::span<const Vec2> positions) {
  double total = 0.0;
  for (const Net& net : design.nets) {
    const NetGeometry g = net_geometry(design, net, positions);
    total += std::abs(g.p2.x - g.p1.x) + std::abs(g.p2.y - g.p1.y);
  }
  return total;
}

}  // namespace picplace
