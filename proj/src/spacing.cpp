#include "picplace/spacing.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

namespace picplace {

void validate(const SpacingParams& p) {
  if (!(p.lambda >= 0.0)) throw std::invalid_argument("spacing lambda must be non-negative");
  if (p.refresh_period < 1) throw std::invalid_argument("spacing refresh period must be >= 1");
}

bool is_refresh_iteration(int iteration, const SpacingParams& p) {
  return iteration >= p.refresh_start && (iteration - p.refresh_start) % p.refresh_period == 0;
}

int same_direction_ports(const Component& comp, std::size_t port) {
  const Dir d = comp.ports[port].dir;
  return static_cast<int>(
      std::count_if(comp.ports.begin(), comp.ports.end(), [d](const Port& p) { return p.dir == d; }));
}

double port_density(const Component& comp, std::size_t port, const Tech& tech) {
  return tech.bend_radius + 0.5 * same_direction_ports(comp, port) * tech.crossing_size;
}

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

bool segments_cross(const Segment& s, const Segment& t) {
  if (s.a == s.b || t.a == t.b) return false;
  const int d1 = sign(orient(s.a, s.b, t.a));
  const int d2 = sign(orient(s.a, s.b, t.b));
  if (d1 == 0 && d2 == 0) {
    // Collinear: count a positive-length overlap once.
    const bool use_x = std::abs(s.b.x - s.a.x) >= std::abs(s.b.y - s.a.y);
    auto coord = [use_x](Vec2 p) { return use_x ? p.x : p.y; };
    const double s0 = std::min(coord(s.a), coord(s.b));
    const double s1 = std::max(coord(s.a), coord(s.b));
    const double t0 = std::min(coord(t.a), coord(t.b));
    const double t1 = std::max(coord(t.a), coord(t.b));
    return std::min(s1, t1) > std::max(s0, t0);
  }
  const int d3 = sign(orient(t.a, t.b, s.a));
  const int d4 = sign(orient(t.a, t.b, s.b));
  // Any zero orientation puts an endpoint on the other segment's line, which
  // is a touch rather than an interior crossing.
  return d1 * d2 < 0 && d3 * d4 < 0;
}

CrossingCount count_crossings_sweep(std::span<const Segment> segs) {
  CrossingCount out;
  out.per_segment.assign(segs.size(), 0);
  std::vector<std::size_t> order(segs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto xmin = [&](std::size_t i) { return std::min(segs[i].a.x, segs[i].b.x); };
  auto xmax = [&](std::size_t i) { return std::max(segs[i].a.x, segs[i].b.x); };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return xmin(i) < xmin(j); });

  std::vector<std::size_t> active;
  for (std::size_t i : order) {
    const double x0 = xmin(i);
    std::erase_if(active, [&](std::size_t j) { return xmax(j) < x0; });
    const double y0 = std::min(segs[i].a.y, segs[i].b.y);
    const double y1 = std::max(segs[i].a.y, segs[i].b.y);
    for (std::size_t j : active) {
      if (std::max(segs[j].a.y, segs[j].b.y) < y0 || std::min(segs[j].a.y, segs[j].b.y) > y1) {
        continue;
      }
      if (segments_cross(segs[i], segs[j])) {
        ++out.total;
        ++out.per_segment[i];
        ++out.per_segment[j];
      }
    }
    active.push_back(i);
  }
  return out;
}

CrossingCount count_crossings(std::span<const Segment> segs) {
  if (segs.size() > kSweepThreshold) return count_crossings_sweep(segs);
  CrossingCount out;
  out.per_segment.assign(segs.size(), 0);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      if (segments_cross(segs[i], segs[j])) {
        ++out.total;
        ++out.per_segment[i];
        ++out.per_segment[j];
      }
    }
  }
  return out;
}

std::vector<Segment> net_segments(const Design& design, std::span<const Vec2> positions) {
  std::vector<Segment> segs;
  segs.reserve(design.nets.size());
  for (const Net& net : design.nets) {
    const auto& [a, b] = net.pins;
    segs.push_back({positions[a.comp] + design.components[a.comp].ports[a.port].offset,
                    positions[b.comp] + design.components[b.comp].ports[b.port].offset});
  }
  return segs;
}

std::vector<double> congestion(std::span<const std::size_t> per_net_crossings, const Tech& tech) {
  std::vector<double> out(per_net_crossings.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(per_net_crossings[i]) * tech.crossing_size;
  }
  return out;
}

NetSpacing compute_net_spacing(const Design& design, SpacingVariant variant,
                               std::span<const std::size_t> per_net_crossings) {
  const std::size_t n = design.nets.size();
  if (!per_net_crossings.empty() && per_net_crossings.size() != n) {
    throw std::invalid_argument("crossing counts do not match the net count");
  }
  NetSpacing out;
  out.demand.resize(n);
  out.endpoint.resize(n);
  out.port_density.resize(n);
  out.crossings.assign(n, 0);
  if (!per_net_crossings.empty()) {
    std::copy(per_net_crossings.begin(), per_net_crossings.end(), out.crossings.begin());
  }
  out.congestion = congestion(out.crossings, design.tech);

  const Tech& tech = design.tech;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pins = design.nets[i].pins;
    std::array<double, 2> pd{};
    for (std::size_t k = 0; k < 2; ++k) {
      pd[k] = port_density(design.components[pins[k].comp], pins[k].port, tech);
    }
    const std::uint8_t e = pd[1] > pd[0] ? 1 : 0;
    out.endpoint[i] = e;
    out.port_density[i] = pd[e];
    const PinRef& pin = pins[e];
    switch (variant) {
      case SpacingVariant::None:
      case SpacingVariant::PortInflation: out.demand[i] = 0.0; break;
      case SpacingVariant::RbendOnly: out.demand[i] = tech.bend_radius; break;
      case SpacingVariant::PortCountOnly:
        out.demand[i] =
            0.5 * same_direction_ports(design.components[pin.comp], pin.port) * tech.crossing_size;
        break;
      case SpacingVariant::Full: out.demand[i] = pd[e] + out.congestion[i]; break;
    }
  }
  return out;
}

NetPenalty net_spacing_penalty(Vec2 endpoint_pin, Dir endpoint_dir, Vec2 other_pin, double demand,
                               bool literal) {
  const Vec2 d = other_pin - endpoint_pin;
  const Vec2 u = unit(endpoint_dir);
  NetPenalty out;
  Vec2 grad_d;
  auto axis_term = [&](double uc, double dc, double& g) {
    if (uc == 0.0) return;
    const double r = literal ? std::max(0.0, uc * dc - demand) : std::max(0.0, demand - uc * dc);
    out.value += r * r;
    g = literal ? 2.0 * r * uc : -2.0 * r * uc;
  };
  axis_term(u.x, d.x, grad_d.x);
  axis_term(u.y, d.y, grad_d.y);
  out.grad_other = grad_d;
  out.grad_endpoint = -grad_d;
  return out;
}

namespace {

bool spacing_active(const SpacingParams& p) {
  return p.lambda > 0.0 && p.variant != SpacingVariant::None &&
         p.variant != SpacingVariant::PortInflation;
}

}  // namespace

SpacingResult spacing_penalty(const Design& design, std::span<const Vec2> positions,
                              const NetSpacing& spacing, const SpacingParams& p) {
  SpacingResult out;
  out.grad.assign(design.components.size(), Vec2{});
  if (!spacing_active(p)) return out;
  for (std::size_t i = 0; i < design.nets.size(); ++i) {
    const Net& net = design.nets[i];
    const PinRef& a = net.pins[spacing.endpoint[i]];
    const PinRef& b = net.pins[1 - spacing.endpoint[i]];
    const Vec2 pa = positions[a.comp] + design.components[a.comp].ports[a.port].offset;
    const Vec2 pb = positions[b.comp] + design.components[b.comp].ports[b.port].offset;
    const NetPenalty np =
        net_spacing_penalty(pa, design.pin_dir(a), pb, spacing.demand[i], p.literal);
    out.value += p.lambda * np.value;
    out.grad[a.comp] += p.lambda * np.grad_endpoint;
    out.grad[b.comp] += p.lambda * np.grad_other;
  }
  return out;
}

std::vector<std::size_t> penalized_nets(const Design& design, std::span<const Vec2> positions,
                                        const NetSpacing& spacing) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < design.nets.size(); ++i) {
    const Net& net = design.nets[i];
    const PinRef& a = net.pins[spacing.endpoint[i]];
    const PinRef& b = net.pins[1 - spacing.endpoint[i]];
    const Vec2 pa = positions[a.comp] + design.components[a.comp].ports[a.port].offset;
    const Vec2 pb = positions[b.comp] + design.components[b.comp].ports[b.port].offset;
    if (net_spacing_penalty(pa, design.pin_dir(a), pb, spacing.demand[i]).value > 0.0) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<double> inflate_for_ports(const Design& design, const Tech& tech) {
  std::vector<double> out(design.components.size(), 0.0);
  for (std::size_t i = 0; i < design.components.size(); ++i) {
    std::array<int, 4> per_edge{};
    for (const Port& p : design.components[i].ports) ++per_edge[static_cast<int>(p.dir)];
    out[i] = *std::max_element(per_edge.begin(), per_edge.end()) * tech.bend_radius;
  }
  return out;
}

}  // namespace picplace
