#include "picplace/metrics.hpp"

#include "picplace/spacing.hpp"
#include "picplace/wirelength.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace picplace {

void validate(const LossModel& m) {
  if (!(m.propagation_db_per_cm >= 0.0) || !(m.bend_db >= 0.0) || !(m.crossing_db >= 0.0)) {
    throw std::invalid_argument("loss coefficients must be non-negative");
  }
}

namespace {

// Rotates `d` so that heading `h` becomes east.
Vec2 to_east_frame(Vec2 d, Dir h) {
  switch (h) {
    case Dir::E: return d;
    case Dir::N: return {d.y, -d.x};
    case Dir::W: return {-d.x, -d.y};
    case Dir::S: return {-d.y, d.x};
  }
  return d;
}

Dir dir_of(Vec2 u) {
  if (u.x > 0.5) return Dir::E;
  if (u.x < -0.5) return Dir::W;
  return u.y > 0.0 ? Dir::N : Dir::S;
}

}  // namespace

int predict_bends(Vec2 p1, Dir v1, Vec2 p2, Dir v2) {
  const Vec2 d = to_east_frame(p2 - p1, v1);
  const Dir arrive = dir_of(to_east_frame(unit(opposite(v2)), v1));
  switch (arrive) {
    case Dir::E:
      if (d.y == 0.0 && d.x > 0.0) return 0;
      return d.x > 0.0 ? 2 : 4;
    case Dir::W: return d.y != 0.0 ? 2 : 4;
    case Dir::N: return d.x > 0.0 && d.y > 0.0 ? 1 : 3;
    case Dir::S: return d.x > 0.0 && d.y < 0.0 ? 1 : 3;
  }
  return 4;
}

double estimated_length(Vec2 p1, Vec2 p2, int bends, double bend_radius) {
  const Vec2 d = p2 - p1;
  const double manhattan = std::abs(d.x) + std::abs(d.y);
  const double est = manhattan + bends * (0.5 * std::numbers::pi - 2.0) * bend_radius;
  return std::max(est, norm(d));
}

bool longest_path(std::size_t nodes, std::span<const std::size_t> from,
                  std::span<const std::size_t> to, std::span<const double> weight,
                  double& out) {
  std::vector<std::vector<std::size_t>> adj(nodes);
  std::vector<std::size_t> indeg(nodes, 0);
  for (std::size_t e = 0; e < from.size(); ++e) {
    adj[from[e]].push_back(e);
    ++indeg[to[e]];
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < nodes; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  std::vector<double> best(nodes, 0.0);
  std::size_t seen = 0;
  out = 0.0;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t e : adj[v]) {
      const std::size_t w = to[e];
      best[w] = std::max(best[w], best[v] + weight[e]);
      out = std::max(out, best[w]);
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  return seen == nodes;
}

std::size_t spacing_violations(const Design& design, std::span<const Vec2> positions) {
  const auto segs = net_segments(design, positions);
  const CrossingCount cc = count_crossings(segs);
  const NetSpacing ns = compute_net_spacing(design, SpacingVariant::Full, cc.per_segment);
  return penalized_nets(design, positions, ns).size();
}

MetricsReport evaluate(const Design& design, std::span<const Vec2> positions,
                       const LossModel& loss) {
  validate(loss);
  MetricsReport r;
  const auto segs = net_segments(design, positions);
  const CrossingCount cc = count_crossings(segs);
  r.crossings = cc.total;
  r.hpwl = hpwl(design, positions);

  const std::size_t n = design.nets.size();
  r.net_loss.resize(n);
  r.net_bends.resize(n);
  std::vector<std::size_t> from(n), to(n);
  const bool flow_x = design.signal_flow == Axis::X;
  const Dir forward = flow_x ? Dir::E : Dir::N;
  for (std::size_t i = 0; i < n; ++i) {
    const Net& net = design.nets[i];
    const PinRef& a = net.pins[0];
    const PinRef& b = net.pins[1];
    const Vec2 pa = positions[a.comp] + design.components[a.comp].ports[a.port].offset;
    const Vec2 pb = positions[b.comp] + design.components[b.comp].ports[b.port].offset;
    const int bends = predict_bends(pa, design.pin_dir(a), pb, design.pin_dir(b));
    r.net_bends[i] = bends;
    r.ba_tot += 90.0 * bends;
    const double len = estimated_length(pa, pb, bends, design.tech.bend_radius);
    r.net_loss[i] = loss.propagation_db_per_cm * len * 1e-4 + loss.bend_db * bends +
                    loss.crossing_db * static_cast<double>(cc.per_segment[i]);

    // Output ports face along the flow; otherwise orient by position.
    const Dir da = design.pin_dir(a);
    const Dir db = design.pin_dir(b);
    bool a_first;
    if (da == forward && db != forward) {
      a_first = true;
    } else if (db == forward && da != forward) {
      a_first = false;
    } else {
      const double ca = flow_x ? pa.x : pa.y;
      const double cb = flow_x ? pb.x : pb.y;
      a_first = ca != cb ? ca < cb : a.comp < b.comp;
    }
    from[i] = a_first ? a.comp : b.comp;
    to[i] = a_first ? b.comp : a.comp;
  }

  double path = 0.0;
  if (longest_path(design.components.size(), from, to, r.net_loss, path)) {
    r.il_max = path;
  } else {
    r.il_cyclic = true;
    r.il_max = r.net_loss.empty() ? 0.0 : *std::max_element(r.net_loss.begin(), r.net_loss.end());
  }
  r.spacing_violations = spacing_violations(design, positions);
  return r;
}

std::string metrics_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["CR"] = r.crossings;
  j["HPWL"] = r.hpwl;
  j["BA_tot"] = r.ba_tot;
  j["IL_max"] = r.il_max;
  j["spacing_violations"] = r.spacing_violations;
  j["wall_time"] = r.wall_time;
  j["il_cyclic"] = r.il_cyclic;
  return j.dump(2) + "\n";
}

}  // namespace picplace
