#include "picplace/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace picplace {

void validate(const ProjectionSchedule& s) {
  if (!(s.s0 >= 0.0 && s.s0 <= s.sT && s.sT <= 1.0)) {
    throw std::invalid_argument("sharpness needs 0 <= s0 <= sT <= 1");
  }
  if (s.T < 1) throw std::invalid_argument("projection horizon must be >= 1");
}

double sharpness(int t, const ProjectionSchedule& s) {
  const double r = std::clamp(static_cast<double>(t) / s.T, 0.0, 1.0);
  return s.s0 + (s.sT - s.s0) * 0.5 * (1.0 - std::cos(std::numbers::pi * r));
}

double alignment_target(GroupKind kind, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty group");
  if (kind == GroupKind::AlignLeft) return *std::min_element(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<double> uniform_targets(std::span<const double> centers,
                                    std::span<const std::string> names) {
  const std::size_t n = centers.size();
  std::vector<double> out(centers.begin(), centers.end());
  if (n < 2) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (centers[a] != centers[b]) return centers[a] < centers[b];
    return names[a] < names[b];
  });
  const double lo = centers[order.front()];
  const double hi = centers[order.back()];
  if (!(hi > lo)) return out;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t r = 0; r < n; ++r) out[order[r]] = lo + static_cast<double>(r) * step;
  out[order.back()] = hi;
  return out;
}

Projector::Projector(const Design& design, const ProjectionSchedule& schedule,
                     const FillerSet& fillers)
    : design_(design), schedule_(schedule), fillers_(fillers) {
  validate(schedule);
  slot_.assign(design.components.size(), -1);
  for (std::size_t k = 0; k < design.movable.size(); ++k) {
    slot_[design.movable[k]] = static_cast<std::ptrdiff_t>(k);
  }
}

void Projector::apply_with(std::span<double> coords, double s) const {
  const std::size_t nm = design_.movable.size();
  if (s > 0.0) {
    for (const ConstraintGroup& g : design_.groups) {
      const bool on_x = group_axis(g.kind) == Axis::X;
      const std::size_t base = on_x ? 0 : nm;
      std::vector<double> vals;
      std::vector<double> half;
      std::vector<std::string> names;
      for (std::size_t c : g.members) {
        const Component& comp = design_.components[c];
        const double hs = g.kind == GroupKind::AlignLeft ? 0.0
                                                         : 0.5 * (on_x ? comp.width : comp.height);
        half.push_back(hs);
        vals.push_back(coords[base + static_cast<std::size_t>(slot_[c])] + hs);
        names.push_back(comp.name);
      }
      std::vector<double> target;
      if (is_alignment(g.kind)) {
        target.assign(vals.size(), alignment_target(g.kind, vals));
      } else {
        target = uniform_targets(vals, names);
      }
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        double& x = coords[base + static_cast<std::size_t>(slot_[g.members[i]])];
        const double moved = (1.0 - s) * vals[i] + s * target[i];
        x = moved - half[i];
      }
    }
  }
  clamp(coords);
}

void Projector::clamp(std::span<double> coords) const {
  const std::size_t nm = design_.movable.size();
  const double W = design_.die.width;
  const double H = design_.die.height;
  for (std::size_t k = 0; k < nm; ++k) {
    const Component& c = design_.components[design_.movable[k]];
    coords[k] = std::clamp(coords[k], 0.0, std::max(0.0, W - c.width));
    coords[nm + k] = std::clamp(coords[nm + k], 0.0, std::max(0.0, H - c.height));
  }
  const std::size_t nf = fillers_.count;
  for (std::size_t f = 0; f < nf; ++f) {
    double& x = coords[2 * nm + f];
    double& y = coords[2 * nm + nf + f];
    x = std::clamp(x, 0.0, std::max(0.0, W - fillers_.width));
    y = std::clamp(y, 0.0, std::max(0.0, H - fillers_.height));
  }
}

double max_group_error(const Design& design, std::span<const double> coords) {
  const auto pos = component_positions(design, coords);
  double worst = 0.0;
  for (const ConstraintGroup& g : design.groups) {
    const bool on_x = group_axis(g.kind) == Axis::X;
    std::vector<double> vals;
    for (std::size_t c : g.members) {
      const Component& comp = design.components[c];
      const double lo = on_x ? pos[c].x : pos[c].y;
      const double hs = g.kind == GroupKind::AlignLeft ? 0.0
                                                       : 0.5 * (on_x ? comp.width : comp.height);
      vals.push_back(lo + hs);
    }
    std::sort(vals.begin(), vals.end());
    if (is_alignment(g.kind)) {
      worst = std::max(worst, vals.back() - vals.front());
    } else if (vals.size() > 2) {
      double gmin = vals[1] - vals[0];
      double gmax = gmin;
      for (std::size_t i = 2; i < vals.size(); ++i) {
        gmin = std::min(gmin, vals[i] - vals[i - 1]);
        gmax = std::max(gmax, vals[i] - vals[i - 1]);
      }
      worst = std::max(worst, gmax - gmin);
    }
  }
  return worst;
}

}  // namespace picplace
