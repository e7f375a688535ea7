#include "picplace/legalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace picplace {

double clearance(const Component& a, const Component& b) { return std::max(a.halo, b.halo); }

namespace {

bool conflict(const Rect& a, const Rect& b, double gap) {
  const Rect g = a.inflated(gap);
  return overlap_length(g.xl, g.xh, b.xl, b.xh) > kLegalTolerance &&
         overlap_length(g.yl, g.yh, b.yl, b.yh) > kLegalTolerance;
}

bool inside_die(const Die& die, const Rect& r) {
  return r.xl >= -kLegalTolerance && r.yl >= -kLegalTolerance &&
         r.xh <= die.width + kLegalTolerance && r.yh <= die.height + kLegalTolerance;
}

double manhattan(Vec2 a, Vec2 b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

struct Layout {
  const Design& design;
  std::vector<Vec2> pos;
  std::vector<bool> placed;

  Rect rect(std::size_t i) const { return design.components[i].rect_at(pos[i]); }

  bool free_at(std::size_t c, Vec2 p) const {
    const Component& comp = design.components[c];
    const Rect r = comp.rect_at(p);
    if (!inside_die(design.die, r)) return false;
    for (std::size_t o = 0; o < pos.size(); ++o) {
      if (o == c || !placed[o]) continue;
      if (conflict(r, rect(o), clearance(comp, design.components[o]))) return false;
    }
    return true;
  }
};

Vec2 clamp_to_die(const Design& d, const Component& c, Vec2 p) {
  return {std::clamp(p.x, 0.0, std::max(0.0, d.die.width - c.width)),
          std::clamp(p.y, 0.0, std::max(0.0, d.die.height - c.height))};
}

// Stage 1: nearest free spot on the grid spanned by the edges of everything
// already placed (shifted by the clearance) and the die bounds.
bool place_on_hanan(Layout& L, std::size_t c, Vec2 target) {
  const Component& comp = L.design.components[c];
  if (L.free_at(c, target)) {
    L.pos[c] = target;
    return true;
  }
  std::vector<double> xs{target.x, 0.0, L.design.die.width - comp.width};
  std::vector<double> ys{target.y, 0.0, L.design.die.height - comp.height};
  for (std::size_t o = 0; o < L.pos.size(); ++o) {
    if (!L.placed[o] || o == c) continue;
    const Rect r = L.rect(o);
    const double m = clearance(comp, L.design.components[o]);
    xs.push_back(r.xl - m - comp.width);
    xs.push_back(r.xh + m);
    ys.push_back(r.yl - m - comp.height);
    ys.push_back(r.yh + m);
  }
  auto tidy = [](std::vector<double>& v, double hi) {
    std::erase_if(v, [hi](double x) { return x < -kLegalTolerance || x > hi + kLegalTolerance; });
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  tidy(xs, L.design.die.width - comp.width);
  tidy(ys, L.design.die.height - comp.height);

  struct Cand {
    double disp;
    Vec2 p;
  };
  std::vector<Cand> cands;
  cands.reserve(xs.size() * ys.size());
  for (double x : xs) {
    for (double y : ys) cands.push_back({manhattan({x, y}, target), {x, y}});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.disp != b.disp) return a.disp < b.disp;
    if (a.p.y != b.p.y) return a.p.y < b.p.y;
    return a.p.x < b.p.x;
  });
  for (const Cand& cand : cands) {
    if (L.free_at(c, cand.p)) {
      L.pos[c] = cand.p;
      return true;
    }
  }
  L.pos[c] = target;
  return false;
}

// Furthest legal move of `c` along one axis toward `goal`.
double blocked_shift(const Layout& L, std::size_t c, bool along_x, double goal) {
  const Component& comp = L.design.components[c];
  const Rect r = L.rect(c);
  const double cur = along_x ? L.pos[c].x : L.pos[c].y;
  if (goal == cur) return cur;
  const bool forward = goal > cur;
  const double size = along_x ? comp.width : comp.height;
  const double die_hi = (along_x ? L.design.die.width : L.design.die.height) - size;
  double limit = forward ? std::min(goal, die_hi) : std::max(goal, 0.0);
  for (std::size_t o = 0; o < L.pos.size(); ++o) {
    if (o == c || !L.placed[o]) continue;
    const Rect ro = L.rect(o);
    const double m = clearance(comp, L.design.components[o]);
    const double cross = along_x ? overlap_length(r.yl - m, r.yh + m, ro.yl, ro.yh)
                                 : overlap_length(r.xl - m, r.xh + m, ro.xl, ro.xh);
    if (cross <= kLegalTolerance) continue;
    const double olo = along_x ? ro.xl : ro.yl;
    const double ohi = along_x ? ro.xh : ro.yh;
    if (forward && olo - m - size >= cur - kLegalTolerance) {
      limit = std::min(limit, olo - m - size);
    } else if (!forward && ohi + m <= cur + kLegalTolerance) {
      limit = std::max(limit, ohi + m);
    }
  }
  return forward ? std::max(cur, limit) : std::min(cur, limit);
}

void refine(Layout& L, std::span<const std::size_t> order, std::span<const Vec2> goal) {
  for (int pass = 0; pass < 50; ++pass) {
    bool moved = false;
    for (std::size_t c : order) {
      for (const bool along_x : {true, false}) {
        const double cur = along_x ? L.pos[c].x : L.pos[c].y;
        const double target = along_x ? goal[c].x : goal[c].y;
        const double next = blocked_shift(L, c, along_x, target);
        if (std::abs(next - target) + kLegalTolerance < std::abs(cur - target)) {
          Vec2 p = L.pos[c];
          (along_x ? p.x : p.y) = next;
          if (L.free_at(c, p)) {
            L.pos[c] = p;
            moved = true;
          }
        }
      }
    }
    if (!moved) break;
  }
}

}  // namespace

std::vector<Violation> verify_legal(const Design& design, std::span<const Vec2> positions) {
  std::vector<Violation> out;
  const std::size_t n = design.components.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Rect r = design.components[i].rect_at(positions[i]);
    auto side = [&](bool bad, const char* name) {
      if (bad) out.push_back({Violation::Kind::OutOfDie, i, i, 0.0, name});
    };
    side(r.xl < -kLegalTolerance, "left");
    side(r.xh > design.die.width + kLegalTolerance, "right");
    side(r.yl < -kLegalTolerance, "bottom");
    side(r.yh > design.die.height + kLegalTolerance, "top");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Rect ri = design.components[i].rect_at(positions[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rect rj = design.components[j].rect_at(positions[j]);
      const double m = clearance(design.components[i], design.components[j]);
      if (conflict(ri, rj, m)) {
        out.push_back({Violation::Kind::Overlap, i, j, overlap_area(ri.inflated(m), rj), {}});
      }
    }
  }
  return out;
}

LegalizeResult legalize(const Design& design, std::span<const Vec2> gp_positions, int max_rounds) {
  const std::size_t n = design.components.size();
  std::vector<Vec2> goal(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Component& c = design.components[i];
    goal[i] = c.fixed ? c.position : clamp_to_die(design, c, gp_positions[i]);
  }

  std::vector<std::size_t> order(design.movable.begin(), design.movable.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double aa = design.components[a].area();
    const double ab = design.components[b].area();
    if (aa != ab) return aa > ab;
    return design.components[a].name < design.components[b].name;
  });

  LegalizeResult best;
  best.total_displacement = std::numeric_limits<double>::infinity();
  std::size_t best_violations = std::numeric_limits<std::size_t>::max();

  for (int round = 0; round < max_rounds; ++round) {
    Layout L{design, goal, std::vector<bool>(n, false)};
    for (std::size_t i = 0; i < n; ++i) L.placed[i] = design.components[i].fixed;
    for (std::size_t c : order) {
      place_on_hanan(L, c, goal[c]);
      L.placed[c] = true;
    }
    refine(L, order, goal);

    LegalizeResult r;
    r.positions = L.pos;
    r.rounds = round + 1;
    std::vector<double> disp(n, 0.0);
    for (std::size_t c : design.movable) {
      disp[c] = manhattan(L.pos[c], gp_positions[c]);
      r.total_displacement += disp[c];
      r.max_displacement = std::max(r.max_displacement, disp[c]);
    }
    r.violations = verify_legal(design, r.positions);
    r.status = r.violations.empty() ? LegalStatus::Success : LegalStatus::Failure;

    const bool better = r.violations.size() < best_violations ||
                        (r.violations.size() == best_violations &&
                         r.total_displacement < best.total_displacement);
    if (better) {
      best_violations = r.violations.size();
      best = std::move(r);
    }
    best.rounds = round + 1;
    if (best.status == LegalStatus::Success && best.total_displacement == 0.0) break;

    // Later rounds place the most displaced components first.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (disp[a] != disp[b]) return disp[a] > disp[b];
      return design.components[a].name < design.components[b].name;
    });
  }
  return best;
}

}  // namespace picplace
