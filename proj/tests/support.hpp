#pragma once

// Small design builders, generators and finite-difference helpers shared by
// the test executables.

#include "picplace/netlist.hpp"
#include "picplace/random.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace picplace::testing {

inline Port port(std::string name, double dx, double dy, Dir d) { return {std::move(name), {dx, dy}, d}; }

// w×h box with one port in the middle of each requested side.
inline Component box(std::string name, double w, double h, std::initializer_list<Dir> dirs,
                     Vec2 pos = {}, bool fixed = false) {
  Component c;
  c.name = std::move(name);
  c.cell = "box";
  c.width = w;
  c.height = h;
  c.position = pos;
  c.fixed = fixed;
  c.has_position = true;
  int k = 0;
  for (Dir d : dirs) {
    Vec2 off;
    switch (d) {
      case Dir::E: off = {w, 0.5 * h}; break;
      case Dir::W: off = {0.0, 0.5 * h}; break;
      case Dir::N: off = {0.5 * w, h}; break;
      case Dir::S: off = {0.5 * w, 0.0}; break;
    }
    c.ports.push_back({std::string("p") + std::to_string(k++), off, d});
  }
  return c;
}

inline Net net(std::string name, std::size_t c0, std::size_t p0, std::size_t c1, std::size_t p1,
               double weight = 1.0) {
  Net n;
  n.name = std::move(name);
  n.pins = {PinRef{c0, p0}, PinRef{c1, p1}};
  n.weight = weight;
  return n;
}

// Random design: `count` movable boxes with 1-3 ports each, random two-pin
// nets between distinct components (each port used at most once).
inline Design random_design(Rng& rng, std::size_t count, std::size_t nets, double die = 400.0) {
  Design d;
  d.name = "random";
  d.die = {die, die};
  for (std::size_t i = 0; i < count; ++i) {
    const double w = rng.uniform(5.0, 40.0);
    const double h = rng.uniform(5.0, 40.0);
    std::vector<Dir> dirs;
    const int np = 1 + static_cast<int>(rng.below(3));
    for (int k = 0; k < np; ++k) dirs.push_back(static_cast<Dir>(rng.below(4)));
    Component c;
    c.name = "c" + std::to_string(i);
    c.cell = "box";
    c.width = w;
    c.height = h;
    c.position = {rng.uniform(0.0, die - w), rng.uniform(0.0, die - h)};
    c.has_position = true;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      // Spread same-side ports along the edge so offsets stay distinct.
      const double f = (k + 1.0) / (dirs.size() + 1.0);
      Vec2 off;
      switch (dirs[k]) {
        case Dir::E: off = {w, f * h}; break;
        case Dir::W: off = {0.0, f * h}; break;
        case Dir::N: off = {f * w, h}; break;
        case Dir::S: off = {f * w, 0.0}; break;
      }
      c.ports.push_back({"p" + std::to_string(k), off, dirs[k]});
    }
    d.components.push_back(std::move(c));
  }
  std::vector<PinRef> free;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < d.components[i].ports.size(); ++k) free.push_back({i, k});
  }
  rng.shuffle(std::span<PinRef>(free));
  std::size_t made = 0;
  while (made < nets && free.size() >= 2) {
    const PinRef a = free.back();
    free.pop_back();
    std::size_t j = free.size();
    while (j > 0 && free[j - 1].comp == a.comp) --j;
    if (j == 0) break;
    const PinRef b = free[j - 1];
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(j - 1));
    d.nets.push_back(net("n" + std::to_string(made), a.comp, a.port, b.comp, b.port,
                         rng.uniform(0.5, 2.0)));
    ++made;
  }
  finalize_design(d);
  return d;
}

// Central differences of f at x, step h.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// ‖a − b‖∞ / max(‖b‖∞, floor).
inline double relative_error(std::span<const double> a, std::span<const double> b,
                             double floor = 1e-8) {
  double diff = 0.0, scale = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

}  // namespace picplace::testing
