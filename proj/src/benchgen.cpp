#include "picplace/benchgen.hpp"

#include "picplace/random.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace picplace {

double target_utilization(DieClass c) { return c == DieClass::S ? 0.5 : 0.35; }
double class_bend_radius(DieClass c) { return c == DieClass::S ? 5.0 : 10.0; }

namespace {

// Two west inputs and two east outputs; port 0 serves the lower mode.
Component two_by_two(std::string name, std::string cell, double w, double h, Vec2 pos) {
  Component c;
  c.name = std::move(name);
  c.cell = std::move(cell);
  c.width = w;
  c.height = h;
  c.position = pos;
  c.has_position = true;
  c.ports = {
      {"i0", {0.0, 0.25 * h}, Dir::W},
      {"i1", {0.0, 0.75 * h}, Dir::W},
      {"o0", {w, 0.25 * h}, Dir::E},
      {"o1", {w, 0.75 * h}, Dir::E},
  };
  return c;
}

Component terminal(std::string name, double size, Vec2 pos, bool input) {
  Component c;
  c.name = std::move(name);
  c.cell = input ? "input_terminal" : "output_terminal";
  c.width = size;
  c.height = size;
  c.position = pos;
  c.has_position = true;
  c.fixed = true;
  if (input) {
    c.ports = {{"o", {size, 0.5 * size}, Dir::E}};
  } else {
    c.ports = {{"i", {0.0, 0.5 * size}, Dir::W}};
  }
  return c;
}

void add_net(Design& d, std::string name, std::size_t c0, std::size_t p0, std::size_t c1,
             std::size_t p1) {
  Net n;
  n.name = std::move(name);
  n.pins = {PinRef{c0, p0}, PinRef{c1, p1}};
  d.nets.push_back(std::move(n));
}

// Die sized from the component area and utilisation target, keeping the
// aspect ratio of the natural grid footprint (w0 x h0), never below it.
Die size_die(double area, DieClass cls, double w0, double h0) {
  const double scale = std::max(1.0, std::sqrt(area / target_utilization(cls) / (w0 * h0)));
  return {w0 * scale, h0 * scale};
}

void check_die(const Die& die, double area, double min_w, double min_h) {
  if (!(die.width > 0.0) || !(die.height > 0.0)) {
    throw std::invalid_argument("die dimensions must be positive");
  }
  const double util = area / die.area();
  if (util > kMaxUtilization) {
    throw std::invalid_argument("die too small: utilisation " + std::to_string(util) +
                                " exceeds " + std::to_string(kMaxUtilization));
  }
  if (die.width < min_w || die.height < min_h) {
    throw std::invalid_argument("die too small for the mesh footprint (" +
                                std::to_string(min_w) + " x " + std::to_string(min_h) + ")");
  }
}

}  // namespace

Design gen_clements(const ClementsSpec& spec) {
  const int n = spec.modes;
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("Clements mesh needs an even N >= 2");
  if (!(spec.mzi_width > 0.0) || !(spec.mzi_height > 0.0) || !(spec.terminal_size > 0.0)) {
    throw std::invalid_argument("component sizes must be positive");
  }
  const double w = spec.mzi_width;
  const double h = spec.mzi_height;
  const double t = spec.terminal_size;
  const int num_mzi = n * (n - 1) / 2;
  const double area = num_mzi * w * h + 2.0 * n * t * t;

  // The footprint needs n columns of MZIs plus the terminal strips, and n/2
  // stacked MZIs per column.
  const double min_w = n * w + 2.0 * t;
  const double min_h = std::max(0.5 * n * h, n * t);
  Die die;
  if (spec.die) {
    die = *spec.die;
  } else if (spec.column_pitch > 0.0) {
    die.width = n * spec.column_pitch + 2.0 * t;
    die.height = area / target_utilization(spec.size) / die.width;
  } else {
    die = size_die(area, spec.size, min_w, min_h);
  }
  check_die(die, area, min_w, min_h);

  Design d;
  d.name = "clements_" + std::to_string(n) + "x" + std::to_string(n) +
           (spec.size == DieClass::S ? "_S" : "_L");
  d.die = die;
  d.tech = {class_bend_radius(spec.size), spec.crossing_size, 0.5};
  d.signal_flow = Axis::X;

  const double pitch_x = (die.width - 2.0 * t) / n;
  const double pitch_y = die.height / n;
  auto mode_y = [&](int k) { return (k + 0.5) * pitch_y; };

  for (int k = 0; k < n; ++k) {
    d.components.push_back(
        terminal("in_" + std::to_string(k), t, {0.0, mode_y(k) - 0.5 * t}, true));
  }
  for (int k = 0; k < n; ++k) {
    d.components.push_back(
        terminal("out_" + std::to_string(k), t, {die.width - t, mode_y(k) - 0.5 * t}, false));
  }

  // route[k] lists (component, port index) of the MZIs visited by mode k.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> route(n);
  std::vector<std::vector<std::size_t>> column_members(n);
  std::vector<std::vector<std::size_t>> row_members(n);
  for (int col = 0; col < n; ++col) {
    for (int k = col % 2; k + 1 < n; k += 2) {
      const double x = t + col * pitch_x + 0.5 * (pitch_x - w);
      const double y = (k + 1) * pitch_y - 0.5 * h;
      const std::size_t idx = d.components.size();
      d.components.push_back(two_by_two("mzi_c" + std::to_string(col) + "_m" + std::to_string(k),
                                        "mzi", w, h, {x, y}));
      route[k].push_back({idx, 0});
      route[k + 1].push_back({idx, 1});
      column_members[col].push_back(idx);
      row_members[k].push_back(idx);
    }
  }

  for (int k = 0; k < n; ++k) {
    const std::string prefix = "n_m" + std::to_string(k) + "_";
    const auto& r = route[k];
    add_net(d, prefix + "0", static_cast<std::size_t>(k), 0, r.front().first, r.front().second);
    for (std::size_t j = 0; j + 1 < r.size(); ++j) {
      add_net(d, prefix + std::to_string(j + 1), r[j].first, 2 + r[j].second, r[j + 1].first,
              r[j + 1].second);
    }
    add_net(d, prefix + std::to_string(r.size()), r.back().first, 2 + r.back().second,
            static_cast<std::size_t>(n + k), 0);
  }

  for (const auto& members : column_members) {
    if (members.size() >= 2) d.groups.push_back({GroupKind::AlignLeft, members});
  }
  for (const auto& members : row_members) {
    if (members.size() >= 2) d.groups.push_back({GroupKind::AlignYCenter, members});
  }

  finalize_design(d);
  return d;
}

Design gen_butterfly(const ButterflySpec& spec) {
  const int n = spec.ports;
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("butterfly needs a power-of-two port count >= 2");
  }
  const int full_stages = std::countr_zero(static_cast<unsigned>(n));
  const int stages = spec.stages == 0 ? full_stages : spec.stages;
  if (stages < 1 || stages > full_stages) {
    throw std::invalid_argument("butterfly stage count must be in [1, log2(N)]");
  }
  if (!(spec.coupler_width > 0.0) || !(spec.coupler_height > 0.0) || !(spec.terminal_size > 0.0)) {
    throw std::invalid_argument("component sizes must be positive");
  }
  const double w = spec.coupler_width;
  const double h = spec.coupler_height;
  const double t = spec.terminal_size;
  const int per_stage = n / 2;
  const double area = stages * per_stage * w * h + 2.0 * n * t * t;

  const double min_w = stages * w + 2.0 * t;
  const double min_h = std::max(per_stage * h, n * t);
  Die die;
  if (spec.die) {
    die = *spec.die;
  } else {
    // Natural footprint leaves three coupler widths per stage for the
    // permutation wiring.
    die = size_die(area, spec.size, 3.0 * stages * w + 2.0 * t, min_h);
  }
  check_die(die, area, min_w, min_h);

  Design d;
  d.name = "butterfly_" + std::to_string(n) + (spec.size == DieClass::S ? "_S" : "_L");
  d.die = die;
  d.tech = {class_bend_radius(spec.size), spec.crossing_size, 0.5};
  d.signal_flow = Axis::X;

  const double pitch_x = (die.width - 2.0 * t) / stages;
  const double pitch_y = die.height / n;

  std::vector<int> input_line(n);
  std::iota(input_line.begin(), input_line.end(), 0);
  if (spec.seed != 0) {
    Rng rng(spec.seed);
    rng.shuffle(std::span<int>(input_line));
  }

  for (int k = 0; k < n; ++k) {
    const double y = (input_line[k] + 0.5) * pitch_y - 0.5 * t;
    d.components.push_back(terminal("in_" + std::to_string(k), t, {0.0, y}, true));
  }
  for (int k = 0; k < n; ++k) {
    const double y = (k + 0.5) * pitch_y - 0.5 * t;
    d.components.push_back(terminal("out_" + std::to_string(k), t, {die.width - t, y}, false));
  }

  // at[line] = (component, port index) where the line last arrived.
  std::vector<std::pair<std::size_t, std::size_t>> at(n);
  for (int k = 0; k < n; ++k) at[k] = {static_cast<std::size_t>(k), 0};
  std::vector<int> hops(n, 0);
  auto connect = [&](int line, std::size_t comp, std::size_t port) {
    const auto [pc, pp] = at[line];
    const std::size_t out_port = pc < static_cast<std::size_t>(2 * n) ? pp : 2 + pp;
    add_net(d, "n_l" + std::to_string(line) + "_" + std::to_string(hops[line]++), pc, out_port,
            comp, port);
    at[line] = {comp, port};
  };

  for (int s = 0; s < stages; ++s) {
    const int bit = 1 << s;
    std::vector<std::size_t> members;
    int j = 0;
    for (int lo = 0; lo < n; ++lo) {
      if (lo & bit) continue;
      const int hi = lo | bit;
      const double x = t + s * pitch_x + 0.5 * (pitch_x - w);
      const double y = (2 * j + 1) * pitch_y - 0.5 * h;
      const std::size_t idx = d.components.size();
      d.components.push_back(two_by_two("cpl_s" + std::to_string(s) + "_" + std::to_string(j),
                                        "coupler", w, h, {x, y}));
      connect(lo, idx, 0);
      connect(hi, idx, 1);
      members.push_back(idx);
      ++j;
    }
    if (members.size() >= 2) d.groups.push_back({GroupKind::UniformY, members});
  }
  for (int k = 0; k < n; ++k) connect(k, static_cast<std::size_t>(n + k), 0);

  finalize_design(d);
  return d;
}

}  // namespace picplace
