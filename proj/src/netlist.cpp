#include "picplace/netlist.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace picplace {

namespace {

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::string key_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

YAML::Node require(const YAML::Node& node, std::string_view key, const std::string& path) {
  if (!node.IsMap()) throw ParseError(path, "expected a mapping");
  YAML::Node child = node[std::string(key)];
  if (!child) throw ParseError(key_path(path, key), "missing required field");
  return child;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path, std::string_view what) {
  if (!node.IsScalar()) throw ParseError(path, "expected " + std::string(what));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(path, "expected " + std::string(what) + ", got '" + node.Scalar() + "'");
  }
}

double number(const YAML::Node& node, std::string_view key, const std::string& path) {
  return scalar<double>(require(node, key, path), key_path(path, key), "a number");
}

std::string text(const YAML::Node& node, std::string_view key, const std::string& path) {
  return scalar<std::string>(require(node, key, path), key_path(path, key), "a string");
}

double optional_number(const YAML::Node& node, std::string_view key, const std::string& path,
                       double fallback) {
  YAML::Node child = node[std::string(key)];
  if (!child || child.IsNull()) return fallback;
  return scalar<double>(child, key_path(path, key), "a number");
}

Dir parse_dir(const std::string& s, const std::string& path) {
  if (s == "E") return Dir::E;
  if (s == "N") return Dir::N;
  if (s == "W") return Dir::W;
  if (s == "S") return Dir::S;
  throw ParseError(path, "port direction must be one of E, N, W, S (got '" + s + "')");
}

YAML::Node sequence(const YAML::Node& node, std::string_view key, const std::string& path,
                    bool required) {
  YAML::Node child = node[std::string(key)];
  if (!child || child.IsNull()) {
    if (required) throw ParseError(key_path(path, key), "missing required field");
    return YAML::Node(YAML::NodeType::Sequence);
  }
  if (!child.IsSequence()) throw ParseError(key_path(path, key), "expected a sequence");
  return child;
}

Component parse_component(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) throw ParseError(path, "expected a mapping");
  Component c;
  c.name = text(node, "name", path);
  c.cell = node["cell"] ? scalar<std::string>(node["cell"], key_path(path, "cell"), "a string")
                        : c.name;
  c.width = number(node, "width", path);
  c.height = number(node, "height", path);
  if (YAML::Node f = node["fixed"]; f && !f.IsNull()) {
    c.fixed = scalar<bool>(f, key_path(path, "fixed"), "a boolean");
  }
  const bool has_x = node["x"] && !node["x"].IsNull();
  const bool has_y = node["y"] && !node["y"].IsNull();
  if (has_x != has_y) {
    throw ParseError(key_path(path, has_x ? "y" : "x"), "x and y must be given together");
  }
  if (has_x) {
    c.position = {number(node, "x", path), number(node, "y", path)};
    c.has_position = true;
  }
  c.halo = optional_number(node, "halo", path, 0.0);
  const YAML::Node ports = sequence(node, "ports", path, false);
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const std::string pp = index_path(key_path(path, "ports"), i);
    const YAML::Node& pn = ports[i];
    Port p;
    p.name = text(pn, "name", pp);
    p.offset = {number(pn, "dx", pp), number(pn, "dy", pp)};
    p.dir = parse_dir(text(pn, "dir", pp), key_path(pp, "dir"));
    c.ports.push_back(std::move(p));
  }
  return c;
}

ConstraintGroup parse_group(const YAML::Node& node, const std::string& path, const Design& d,
                            std::vector<std::string>& member_names) {
  if (!node.IsMap()) throw ParseError(path, "expected a mapping");
  ConstraintGroup g;
  const std::string type = text(node, "type", path);
  if (type == "alignment") {
    const std::string mode = text(node, "mode", path);
    if (mode == "left") {
      g.kind = GroupKind::AlignLeft;
    } else if (mode == "x-center") {
      g.kind = GroupKind::AlignXCenter;
    } else if (mode == "y-center") {
      g.kind = GroupKind::AlignYCenter;
    } else {
      throw ParseError(key_path(path, "mode"),
                       "alignment mode must be left, x-center or y-center (got '" + mode + "')");
    }
  } else if (type == "uniform-spacing") {
    const std::string axis = text(node, "axis", path);
    if (axis == "x") {
      g.kind = GroupKind::UniformX;
    } else if (axis == "y") {
      g.kind = GroupKind::UniformY;
    } else {
      throw ParseError(key_path(path, "axis"), "axis must be x or y (got '" + axis + "')");
    }
  } else {
    throw ParseError(key_path(path, "type"),
                     "constraint type must be alignment or uniform-spacing (got '" + type + "')");
  }
  const YAML::Node members = sequence(node, "members", path, true);
  member_names.clear();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::string mp = index_path(key_path(path, "members"), i);
    const auto name = scalar<std::string>(members[i], mp, "a component name");
    const auto idx = d.find_component(name);
    if (!idx) throw ParseError(mp, "unknown component '" + name + "'");
    g.members.push_back(*idx);
    member_names.push_back(name);
  }
  return g;
}

bool near(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * (1.0 + scale); }

void validate_port(const Component& c, const Port& p, const std::string& path) {
  const double scale = std::max(c.width, c.height);
  const double tol = 1e-9 * (1.0 + scale);
  const Vec2 o = p.offset;
  const bool inside =
      o.x >= -tol && o.x <= c.width + tol && o.y >= -tol && o.y <= c.height + tol;
  const bool on_west = near(o.x, 0.0, scale);
  const bool on_east = near(o.x, c.width, scale);
  const bool on_south = near(o.y, 0.0, scale);
  const bool on_north = near(o.y, c.height, scale);
  if (!inside || !(on_west || on_east || on_south || on_north)) {
    throw ParseError(path, "port '" + p.name + "' offset lies off the component boundary");
  }
  const bool outward = (p.dir == Dir::W && on_west) || (p.dir == Dir::E && on_east) ||
                       (p.dir == Dir::S && on_south) || (p.dir == Dir::N && on_north);
  if (!outward) {
    throw ParseError(path, std::string("port '") + p.name + "' direction " + dir_letter(p.dir) +
                               " does not point outward from its edge");
  }
}

}  // namespace

std::optional<std::size_t> Component::find_port(std::string_view port_name) const {
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (ports[i].name == port_name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Design::find_component(std::string_view comp_name) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].name == comp_name) return i;
  }
  return std::nullopt;
}

double Design::movable_area() const {
  double a = 0.0;
  for (std::size_t i : movable) a += components[i].area();
  return a;
}

double Design::total_area() const {
  double a = 0.0;
  for (const auto& c : components) a += c.area();
  return a;
}

std::string_view group_kind_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::AlignLeft: return "left";
    case GroupKind::AlignXCenter: return "x-center";
    case GroupKind::AlignYCenter: return "y-center";
    case GroupKind::UniformX: return "x";
    case GroupKind::UniformY: return "y";
  }
  return "?";
}

void finalize_design(Design& d) {
  if (!(d.die.width > 0.0) || !(d.die.height > 0.0)) {
    throw ParseError("design.die", "die width and height must be positive");
  }
  if (!(d.tech.bend_radius > 0.0) || !(d.tech.crossing_size > 0.0) ||
      !(d.tech.waveguide_width > 0.0)) {
    throw ParseError("design.tech", "bend_radius, crossing_size and waveguide_width must be positive");
  }

  std::set<std::string_view> names;
  d.movable.clear();
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    const Component& c = d.components[i];
    const std::string path = index_path("components", i);
    if (c.name.empty()) throw ParseError(key_path(path, "name"), "component name is empty");
    if (!names.insert(c.name).second) {
      throw ParseError(key_path(path, "name"), "duplicate component name '" + c.name + "'");
    }
    if (!(c.width > 0.0) || !(c.height > 0.0)) {
      throw ParseError(path, "component '" + c.name + "' must have positive width and height");
    }
    if (!(c.halo >= 0.0)) throw ParseError(key_path(path, "halo"), "halo must be non-negative");
    if (c.fixed && !c.has_position) {
      throw ParseError(path, "fixed component '" + c.name + "' needs x and y");
    }
    if (!std::isfinite(c.position.x) || !std::isfinite(c.position.y)) {
      throw ParseError(path, "component '" + c.name + "' has a non-finite position");
    }
    std::set<std::string_view> port_names;
    for (std::size_t p = 0; p < c.ports.size(); ++p) {
      const std::string pp = index_path(key_path(path, "ports"), p);
      if (!port_names.insert(c.ports[p].name).second) {
        throw ParseError(key_path(pp, "name"), "duplicate port name '" + c.ports[p].name +
                                                   "' in component '" + c.name + "'");
      }
      validate_port(c, c.ports[p], pp);
    }
    if (!c.fixed) d.movable.push_back(i);
  }

  std::set<std::string_view> net_names;
  for (std::size_t n = 0; n < d.nets.size(); ++n) {
    const Net& net = d.nets[n];
    const std::string path = index_path("nets", n);
    if (!net_names.insert(net.name).second) {
      throw ParseError(key_path(path, "name"), "duplicate net name '" + net.name + "'");
    }
    if (!(net.weight >= 0.0) || !std::isfinite(net.weight)) {
      throw ParseError(key_path(path, "weight"), "net weight must be finite and non-negative");
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const PinRef& pin = net.pins[k];
      if (pin.comp >= d.components.size() || pin.port >= d.components[pin.comp].ports.size()) {
        throw ParseError(index_path(key_path(path, "pins"), k),
                         "net '" + net.name + "' has a dangling pin reference");
      }
    }
    if (net.pins[0].comp == net.pins[1].comp) {
      throw ParseError(key_path(path, "pins"),
                       "net '" + net.name + "' connects two ports of the same component");
    }
  }

  // A component may appear in at most one alignment group per axis.
  std::vector<std::array<int, 2>> align_owner(d.components.size(), {-1, -1});
  for (std::size_t g = 0; g < d.groups.size(); ++g) {
    const ConstraintGroup& group = d.groups[g];
    const std::string path = index_path("constraints", g);
    if (group.members.size() < 2) {
      throw ParseError(key_path(path, "members"), "a constraint group needs at least 2 members");
    }
    std::set<std::size_t> seen;
    for (std::size_t m = 0; m < group.members.size(); ++m) {
      const std::size_t ci = group.members[m];
      const std::string mp = index_path(key_path(path, "members"), m);
      if (ci >= d.components.size()) throw ParseError(mp, "unknown component");
      if (d.components[ci].fixed) {
        throw ParseError(mp, "constraint member '" + d.components[ci].name + "' is fixed");
      }
      if (!seen.insert(ci).second) {
        throw ParseError(mp, "component '" + d.components[ci].name + "' listed twice");
      }
      if (is_alignment(group.kind)) {
        int& owner = align_owner[ci][static_cast<int>(group_axis(group.kind))];
        if (owner >= 0) {
          throw ParseError(mp, "component '" + d.components[ci].name +
                                   "' is in two alignment groups on the same axis (constraints[" +
                                   std::to_string(owner) + "])");
        }
        owner = static_cast<int>(g);
      }
    }
  }
}

Design parse_design(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ParseError("", std::string("malformed YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ParseError("", "document root must be a mapping");

  Design d;
  const YAML::Node header = require(root, "design", "");
  d.name = text(header, "name", "design");
  const YAML::Node die = require(header, "die", "design");
  d.die.width = number(die, "width", "design.die");
  d.die.height = number(die, "height", "design.die");
  const YAML::Node tech = require(header, "tech", "design");
  d.tech.bend_radius = number(tech, "bend_radius", "design.tech");
  d.tech.crossing_size = number(tech, "crossing_size", "design.tech");
  d.tech.waveguide_width = number(tech, "waveguide_width", "design.tech");
  if (YAML::Node flow = header["signal_flow"]; flow && !flow.IsNull()) {
    const auto s = scalar<std::string>(flow, "design.signal_flow", "x or y");
    if (s == "x") {
      d.signal_flow = Axis::X;
    } else if (s == "y") {
      d.signal_flow = Axis::Y;
    } else {
      throw ParseError("design.signal_flow", "signal_flow must be x or y (got '" + s + "')");
    }
  }

  const YAML::Node comps = sequence(root, "components", "", true);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    d.components.push_back(parse_component(comps[i], index_path("components", i)));
  }
  // Duplicates first, so a clash is not reported as a dangling net reference.
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    if (!seen.insert(d.components[i].name).second) {
      throw ParseError(key_path(index_path("components", i), "name"),
                       "duplicate component name '" + d.components[i].name + "'");
    }
  }

  const YAML::Node nets = sequence(root, "nets", "", false);
  for (std::size_t n = 0; n < nets.size(); ++n) {
    const std::string path = index_path("nets", n);
    const YAML::Node& nn = nets[n];
    Net net;
    net.name = text(nn, "name", path);
    net.weight = optional_number(nn, "weight", path, 1.0);
    const YAML::Node pins = sequence(nn, "pins", path, true);
    if (pins.size() != 2) {
      throw ParseError(key_path(path, "pins"), "net '" + net.name + "' must have exactly 2 pins, has " +
                                                   std::to_string(pins.size()));
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const std::string pp = index_path(key_path(path, "pins"), k);
      const std::string comp = text(pins[k], "comp", pp);
      const std::string port = text(pins[k], "port", pp);
      const auto ci = d.find_component(comp);
      if (!ci) {
        throw ParseError(key_path(pp, "comp"),
                         "net '" + net.name + "' references unknown component '" + comp + "'");
      }
      const auto pi = d.components[*ci].find_port(port);
      if (!pi) {
        throw ParseError(key_path(pp, "port"), "net '" + net.name + "' references missing port '" +
                                                   port + "' on component '" + comp + "'");
      }
      net.pins[k] = {*ci, *pi};
    }
    d.nets.push_back(std::move(net));
  }

  const YAML::Node groups = sequence(root, "constraints", "", false);
  std::vector<std::string> names;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    d.groups.push_back(parse_group(groups[g], index_path("constraints", g), d, names));
  }

  if (YAML::Node meta = root["placement_meta"]; meta && meta.IsMap()) {
    PlacementMeta pm;
    pm.iterations = static_cast<int>(optional_number(meta, "iterations", "placement_meta", 0));
    pm.final_overflow = optional_number(meta, "final_overflow", "placement_meta", 0.0);
    if (YAML::Node s = meta["seed"]; s && !s.IsNull()) {
      pm.seed = scalar<std::uint64_t>(s, "placement_meta.seed", "an unsigned integer");
    }
    d.meta = pm;
  }

  finalize_design(d);
  return d;
}

Design load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open netlist file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_design(buf.str());
}

std::string write_design(const Design& d) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "design" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << d.name;
  out << YAML::Key << "die" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "width" << YAML::Value << d.die.width;
  out << YAML::Key << "height" << YAML::Value << d.die.height;
  out << YAML::EndMap;
  out << YAML::Key << "tech" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "bend_radius" << YAML::Value << d.tech.bend_radius;
  out << YAML::Key << "crossing_size" << YAML::Value << d.tech.crossing_size;
  out << YAML::Key << "waveguide_width" << YAML::Value << d.tech.waveguide_width;
  out << YAML::EndMap;
  out << YAML::Key << "signal_flow" << YAML::Value << (d.signal_flow == Axis::X ? "x" : "y");
  out << YAML::EndMap;

  out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
  for (const Component& c : d.components) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "cell" << YAML::Value << c.cell;
    out << YAML::Key << "width" << YAML::Value << c.width;
    out << YAML::Key << "height" << YAML::Value << c.height;
    out << YAML::Key << "fixed" << YAML::Value << c.fixed;
    if (c.has_position) {
      out << YAML::Key << "x" << YAML::Value << c.position.x;
      out << YAML::Key << "y" << YAML::Value << c.position.y;
    }
    if (c.halo != 0.0) out << YAML::Key << "halo" << YAML::Value << c.halo;
    out << YAML::Key << "ports" << YAML::Value << YAML::BeginSeq;
    for (const Port& p : c.ports) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << p.name;
      out << YAML::Key << "dx" << YAML::Value << p.offset.x;
      out << YAML::Key << "dy" << YAML::Value << p.offset.y;
      out << YAML::Key << "dir" << YAML::Value << std::string(1, dir_letter(p.dir));
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "nets" << YAML::Value << YAML::BeginSeq;
  for (const Net& n : d.nets) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << n.name;
    if (n.weight != 1.0) out << YAML::Key << "weight" << YAML::Value << n.weight;
    out << YAML::Key << "pins" << YAML::Value << YAML::BeginSeq;
    for (const PinRef& pin : n.pins) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "comp" << YAML::Value << d.components[pin.comp].name;
      out << YAML::Key << "port" << YAML::Value << d.components[pin.comp].ports[pin.port].name;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  if (!d.groups.empty()) {
    out << YAML::Key << "constraints" << YAML::Value << YAML::BeginSeq;
    for (const ConstraintGroup& g : d.groups) {
      out << YAML::BeginMap;
      if (is_alignment(g.kind)) {
        out << YAML::Key << "type" << YAML::Value << "alignment";
        out << YAML::Key << "mode" << YAML::Value << std::string(group_kind_name(g.kind));
      } else {
        out << YAML::Key << "type" << YAML::Value << "uniform-spacing";
        out << YAML::Key << "axis" << YAML::Value << std::string(group_kind_name(g.kind));
      }
      out << YAML::Key << "members" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (std::size_t m : g.members) out << d.components[m].name;
      out << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }

  if (d.meta) {
    out << YAML::Key << "placement_meta" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "iterations" << YAML::Value << d.meta->iterations;
    out << YAML::Key << "final_overflow" << YAML::Value << d.meta->final_overflow;
    out << YAML::Key << "seed" << YAML::Value << d.meta->seed;
    out << YAML::EndMap;
  }

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace picplace
