#include "picplace/report.hpp"

#include "picplace/state.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace picplace {

std::string trace_jsonl(const Design& design, const PlaceResult& result) {
  std::map<int, const TraceRecord*> by_iter;
  for (const TraceRecord& r : result.trace) by_iter[r.iteration] = &r;
  const std::size_t nm = design.movable.size();
  const std::size_t nf = result.fillers.count;

  std::string out;
  for (const Snapshot& s : result.snapshots) {
    nlohmann::ordered_json j;
    j["iteration"] = s.iteration;
    if (auto it = by_iter.find(s.iteration); it != by_iter.end()) {
      const TraceRecord& r = *it->second;
      j["objective"] = r.objective;
      j["wirelength"] = r.wirelength;
      j["spacing"] = r.spacing;
      j["density"] = r.density;
      j["overflow"] = r.overflow;
      j["hpwl"] = r.hpwl;
      j["gamma"] = r.gamma;
      j["lambda_density"] = r.lambda_density;
      j["sharpness"] = r.sharpness;
      if (r.crossings) j["crossings"] = *r.crossings;
    }
    std::vector<std::array<double, 2>> mov(nm), fil(nf);
    for (std::size_t k = 0; k < nm; ++k) mov[k] = {s.coords[k], s.coords[nm + k]};
    for (std::size_t f = 0; f < nf; ++f) {
      fil[f] = {s.coords[2 * nm + f], s.coords[2 * nm + nf + f]};
    }
    j["movable"] = mov;
    j["fillers"] = fil;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string frame_svg(const Design& design, const FillerSet& fillers, const Snapshot& snap) {
  const double W = design.die.width;
  const double H = design.die.height;
  const double stroke = 0.002 * std::max(W, H);
  std::ostringstream o;
  o.precision(6);
  // y grows downward in SVG; flip so the layout reads like the die.
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -0.02 * W << ' ' << -0.02 * H
    << ' ' << 1.04 * W << ' ' << 1.04 * H << "\">\n";
  o << "<g transform=\"translate(0," << H << ") scale(1,-1)\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
    << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << stroke << "\"/>\n";

  const std::size_t nm = design.movable.size();
  const std::size_t nf = fillers.count;
  for (std::size_t f = 0; f < nf && 2 * (nm + nf) == snap.coords.size(); ++f) {
    o << "<rect x=\"" << snap.coords[2 * nm + f] << "\" y=\"" << snap.coords[2 * nm + nf + f]
      << "\" width=\"" << fillers.width << "\" height=\"" << fillers.height
      << "\" fill=\"#cccccc\" fill-opacity=\"0.25\"/>\n";
  }
  const auto pos = component_positions(design, snap.coords);
  for (std::size_t i = 0; i < design.components.size(); ++i) {
    const Component& c = design.components[i];
    o << "<rect x=\"" << pos[i].x << "\" y=\"" << pos[i].y << "\" width=\"" << c.width
      << "\" height=\"" << c.height << "\" fill=\"" << (c.fixed ? "#888888" : "#4a7bd0")
      << "\" fill-opacity=\"0.6\" stroke=\"#1b2a4a\" stroke-width=\"" << stroke << "\"/>\n";
  }
  for (const Net& n : design.nets) {
    const Vec2 a = pos[n.pins[0].comp] + design.components[n.pins[0].comp].ports[n.pins[0].port].offset;
    const Vec2 b = pos[n.pins[1].comp] + design.components[n.pins[1].comp].ports[n.pins[1].port].offset;
    o << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y
      << "\" stroke=\"#d04a4a\" stroke-width=\"" << stroke << "\"/>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::size_t emit_frames(const Design& design, const PlaceResult& result,
                        const std::filesystem::path& dir) {
  if (result.snapshots.empty()) return 0;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create frame directory " + dir.string());
  std::size_t written = 0;
  for (const Snapshot& s : result.snapshots) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06d.svg", s.iteration);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << frame_svg(design, result.fillers, s);
    ++written;
  }
  return written;
}

}  // namespace picplace
