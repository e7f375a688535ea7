#include "picplace/cli.hpp"

#include "picplace/benchgen.hpp"
#include "picplace/legalize.hpp"
#include "picplace/metrics.hpp"
#include "picplace/placer.hpp"
#include "picplace/report.hpp"

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

namespace picplace {

namespace {

namespace fs = std::filesystem;

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

const std::map<std::string, WirelengthModel> kWl{{"coswa", WirelengthModel::CosWA},
                                                 {"wa", WirelengthModel::WA},
                                                 {"lse", WirelengthModel::LSE},
                                                 {"quadratic", WirelengthModel::Quadratic}};
const std::map<std::string, SpacingVariant> kSpacing{{"none", SpacingVariant::None},
                                                     {"pi", SpacingVariant::PortInflation},
                                                     {"rbend", SpacingVariant::RbendOnly},
                                                     {"portcount", SpacingVariant::PortCountOnly},
                                                     {"full", SpacingVariant::Full}};
const std::map<std::string, OptimizerKind> kOpt{{"bnag", OptimizerKind::BNAG},
                                                {"nag-bb", OptimizerKind::NagBB},
                                                {"nag", OptimizerKind::Nag},
                                                {"adam", OptimizerKind::Adam}};
const std::map<std::string, InitMode> kInit{{"center-random", InitMode::CenterRandom},
                                            {"manual", InitMode::Manual}};

struct PlaceOptions {
  RunConfig cfg;
  LossModel loss;
  std::string frames;
  std::string trace;
  bool timing = false;
};

void add_place_options(CLI::App* app, PlaceOptions& o) {
  RunConfig& c = o.cfg;
  app->add_option("--wl", c.wirelength.model, "wirelength model")
      ->transform(CLI::CheckedTransformer(kWl, CLI::ignore_case));
  app->add_option("--alpha", c.wirelength.alpha, "span exponent of cosWA")->capture_default_str();
  app->add_option("--gamma0", c.gamma0_bins, "smoothing length at zero overflow, in bins")
      ->capture_default_str();
  app->add_option("--angle-margin", c.wirelength.margin, "angle margin c")->capture_default_str();
  app->add_flag("--theta2-raw", c.wirelength.theta2_raw,
                "measure the second port angle against +w");
  app->add_option("--spacing", c.spacing.variant, "spacing model")
      ->transform(CLI::CheckedTransformer(kSpacing, CLI::ignore_case));
  app->add_option("--lambda-ns", c.spacing.lambda, "spacing weight")->capture_default_str();
  app->add_option("--spacing-refresh", c.spacing.refresh_period,
                  "iterations between crossing refreshes")
      ->capture_default_str();
  app->add_flag("--spacing-literal", c.spacing.literal, "penalise clearance above the demand");
  app->add_option("--target-density", c.density.target_density, "target bin density")
      ->capture_default_str();
  app->add_option("--grid", c.density.grid, "bins per side (0 = automatic)")
      ->capture_default_str();
  app->add_option("--rho", c.density.rho, "quadratic density coefficient")->capture_default_str();
  app->add_option("--overflow-stop", c.density.overflow_stop, "stop overflow")
      ->capture_default_str();
  app->add_option("--optimizer", c.optimizer.kind, "optimizer")
      ->transform(CLI::CheckedTransformer(kOpt, CLI::ignore_case));
  app->add_option("--iters", c.optimizer.max_iters, "iteration budget")->capture_default_str();
  app->add_option("--eta0", c.optimizer.eta0, "initial step scaling")->capture_default_str();
  app->add_option("--eta-min", c.optimizer.eta_min, "final step scaling")->capture_default_str();
  app->add_option("--s0", c.projection.s0, "initial projection sharpness")->capture_default_str();
  app->add_option("--sT", c.projection.sT, "final projection sharpness")->capture_default_str();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--init", c.init, "initial placement")
      ->transform(CLI::CheckedTransformer(kInit, CLI::ignore_case));
  app->add_option("--frames", o.frames, "directory for SVG frames");
  app->add_option("--trace", o.trace, "JSON-lines trace file");
  app->add_flag("--timing", o.timing, "record wall time in the metrics file");
}

void add_loss_options(CLI::App* app, LossModel& loss) {
  app->add_option("--prop-loss", loss.propagation_db_per_cm, "propagation loss, dB/cm")
      ->capture_default_str();
  app->add_option("--bend-loss", loss.bend_db, "loss per 90-degree bend, dB")
      ->capture_default_str();
  app->add_option("--crossing-loss", loss.crossing_db, "loss per crossing, dB")
      ->capture_default_str();
}

Design load(const std::string& path) {
  try {
    return load_design(path);
  } catch (const std::exception& e) {
    throw CliError(kExitValidation, path + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError(kExitValidation, "cannot write " + path.string());
  f << text;
  if (!f) throw CliError(kExitValidation, "failed writing " + path.string());
}

std::vector<Vec2> all_positions(const Design& d) {
  std::vector<Vec2> p;
  for (const Component& c : d.components) p.push_back(c.position);
  return p;
}

std::string violations_json(const Design& d, const std::vector<Violation>& vs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Violation& v : vs) {
    nlohmann::ordered_json j;
    if (v.kind == Violation::Kind::Overlap) {
      j["kind"] = "overlap";
      j["a"] = d.components[v.a].name;
      j["b"] = d.components[v.b].name;
      j["area"] = v.area;
    } else {
      j["kind"] = "out_of_die";
      j["component"] = d.components[v.a].name;
      j["side"] = v.side;
    }
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Placed {
  Design design;
  PlaceResult result;
};

Placed do_place(const std::string& input, const PlaceOptions& o, std::ostream& out) {
  Design d = load(input);
  try {
    validate(o.cfg);
  } catch (const std::exception& e) {
    throw CliError(kExitValidation, e.what());
  }
  PlaceResult r;
  try {
    r = run_global(d, o.cfg);
  } catch (const std::invalid_argument& e) {
    throw CliError(kExitValidation, e.what());
  }
  apply_state(d, r.state.coords);
  d.meta = PlacementMeta{r.iterations, r.final_overflow, o.cfg.seed};
  out << "global placement: " << status_name(r.status) << " after " << r.iterations
      << " iterations, overflow " << r.final_overflow << "\n";
  return {std::move(d), std::move(r)};
}

void write_place_artifacts(const Placed& p, const std::string& trace, const std::string& frames) {
  if (!trace.empty()) write_file(trace, trace_jsonl(p.design, p.result));
  if (!frames.empty()) {
    try {
      emit_frames(p.design, p.result, frames);
    } catch (const std::exception& e) {
      throw CliError(kExitValidation, e.what());
    }
  }
}

int cmd_bench(int clements, int butterfly, const std::string& size, std::uint64_t seed,
              const std::string& output, std::ostream& out) {
  if ((clements > 0) == (butterfly > 0)) {
    throw CliError(kExitValidation, "bench needs exactly one of --clements or --butterfly");
  }
  const DieClass cls = size == "L" || size == "l" ? DieClass::L : DieClass::S;
  Design d;
  try {
    if (clements > 0) {
      ClementsSpec s;
      s.modes = clements;
      s.size = cls;
      d = gen_clements(s);
    } else {
      ButterflySpec s;
      s.ports = butterfly;
      s.size = cls;
      s.seed = seed;
      d = gen_butterfly(s);
    }
  } catch (const std::exception& e) {
    throw CliError(kExitValidation, e.what());
  }
  write_file(output, write_design(d));
  out << "wrote " << output << " (" << d.components.size() << " components, " << d.nets.size()
      << " nets)\n";
  return kExitOk;
}

int cmd_place(const std::string& input, const std::string& output, const std::string& metrics,
              const PlaceOptions& o, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  Placed p = do_place(input, o, out);
  const double wall = seconds_since(t0);
  write_file(output, write_design(p.design));
  write_place_artifacts(p, o.trace, o.frames);
  if (!metrics.empty()) {
    MetricsReport m = evaluate(p.design, all_positions(p.design), o.loss);
    m.wall_time = o.timing ? wall : 0.0;
    write_file(metrics, metrics_json(m));
  }
  err << "wall time: " << wall << " s\n";
  if (p.result.status == PlaceStatus::Diverged) {
    err << "error: " << p.result.message << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_legalize(const std::string& input, const std::string& output,
                 const std::string& violations, std::ostream& out, std::ostream& err) {
  Design d = load(input);
  const LegalizeResult r = legalize(d, all_positions(d));
  for (std::size_t i : d.movable) d.components[i].position = r.positions[i];
  write_file(output, write_design(d));
  if (!violations.empty()) write_file(violations, violations_json(d, r.violations));
  out << "legalization: " << (r.status == LegalStatus::Success ? "success" : "failure")
      << ", total displacement " << r.total_displacement << ", max " << r.max_displacement
      << "\n";
  if (r.status != LegalStatus::Success) {
    err << "error: " << r.violations.size() << " violations remain\n";
    return kExitLegalization;
  }
  return kExitOk;
}

int cmd_metrics(const std::string& input, const std::string& output, const LossModel& loss,
                std::ostream& out) {
  Design d = load(input);
  MetricsReport m;
  try {
    m = evaluate(d, all_positions(d), loss);
  } catch (const std::invalid_argument& e) {
    throw CliError(kExitValidation, e.what());
  }
  if (output.empty()) {
    out << metrics_json(m);
  } else {
    write_file(output, metrics_json(m));
  }
  return kExitOk;
}

int cmd_run_all(const std::string& input, const std::string& out_dir, const PlaceOptions& o,
                std::ostream& out, std::ostream& err) {
  const fs::path dir(out_dir);
  const auto t0 = Clock::now();
  Placed p = do_place(input, o, out);
  write_file(dir / "placed.yaml", write_design(p.design));
  write_place_artifacts(p, o.trace.empty() ? (dir / "trace.jsonl").string() : o.trace,
                        o.frames);
  if (p.result.status == PlaceStatus::Diverged) {
    err << "error: " << p.result.message << "\n";
    return kExitDiverged;
  }
  Design legal = p.design;
  const LegalizeResult lr = legalize(legal, all_positions(legal));
  for (std::size_t i : legal.movable) legal.components[i].position = lr.positions[i];
  const double wall = seconds_since(t0);
  write_file(dir / "legal.yaml", write_design(legal));
  write_file(dir / "violations.json", violations_json(legal, lr.violations));
  MetricsReport m = evaluate(legal, lr.positions, o.loss);
  m.wall_time = o.timing ? wall : 0.0;
  write_file(dir / "metrics.json", metrics_json(m));
  out << "legalization: " << (lr.status == LegalStatus::Success ? "success" : "failure")
      << ", total displacement " << lr.total_displacement << "\n";
  out << "CR " << m.crossings << ", HPWL " << m.hpwl << ", BA_tot " << m.ba_tot << ", IL_max "
      << m.il_max << ", spacing violations " << m.spacing_violations << "\n";
  err << "wall time: " << wall << " s\n";
  if (lr.status != LegalStatus::Success) {
    err << "error: " << lr.violations.size() << " violations remain after legalization\n";
    return kExitLegalization;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical placement for photonic integrated circuits", "picplace"};
  app.require_subcommand(1);

  int clements = 0;
  int butterfly = 0;
  std::string size = "S";
  std::uint64_t bench_seed = 0;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "generate a benchmark netlist");
  bench->add_option("--clements", clements, "Clements mesh with N modes");
  bench->add_option("--butterfly", butterfly, "butterfly network with N ports");
  bench->add_option("--size", size, "die class S or L")->check(CLI::IsMember({"S", "L", "s", "l"}));
  bench->add_option("--seed", bench_seed, "input permutation seed (butterfly)");
  bench->add_option("-o,--output", bench_out, "output YAML")->required();

  PlaceOptions place_opts;
  std::string place_in, place_out, place_metrics;
  auto* place = app.add_subcommand("place", "global placement");
  place->add_option("input", place_in, "netlist YAML")->required();
  place->add_option("-o,--output", place_out, "placed YAML")->required();
  place->add_option("--metrics", place_metrics, "metrics JSON of the placed layout");
  add_place_options(place, place_opts);
  add_loss_options(place, place_opts.loss);

  std::string leg_in, leg_out, leg_viol;
  auto* leg = app.add_subcommand("legalize", "remove overlaps from a placed netlist");
  leg->add_option("input", leg_in, "placed YAML")->required();
  leg->add_option("-o,--output", leg_out, "legalized YAML")->required();
  leg->add_option("--violations", leg_viol, "violation report JSON");

  std::string met_in, met_out;
  LossModel met_loss;
  auto* met = app.add_subcommand("metrics", "evaluate a placed netlist");
  met->add_option("input", met_in, "placed YAML")->required();
  met->add_option("-o,--output", met_out, "metrics JSON (default: standard output)");
  add_loss_options(met, met_loss);

  PlaceOptions all_opts;
  std::string all_in, all_dir = ".";
  auto* all = app.add_subcommand("run-all", "place, legalize and evaluate");
  all->add_option("input", all_in, "netlist YAML")->required();
  all->add_option("--out-dir", all_dir, "output directory")->capture_default_str();
  add_place_options(all, all_opts);
  add_loss_options(all, all_opts.loss);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*bench) return cmd_bench(clements, butterfly, size, bench_seed, bench_out, out);
    if (*place) return cmd_place(place_in, place_out, place_metrics, place_opts, out, err);
    if (*leg) return cmd_legalize(leg_in, leg_out, leg_viol, out, err);
    if (*met) return cmd_metrics(met_in, met_out, met_loss, out);
    if (*all) return cmd_run_all(all_in, all_dir, all_opts, out, err);
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace picplace
