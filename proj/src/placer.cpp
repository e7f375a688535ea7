#include "picplace/placer.hpp"

#include "picplace/random.hpp"

#include <cmath>
#include <stdexcept>

namespace picplace {

void validate(const RunConfig& c) {
  validate(c.wirelength);
  validate(c.spacing);
  validate(c.density);
  validate(c.projection);
  validate(c.optimizer);
  if (!(c.gamma0_bins > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  if (c.snapshot_every < 1) throw std::invalid_argument("snapshot cadence must be >= 1");
}

std::string_view status_name(PlaceStatus s) {
  switch (s) {
    case PlaceStatus::Success: return "success";
    case PlaceStatus::MaxIterations: return "max_iterations";
    case PlaceStatus::Diverged: return "diverged";
  }
  return "?";
}

namespace {

RunConfig normalized(RunConfig c) {
  c.projection.T = c.optimizer.max_iters;
  return c;
}

std::vector<double> port_halos(const Design& d, const SpacingParams& p) {
  if (p.variant != SpacingVariant::PortInflation) return {};
  return inflate_for_ports(d, d.tech);
}

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

Placer::Placer(const Design& design, const RunConfig& config)
    : design_(design),
      cfg_(normalized(config)),
      fillers_(cfg_.density_enabled ? make_fillers(design, cfg_.density) : FillerSet{}),
      density_(std::make_unique<DensityModel>(design, fillers_, cfg_.density,
                                              port_halos(design, cfg_.spacing))),
      projector_(design, cfg_.projection, fillers_),
      wl_(cfg_.wirelength) {
  validate(cfg_);
  bin_size_ = density_->spec().bin_size();
  spacing_cache_ = compute_net_spacing(design, cfg_.spacing.variant);
}

PlacementState Placer::initialize() const {
  PlacementState s(design_.movable.size(), fillers_.count);
  s.seed = cfg_.seed;
  Rng rng(cfg_.seed);
  const double W = design_.die.width;
  const double H = design_.die.height;
  for (std::size_t k = 0; k < design_.movable.size(); ++k) {
    const Component& c = design_.components[design_.movable[k]];
    if (cfg_.init == InitMode::Manual) {
      if (!c.has_position) {
        throw std::invalid_argument("manual initialization: component '" + c.name +
                                    "' has no position");
      }
      s.set_movable(k, c.position);
      continue;
    }
    const double jx = rng.uniform(-0.02, 0.02) * W;
    const double jy = rng.uniform(-0.02, 0.02) * H;
    s.set_movable(k, {0.5 * (W - c.width) + jx, 0.5 * (H - c.height) + jy});
  }
  for (std::size_t f = 0; f < fillers_.count; ++f) {
    const double x = rng.uniform(0.0, std::max(0.0, W - fillers_.width));
    const double y = rng.uniform(0.0, std::max(0.0, H - fillers_.height));
    s.set_filler(f, {x, y});
  }
  return s;
}

void Placer::refresh_spacing(std::span<const double> coords) {
  const auto pos = component_positions(design_, coords);
  const auto segs = net_segments(design_, pos);
  const CrossingCount cc = count_crossings(segs);
  last_crossings_ = cc.total;
  spacing_cache_ = compute_net_spacing(design_, cfg_.spacing.variant, cc.per_segment);
}

ObjectiveBreakdown Placer::objective(std::span<const double> coords, std::span<double> grad) {
  ObjectiveBreakdown out;
  std::fill(grad.begin(), grad.end(), 0.0);
  const auto pos = component_positions(design_, coords);

  const WirelengthResult wl = total_wirelength(design_, pos, wl_);
  out.wirelength = wl.value;
  scatter_gradient(design_, wl.grad, grad);

  const SpacingResult sp = spacing_penalty(design_, pos, spacing_cache_, cfg_.spacing);
  out.spacing = sp.value;
  scatter_gradient(design_, sp.grad, grad);

  if (cfg_.density_enabled) {
    const DensityTerm term = density_->evaluate(coords);
    const AugmentedDensity aug = augmented_density(term, lambda_d_, cfg_.density.rho);
    out.density = aug.value;
    out.overflow = term.overflow;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += aug.grad[i];
  } else {
    out.overflow = density_->overflow_at(coords);
  }
  out.value = out.wirelength + out.spacing + out.density;
  last_ = out;
  return out;
}

PlaceResult Placer::run() {
  PlaceResult res;
  res.fillers = fillers_;
  PlacementState init = initialize();
  projector_.apply(init.coords, 0);

  // Balance the density weight against the wirelength gradient at the start.
  {
    const DensityTerm t0 = density_->evaluate(init.coords);
    wl_.gamma = gamma_schedule(bin_size_, t0.overflow, cfg_.gamma0_bins);
    const auto pos = component_positions(design_, init.coords);
    std::vector<double> gwl(init.size(), 0.0);
    scatter_gradient(design_, total_wirelength(design_, pos, wl_).grad, gwl);
    lambda_d_ = cfg_.density_enabled
                    ? DensityWeight::balance(l1(gwl), l1(t0.grad), t0.D, cfg_.density.rho)
                    : 0.0;
  }
  DensityWeight weight(lambda_d_);

  // The projection strength follows the sharpness schedule until overflow
  // first drops below the stop level; from then on groups are held at s_T.
  bool snapped = false;
  auto project = [&](std::span<double> x, int k) {
    if (snapped) {
      projector_.apply_with(x, cfg_.projection.sT);
    } else {
      projector_.apply(x, k);
    }
  };
  auto grad_fn = [&](std::span<const double> x, std::span<double> g) {
    return objective(x, g).value;
  };

  const int n_mov = static_cast<int>(design_.movable.size());
  const std::size_t nf = fillers_.count;
  std::vector<Block> blocks;
  const std::size_t nm = static_cast<std::size_t>(n_mov);
  if (cfg_.optimizer.kind == OptimizerKind::BNAG) {
    blocks = {{0, nm}, {nm, 2 * nm}, {2 * nm, 2 * nm + nf}, {2 * nm + nf, 2 * (nm + nf)}};
  } else {
    blocks = {{0, 2 * (nm + nf)}};
  }
  OptimizerParams op = cfg_.optimizer;
  op.ref_length = bin_size_;
  Optimizer opt(op, blocks, grad_fn, project);

  auto record = [&](int k, const std::vector<double>& coords, std::optional<std::size_t> cr) {
    TraceRecord r;
    r.iteration = k;
    r.objective = last_.value;
    r.wirelength = last_.wirelength;
    r.spacing = last_.spacing;
    r.density = last_.density;
    r.overflow = std::clamp(last_.overflow, 0.0, 1.0);
    r.hpwl = hpwl(design_, component_positions(design_, coords));
    r.gamma = wl_.gamma;
    r.lambda_density = lambda_d_;
    r.sharpness = snapped ? cfg_.projection.sT : sharpness(k, cfg_.projection);
    r.crossings = cr;
    res.trace.push_back(r);
    if (k % cfg_.snapshot_every == 0) res.snapshots.push_back({k, coords});
  };

  PlacementState last_good = init;
  if (!opt.start(init.coords)) {
    res.state = init;
    res.status = PlaceStatus::Diverged;
    res.message = "non-finite objective at the initial placement";
    return res;
  }
  record(0, opt.solution(), std::nullopt);

  const double tau = cfg_.density.overflow_stop;
  res.status = PlaceStatus::MaxIterations;
  int k = 0;
  for (k = 1; k <= cfg_.optimizer.max_iters; ++k) {
    if (!opt.step()) {
      res.status = PlaceStatus::Diverged;
      res.message = "non-finite objective or gradient at iteration " + std::to_string(k);
      --k;
      break;
    }
    last_good.coords = opt.solution();

    std::optional<std::size_t> cr;
    if (is_refresh_iteration(k, cfg_.spacing)) {
      refresh_spacing(opt.solution());
      cr = last_crossings_;
    }
    record(k, opt.solution(), cr);

    if (cfg_.density_enabled && last_.overflow < tau) {
      if (snapped || cfg_.projection.sT <= 0.0) {
        res.status = PlaceStatus::Success;
        break;
      }
      snapped = true;
    }
    if (cfg_.density_enabled) {
      wl_.gamma = gamma_schedule(bin_size_, last_.overflow, cfg_.gamma0_bins);
      weight.advance();
      lambda_d_ = weight.value();
    }
  }
  res.iterations = std::min(k, cfg_.optimizer.max_iters);

  res.state = last_good;
  res.state.iteration = res.iterations;
  res.state.seed = cfg_.seed;
  // Final projection at full strength so groups hold exactly at termination.
  projector_.apply_with(res.state.coords, cfg_.projection.sT);
  res.final_overflow = std::clamp(density_->overflow_at(res.state.coords), 0.0, 1.0);
  if (res.status == PlaceStatus::Success && res.final_overflow >= tau) {
    res.status = PlaceStatus::MaxIterations;
  }
  if (res.snapshots.empty() || res.snapshots.back().iteration != res.iterations) {
    res.snapshots.push_back({res.iterations, res.state.coords});
  } else {
    res.snapshots.back().coords = res.state.coords;
  }
  return res;
}

PlaceResult run_global(const Design& design, const RunConfig& config) {
  Placer p(design, config);
  return p.run();
}

}  // namespace picplace
