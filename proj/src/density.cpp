#include "picplace/density.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace picplace {

void validate(const DensityParams& p) {
  if (p.grid != 0 && (p.grid < 8 || (p.grid & (p.grid - 1)) != 0)) {
    throw std::invalid_argument("density grid must be a power of two >= 8");
  }
  if (!(p.target_density > 0.0 && p.target_density <= 1.0)) {
    throw std::invalid_argument("target density must lie in (0, 1]");
  }
  if (!(p.rho >= 0.0)) throw std::invalid_argument("rho must be non-negative");
  if (!(p.overflow_stop >= 0.0)) throw std::invalid_argument("overflow stop must be non-negative");
}

int auto_grid_size(std::size_t count) {
  const double want = 2.0 * std::sqrt(static_cast<double>(count));
  int m = 1;
  while (m < want) m *= 2;
  return std::clamp(m, 64, 1024);
}

Charge make_charge(const Rect& r, const GridSpec& g) {
  const Vec2 c = r.center();
  const double w = std::max(r.width(), g.bin_w);
  const double h = std::max(r.height(), g.bin_h);
  Charge out;
  out.rect = {c.x - 0.5 * w, c.y - 0.5 * h, c.x + 0.5 * w, c.y + 0.5 * h};
  out.weight = r.area() / (w * h);
  return out;
}

namespace {

struct Span1 {
  int lo = 0;
  int hi = -1;  // inclusive
};

Span1 covered(double a, double b, double h, int n) {
  Span1 s;
  s.lo = std::max(0, static_cast<int>(std::floor(a / h)));
  s.hi = std::min(n - 1, static_cast<int>(std::ceil(b / h)) - 1);
  return s;
}

}  // namespace

void stamp(const Charge& c, const GridSpec& g, std::span<double> map) {
  const Span1 cx = covered(c.rect.xl, c.rect.xh, g.bin_w, g.nx);
  const Span1 cy = covered(c.rect.yl, c.rect.yh, g.bin_h, g.ny);
  const double scale = c.weight / g.bin_area();
  for (int iy = cy.lo; iy <= cy.hi; ++iy) {
    const double oy = overlap_length(c.rect.yl, c.rect.yh, iy * g.bin_h, (iy + 1) * g.bin_h);
    if (oy <= 0.0) continue;
    for (int ix = cx.lo; ix <= cx.hi; ++ix) {
      const double ox = overlap_length(c.rect.xl, c.rect.xh, ix * g.bin_w, (ix + 1) * g.bin_w);
      map[static_cast<std::size_t>(iy) * g.nx + ix] += scale * ox * oy;
    }
  }
}

double overflow(std::span<const double> map, const GridSpec& g, double target,
                double movable_area) {
  if (!(movable_area > 0.0)) return 0.0;
  double excess = 0.0;
  for (double d : map) excess += std::max(0.0, d - target);
  return excess * g.bin_area() / movable_area;
}

struct PoissonSolver::Impl {
  int nx;
  int ny;
  double lx;
  double ly;
  std::vector<double> lam_x;
  std::vector<double> lam_y;
  std::vector<double> coef;
  double* in = nullptr;
  double* out = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  fftw_plan deriv_x = nullptr;
  fftw_plan deriv_y = nullptr;
};

PoissonSolver::PoissonSolver(int nx, int ny, double hx, double hy) : impl_(new Impl) {
  if (nx < 2 || ny < 2 || !(hx > 0.0) || !(hy > 0.0)) {
    throw std::invalid_argument("Poisson grid must be at least 2x2 with positive spacing");
  }
  Impl& s = *impl_;
  s.nx = nx;
  s.ny = ny;
  s.lx = nx * hx;
  s.ly = ny * hy;
  s.lam_x.resize(nx);
  s.lam_y.resize(ny);
  for (int u = 0; u < nx; ++u) {
    s.lam_x[u] = (2.0 - 2.0 * std::cos(std::numbers::pi * u / nx)) / (hx * hx);
  }
  for (int v = 0; v < ny; ++v) {
    s.lam_y[v] = (2.0 - 2.0 * std::cos(std::numbers::pi * v / ny)) / (hy * hy);
  }
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  s.coef.assign(n, 0.0);
  s.in = fftw_alloc_real(n);
  s.out = fftw_alloc_real(n);
  // FFTW_ESTIMATE keeps plan choice (and therefore rounding) reproducible.
  s.forward = fftw_plan_r2r_2d(ny, nx, s.in, s.out, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
  s.inverse = fftw_plan_r2r_2d(ny, nx, s.in, s.out, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
  s.deriv_x = fftw_plan_r2r_2d(ny, nx, s.in, s.out, FFTW_REDFT01, FFTW_RODFT01, FFTW_ESTIMATE);
  s.deriv_y = fftw_plan_r2r_2d(ny, nx, s.in, s.out, FFTW_RODFT01, FFTW_REDFT01, FFTW_ESTIMATE);
}

PoissonSolver::~PoissonSolver() {
  Impl& s = *impl_;
  fftw_destroy_plan(s.forward);
  fftw_destroy_plan(s.inverse);
  fftw_destroy_plan(s.deriv_x);
  fftw_destroy_plan(s.deriv_y);
  fftw_free(s.in);
  fftw_free(s.out);
}

void PoissonSolver::solve(std::span<const double> source, std::span<double> psi) {
  Impl& s = *impl_;
  const std::size_t n = s.coef.size();
  if (source.size() != n || psi.size() != n) throw std::invalid_argument("Poisson size mismatch");
  std::copy(source.begin(), source.end(), s.in);
  fftw_execute(s.forward);
  // Dropping the (0,0) mode removes the mean of the source.
  for (int v = 0; v < s.ny; ++v) {
    for (int u = 0; u < s.nx; ++u) {
      const std::size_t k = static_cast<std::size_t>(v) * s.nx + u;
      const double lam = s.lam_x[u] + s.lam_y[v];
      s.coef[k] = (u == 0 && v == 0) ? 0.0 : s.out[k] / lam;
    }
  }
  std::copy(s.coef.begin(), s.coef.end(), s.in);
  fftw_execute(s.inverse);
  const double norm = 1.0 / (4.0 * s.nx * s.ny);
  for (std::size_t k = 0; k < n; ++k) psi[k] = s.out[k] * norm;
}

void PoissonSolver::field(std::span<double> ex, std::span<double> ey) {
  Impl& s = *impl_;
  const std::size_t n = s.coef.size();
  if (ex.size() != n || ey.size() != n) throw std::invalid_argument("field size mismatch");
  const double norm = 1.0 / (4.0 * s.nx * s.ny);

  // Sine input slot j carries frequency j + 1; the top slot has no cosine
  // counterpart and stays zero.
  for (int v = 0; v < s.ny; ++v) {
    double* row = s.in + static_cast<std::size_t>(v) * s.nx;
    for (int u = 1; u < s.nx; ++u) {
      row[u - 1] = s.coef[static_cast<std::size_t>(v) * s.nx + u] * std::numbers::pi * u / s.lx;
    }
    row[s.nx - 1] = 0.0;
  }
  fftw_execute(s.deriv_x);
  for (std::size_t k = 0; k < n; ++k) ex[k] = s.out[k] * norm;

  for (int v = 1; v < s.ny; ++v) {
    for (int u = 0; u < s.nx; ++u) {
      s.in[static_cast<std::size_t>(v - 1) * s.nx + u] =
          s.coef[static_cast<std::size_t>(v) * s.nx + u] * std::numbers::pi * v / s.ly;
    }
  }
  std::fill_n(s.in + static_cast<std::size_t>(s.ny - 1) * s.nx, s.nx, 0.0);
  fftw_execute(s.deriv_y);
  for (std::size_t k = 0; k < n; ++k) ey[k] = s.out[k] * norm;
}

FillerSet make_fillers(const Design& design, const DensityParams& p) {
  FillerSet out;
  double occupied = 0.0;
  for (const Component& c : design.components) occupied += c.rect().inflated(c.halo).area();
  const double whitespace = p.target_density * design.die.area() - occupied;
  if (whitespace <= 0.0 || design.movable.empty()) return out;

  std::vector<double> areas;
  double aspect = 0.0;
  for (std::size_t i : design.movable) {
    const Component& c = design.components[i];
    areas.push_back(c.area());
    aspect += c.height / c.width;
  }
  aspect = std::clamp(aspect / static_cast<double>(design.movable.size()), 0.2, 5.0);
  // Fillers are elongated across the signal flow.
  aspect = design.signal_flow == Axis::X ? std::max(aspect, 1.0 / aspect)
                                         : std::min(aspect, 1.0 / aspect);

  std::nth_element(areas.begin(), areas.begin() + areas.size() / 2, areas.end());
  const double unit = 0.25 * areas[areas.size() / 2];
  out.count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(whitespace / unit)));
  const double a = whitespace / static_cast<double>(out.count);
  out.width = std::sqrt(a / aspect);
  out.height = std::sqrt(a * aspect);
  return out;
}

DensityModel::DensityModel(const Design& design, const FillerSet& fillers,
                           const DensityParams& p, std::span<const double> extra_halo)
    : design_(design), fillers_(fillers), params_(p) {
  validate(p);
  halo_.resize(design.components.size());
  for (std::size_t i = 0; i < halo_.size(); ++i) {
    halo_[i] = design.components[i].halo + (extra_halo.empty() ? 0.0 : extra_halo[i]);
  }
  movable_area_ = design.movable_area();
  if (!(movable_area_ > 0.0)) movable_area_ = std::max(design.total_area(), 1.0);
  const int m = p.grid != 0 ? p.grid : auto_grid_size(design.components.size() + fillers.count);
  grid_.spec = GridSpec::for_die(design.die, m);
  const std::size_t n = grid_.spec.bins();
  grid_.density.assign(n, 0.0);
  grid_.psi.assign(n, 0.0);
  own_.assign(n, 0.0);
  solver_ = std::make_unique<PoissonSolver>(m, m, grid_.spec.bin_w, grid_.spec.bin_h);
}

Rect DensityModel::footprint(std::size_t comp, Vec2 pos) const {
  return design_.components[comp].rect_at(pos).inflated(halo_[comp]);
}

namespace {

// d(overlap)/d(shift along x) summed against ψ: right edge gains, left edge
// loses one row-strip per covered row.
double edge_sum_x(const Charge& c, const GridSpec& g, std::span<const double> psi) {
  const double lx = g.nx * g.bin_w;
  const Span1 cy = covered(c.rect.yl, c.rect.yh, g.bin_h, g.ny);
  const bool right = c.rect.xh > 0.0 && c.rect.xh < lx;
  const bool left = c.rect.xl > 0.0 && c.rect.xl < lx;
  const int col_r = std::min(g.nx - 1, static_cast<int>(c.rect.xh / g.bin_w));
  const int col_l = std::min(g.nx - 1, static_cast<int>(c.rect.xl / g.bin_w));
  double sum = 0.0;
  for (int iy = cy.lo; iy <= cy.hi; ++iy) {
    const double oy = overlap_length(c.rect.yl, c.rect.yh, iy * g.bin_h, (iy + 1) * g.bin_h);
    const std::size_t row = static_cast<std::size_t>(iy) * g.nx;
    if (right) sum += oy * psi[row + col_r];
    if (left) sum -= oy * psi[row + col_l];
  }
  return c.weight * sum;
}

double edge_sum_y(const Charge& c, const GridSpec& g, std::span<const double> psi) {
  const double ly = g.ny * g.bin_h;
  const Span1 cx = covered(c.rect.xl, c.rect.xh, g.bin_w, g.nx);
  const bool top = c.rect.yh > 0.0 && c.rect.yh < ly;
  const bool bottom = c.rect.yl > 0.0 && c.rect.yl < ly;
  const int row_t = std::min(g.ny - 1, static_cast<int>(c.rect.yh / g.bin_h));
  const int row_b = std::min(g.ny - 1, static_cast<int>(c.rect.yl / g.bin_h));
  double sum = 0.0;
  for (int ix = cx.lo; ix <= cx.hi; ++ix) {
    const double ox = overlap_length(c.rect.xl, c.rect.xh, ix * g.bin_w, (ix + 1) * g.bin_w);
    if (top) sum += ox * psi[static_cast<std::size_t>(row_t) * g.nx + ix];
    if (bottom) sum -= ox * psi[static_cast<std::size_t>(row_b) * g.nx + ix];
  }
  return c.weight * sum;
}

}  // namespace

DensityTerm DensityModel::evaluate(std::span<const double> coords) {
  const GridSpec& g = grid_.spec;
  const std::size_t nm = design_.movable.size();
  const std::size_t nf = fillers_.count;
  if (coords.size() != 2 * (nm + nf)) throw std::invalid_argument("state/filler size mismatch");

  std::fill(own_.begin(), own_.end(), 0.0);
  const auto pos = component_positions(design_, coords);
  std::vector<Charge> charges(design_.components.size());
  for (std::size_t i = 0; i < charges.size(); ++i) {
    charges[i] = make_charge(footprint(i, pos[i]), g);
    stamp(charges[i], g, own_);
  }
  grid_.density = own_;
  std::vector<Charge> filler_charges(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const double x = coords[2 * nm + f];
    const double y = coords[2 * nm + nf + f];
    filler_charges[f] = make_charge(Rect::from_corner(x, y, fillers_.width, fillers_.height), g);
    stamp(filler_charges[f], g, grid_.density);
  }

  solver_->solve(grid_.density, grid_.psi);

  DensityTerm out;
  double e = 0.0;
  for (std::size_t b = 0; b < grid_.density.size(); ++b) e += grid_.density[b] * grid_.psi[b];
  out.energy = 0.5 * e * g.bin_area();
  const double norm = 1.0 / (movable_area_ * movable_area_);
  out.D = out.energy * norm;
  out.overflow = overflow(own_, g, params_.target_density, movable_area_);

  out.grad.assign(coords.size(), 0.0);
  for (std::size_t k = 0; k < nm; ++k) {
    const Charge& c = charges[design_.movable[k]];
    out.grad[k] = norm * edge_sum_x(c, g, grid_.psi);
    out.grad[nm + k] = norm * edge_sum_y(c, g, grid_.psi);
  }
  for (std::size_t f = 0; f < nf; ++f) {
    out.grad[2 * nm + f] = norm * edge_sum_x(filler_charges[f], g, grid_.psi);
    out.grad[2 * nm + nf + f] = norm * edge_sum_y(filler_charges[f], g, grid_.psi);
  }
  return out;
}

double DensityModel::overflow_at(std::span<const double> coords) const {
  const GridSpec& g = grid_.spec;
  std::vector<double> map(g.bins(), 0.0);
  const auto pos = component_positions(design_, coords);
  for (std::size_t i = 0; i < design_.components.size(); ++i) {
    stamp(make_charge(footprint(i, pos[i]), g), g, map);
  }
  return overflow(map, g, params_.target_density, movable_area_);
}

void DensityModel::compute_field() {
  grid_.field_x.assign(grid_.spec.bins(), 0.0);
  grid_.field_y.assign(grid_.spec.bins(), 0.0);
  solver_->field(grid_.field_x, grid_.field_y);
}

AugmentedDensity augmented_density(const DensityTerm& term, double lambda, double rho) {
  AugmentedDensity out;
  out.value = lambda * (term.D + 0.5 * rho * term.D * term.D);
  const double scale = lambda * (1.0 + rho * term.D);
  out.grad.resize(term.grad.size());
  std::transform(term.grad.begin(), term.grad.end(), out.grad.begin(),
                 [scale](double g) { return scale * g; });
  return out;
}

DensityWeight::DensityWeight(double initial, double factor, double window_cap, int window)
    : factor_(factor), cap_(window_cap), window_(window) {
  history_.push_back(initial);
}

double DensityWeight::balance(double wl_grad_l1, double d_grad_l1, double D0, double rho) {
  if (!(wl_grad_l1 > 0.0) || !(d_grad_l1 > 0.0)) return 1.0;
  return wl_grad_l1 / ((1.0 + rho * D0) * d_grad_l1);
}

void DensityWeight::advance() {
  const std::size_t k = history_.size();
  const double base = k >= static_cast<std::size_t>(window_) ? history_[k - window_] : history_[0];
  history_.push_back(std::min(history_.back() * factor_, cap_ * base));
}

}  // namespace picplace
