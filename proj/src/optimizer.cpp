#include "picplace/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace picplace {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "bnag") return OptimizerKind::BNAG;
  if (name == "nag-bb") return OptimizerKind::NagBB;
  if (name == "nag") return OptimizerKind::Nag;
  if (name == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

std::string_view optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::BNAG: return "bnag";
    case OptimizerKind::NagBB: return "nag-bb";
    case OptimizerKind::Nag: return "nag";
    case OptimizerKind::Adam: return "adam";
  }
  return "?";
}

void validate(const OptimizerParams& p) {
  if (p.max_iters < 1) throw std::invalid_argument("iteration budget must be >= 1");
  if (!(p.eta0 > 0.0) || !(p.eta_min > 0.0) || p.eta_min > p.eta0) {
    throw std::invalid_argument("need 0 < eta_min <= eta0");
  }
  if (!(p.ref_length > 0.0)) throw std::invalid_argument("reference length must be positive");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

double bb_step(std::span<const double> s, std::span<const double> y, double prev) {
  const double yy = dot(y, y);
  if (std::sqrt(yy) < 1e-12) return prev;
  const double sy = dot(s, y);
  const double bb = sy / yy;
  if (bb > 0.0) return bb;
  return std::min(std::sqrt(dot(s, s) / yy), prev);
}

double anneal(int k, double eta0, double eta_min, int k_max) {
  const double r = std::clamp(static_cast<double>(k) / k_max, 0.0, 1.0);
  return eta_min + 0.5 * (eta0 - eta_min) * (1.0 + std::cos(std::numbers::pi * r));
}

double next_momentum(double a) { return 0.5 * (1.0 + std::sqrt(4.0 * a * a + 1.0)); }

Optimizer::Optimizer(const OptimizerParams& p, std::vector<Block> blocks, GradFn f,
                     ProjectFn project)
    : p_(p), blocks_(std::move(blocks)), f_(std::move(f)), project_(std::move(project)) {
  validate(p);
  std::erase_if(blocks_, [](const Block& b) { return b.size() == 0; });
}

bool Optimizer::evaluate(std::vector<double>& x, std::vector<double>& g, double& value) {
  g.assign(x.size(), 0.0);
  value = f_(x, g);
  return std::isfinite(value) && all_finite(g);
}

bool Optimizer::start(std::vector<double> x0) {
  k_ = 0;
  a_ = 1.0;
  eta_ = p_.kind == OptimizerKind::BNAG ? p_.eta0 : 1.0;
  if (project_) project_(x0, 0);
  v_ = std::move(x0);
  u_ = v_;
  v_prev_ = v_;
  if (!evaluate(v_, g_, f_value_)) return false;
  g_prev_ = g_;
  alpha_.assign(blocks_.size(), 0.0);
  alpha0_.assign(blocks_.size(), 0.0);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const Block& b = blocks_[j];
    const std::span<const double> gb(g_.data() + b.begin, b.size());
    const double rms = std::sqrt(dot(gb, gb) / static_cast<double>(b.size()));
    alpha0_[j] = rms > 0.0 ? p_.ref_length / rms : p_.ref_length;
    alpha_[j] = alpha0_[j];
  }
  m_.assign(v_.size(), 0.0);
  s2_.assign(v_.size(), 0.0);
  return true;
}

bool Optimizer::step() {
  return p_.kind == OptimizerKind::Adam ? step_adam() : step_nesterov();
}

bool Optimizer::step_nesterov() {
  const std::size_t n = v_.size();
  const bool lipschitz = p_.kind == OptimizerKind::Nag;
  std::vector<double> s(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = v_[i] - v_prev_[i];
    y[i] = g_[i] - g_prev_[i];
  }

  std::vector<double> u_next(n);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const Block& b = blocks_[j];
    if (k_ > 0) {
      const std::span<const double> sb(s.data() + b.begin, b.size());
      const std::span<const double> yb(y.data() + b.begin, b.size());
      if (lipschitz) {
        const double yy = dot(yb, yb);
        if (std::sqrt(yy) >= 1e-12) alpha_[j] = std::sqrt(dot(sb, sb) / yy);
      } else {
        alpha_[j] = std::clamp(bb_step(sb, yb, alpha_[j]), p_.trunc_lo * alpha0_[j],
                               p_.trunc_hi * alpha0_[j]);
      }
    }
    const double step = alpha_[j] * eta_;
    for (std::size_t i = b.begin; i < b.end; ++i) u_next[i] = v_[i] - step * g_[i];
  }

  const double a_next = next_momentum(a_);
  const double beta = (a_ - 1.0) / a_next;
  std::vector<double> v_next(n);
  for (std::size_t i = 0; i < n; ++i) v_next[i] = u_next[i] + beta * (u_next[i] - u_[i]);
  if (project_) project_(v_next, k_ + 1);

  std::vector<double> g_next;
  double value = 0.0;
  if (!all_finite(v_next) || !evaluate(v_next, g_next, value)) return false;

  if (p_.kind == OptimizerKind::BNAG) eta_ = anneal(k_, p_.eta0, p_.eta_min, p_.max_iters);
  a_ = a_next;
  u_ = std::move(u_next);
  v_prev_ = std::move(v_);
  v_ = std::move(v_next);
  g_prev_ = std::move(g_);
  g_ = std::move(g_next);
  f_value_ = value;
  ++k_;
  return true;
}

bool Optimizer::step_adam() {
  const std::size_t n = v_.size();
  const double b1 = p_.adam_beta1;
  const double b2 = p_.adam_beta2;
  const int t = k_ + 1;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  const double lr = p_.adam_lr * p_.ref_length;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * g_[i];
    s2_[i] = b2 * s2_[i] + (1.0 - b2) * g_[i] * g_[i];
    x[i] = v_[i] - lr * (m_[i] / c1) / (std::sqrt(s2_[i] / c2) + 1e-12);
  }
  if (project_) project_(x, t);
  std::vector<double> g_next;
  double value = 0.0;
  if (!all_finite(x) || !evaluate(x, g_next, value)) return false;
  v_prev_ = std::move(v_);
  v_ = std::move(x);
  u_ = v_;
  g_prev_ = std::move(g_);
  g_ = std::move(g_next);
  f_value_ = value;
  ++k_;
  return true;
}

}  // namespace picplace
