#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace picplace {

enum class OptimizerKind : std::uint8_t {
  BNAG,   // four blocks, BB steps, cosine-annealed scaling
  NagBB,  // one block, BB steps, no annealing
  Nag,    // one block, inverse local Lipschitz step, no annealing or truncation
  Adam,
};

OptimizerKind parse_optimizer(std::string_view name);
std::string_view optimizer_name(OptimizerKind k);

struct OptimizerParams {
  OptimizerKind kind = OptimizerKind::BNAG;
  int max_iters = 1500;  // K_max
  double eta0 = 1.0;
  double eta_min = 0.1;
  // Length used for the bootstrap step α⁰ = ref_length / RMS(gradient).
  double ref_length = 1.0;
  double trunc_lo = 1e-6;  // relative to α⁰
  double trunc_hi = 1e3;
  double adam_lr = 0.5;  // in units of ref_length
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
};

void validate(const OptimizerParams& p);

/// Half-open index range [begin, end) of the variable vector.
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Barzilai-Borwein step sᵀy / yᵀy; when that is not positive falls back to
/// min(‖s‖/‖y‖, prev). Returns prev when ‖y‖ < 1e-12. No truncation.
double bb_step(std::span<const double> s, std::span<const double> y, double prev);

/// η_min + ½(η0 − η_min)(1 + cos(πk/K_max)).
double anneal(int k, double eta0, double eta_min, int k_max);

/// (1 + sqrt(4a² + 1)) / 2.
double next_momentum(double a);

/// Returns the objective value and writes the gradient.
using GradFn = std::function<double(std::span<const double> x, std::span<double> grad)>;
/// Projects x in place; `k` is the iteration that produced it.
using ProjectFn = std::function<void(std::span<double> x, int k)>;

class Optimizer {
 public:
  Optimizer(const OptimizerParams& p, std::vector<Block> blocks, GradFn f, ProjectFn project = {});

  /// Projects x0 and evaluates the gradient there. False if non-finite.
  bool start(std::vector<double> x0);
  /// One iteration. False if the new value or gradient is non-finite; the
  /// previous solution is kept in that case.
  bool step();

  const std::vector<double>& solution() const { return v_; }
  const std::vector<double>& gradient() const { return g_; }
  double value() const { return f_value_; }
  int iteration() const { return k_; }
  double momentum() const { return a_; }
  double eta() const { return eta_; }
  std::span<const double> steps() const { return alpha_; }

 private:
  bool evaluate(std::vector<double>& x, std::vector<double>& g, double& value);
  bool step_nesterov();
  bool step_adam();

  OptimizerParams p_;
  std::vector<Block> blocks_;
  GradFn f_;
  ProjectFn project_;

  int k_ = 0;
  double a_ = 1.0;
  double eta_ = 1.0;
  double f_value_ = 0.0;
  std::vector<double> u_, v_, v_prev_, g_, g_prev_;
  std::vector<double> alpha_, alpha0_;
  std::vector<double> m_, s2_;  // Adam moments
};

}  // namespace picplace
