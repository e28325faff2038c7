#include "lookahead/base_optimizers.hpp"

#include <algorithm>
#include <cmath>

namespace lookahead {

namespace {

void require_rate(double v, const char* what) {
  if (!(v >= 0.0 && v < 1.0)) throw ParameterError(std::string(what) + " must lie in [0, 1)");
}

}  // namespace

void OptimizerConfig::validate() const {
  require_rate(momentum, "momentum");
  require_rate(adam_beta1, "adam_beta1");
  require_rate(adam_beta2, "adam_beta2");
  require_rate(muon_momentum, "muon_momentum");
  if (!(weight_decay >= 0.0)) throw ParameterError("weight_decay must be nonnegative");
}

ParamState gd_step(const ParamState& x, const Direction& g, double alpha) { return axpy(-alpha, g, x); }

Matrix newton_schulz5(const Matrix& x) {
  constexpr double a = 3.4445, b = -4.7750, c = 2.0315;
  const bool wide = x.cols() > x.rows();
  Matrix y = wide ? Matrix(x.transpose()) : x;
  y /= y.norm() + kNewtonSchulzEpsilon;
  for (int k = 0; k < 5; ++k) {
    const Matrix gram = y * y.transpose();
    const Matrix poly = c * gram * gram + b * gram;
    y = a * y + poly * y;
  }
  if (wide) return y.transpose();
  return y;
}

BaseOptimizer::BaseOptimizer(OptimizerConfig config, const ParamState& layout) : config_(config) {
  config_.validate();
  const std::size_t n = layout.num_layers();
  eligible_.assign(n, false);
  for (std::size_t l = 0; l < n; ++l) {
    const auto& v = layout.value(l);
    const bool matrix = v.rows() > 1 && v.cols() > 1;
    const bool interior = l > 0 && l + 1 < n;
    eligible_[l] = config_.kind == OptimizerKind::Muon && matrix &&
                   (config_.eligibility == MuonEligibility::AllMatrices || interior);
  }
  switch (config_.kind) {
    case OptimizerKind::GD:
      break;
    case OptimizerKind::MomentumSGD:
      momentum_ = Direction::zeros_like(layout);
      break;
    case OptimizerKind::Muon:
      muon_ = Direction::zeros_like(layout);
      ns_inputs_.resize(n);
      [[fallthrough]];
    case OptimizerKind::Adam:
      first_ = Direction::zeros_like(layout);
      second_ = Direction::zeros_like(layout);
      break;
  }
}

void BaseOptimizer::adam_layer(std::size_t l, const Matrix& x, const Matrix& g, double lr, Matrix& out) {
  const double b1 = config_.adam_beta1, b2 = config_.adam_beta2;
  Matrix& w = first_.value(l);
  Matrix& w2 = second_.value(l);
  w = b1 * w + (1.0 - b1) * g;
  w2 = b2 * w2 + (1.0 - b2) * g.cwiseProduct(g);
  // Bias correction uses the 1-based step number.
  const double k = static_cast<double>(step_count_ + 1);
  const double corr1 = 1.0 - std::pow(b1, k);
  const double corr2 = 1.0 - std::pow(b2, k);
  const auto update = (w.array() / corr1) / ((w2.array() / corr2).sqrt() + kAdamEpsilon);
  out = (1.0 - lr * config_.weight_decay) * x.array() - lr * update;
}

void BaseOptimizer::muon_layer(std::size_t l, const Matrix& x, const Matrix& g, double lr, Matrix& out) {
  const double phi = config_.muon_momentum;
  Matrix& v = muon_.value(l);
  Matrix input = (phi * phi) * v + (1.0 - phi * phi) * g;
  const double aspect = std::sqrt(std::max(1.0, static_cast<double>(x.cols()) / static_cast<double>(x.rows())));
  out = (1.0 - lr * config_.weight_decay) * x - (lr * aspect) * newton_schulz5(input);
  v = phi * v + (1.0 - phi) * g;
  ns_inputs_[l] = std::move(input);
}

ParamState BaseOptimizer::step(const ParamState& x, const Direction& g, StepRates rates) {
  require_conformable(x, g, "optimizer step");
  ParamState out;
  switch (config_.kind) {
    case OptimizerKind::GD:
      out = gd_step(x, g, rates.lr);
      break;
    case OptimizerKind::MomentumSGD: {
      const double gamma = config_.momentum;
      momentum_ = combine(gamma, momentum_, 1.0 - gamma, g);
      out = axpy(-rates.lr, momentum_, x);
      break;
    }
    case OptimizerKind::Adam:
      out = ParamState::zeros_like(x);
      for (std::size_t l = 0; l < x.num_layers(); ++l) adam_layer(l, x.value(l), g.value(l), rates.lr, out.value(l));
      break;
    case OptimizerKind::Muon:
      out = ParamState::zeros_like(x);
      for (std::size_t l = 0; l < x.num_layers(); ++l) {
        if (eligible_[l]) {
          muon_layer(l, x.value(l), g.value(l), rates.lr, out.value(l));
        } else {
          ns_inputs_[l].resize(0, 0);
          adam_layer(l, x.value(l), g.value(l), rates.adam_lr, out.value(l));
        }
      }
      break;
  }
  ++step_count_;
  return out;
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::GD: return "gd";
    case OptimizerKind::MomentumSGD: return "momentum_sgd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::Muon: return "muon";
  }
  return "?";
}

}  // namespace lookahead
