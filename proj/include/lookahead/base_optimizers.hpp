#pragma once

// Inner optimizers. They receive gradients and never evaluate the objective
// themselves; the lookahead wrappers decide where gradients are taken.

#include <cstdint>
#include <string>
#include <vector>

#include "lookahead/param.hpp"

namespace lookahead {

enum class OptimizerKind { GD, MomentumSGD, Adam, Muon };

/// Which layers take the orthogonalized Muon update. InteriorMatrices is the
/// reference rule (not the first or last layer, both dimensions > 1);
/// AllMatrices admits any layer with both dimensions > 1, which is what
/// single-layer synthetic problems need.
enum class MuonEligibility { InteriorMatrices, AllMatrices };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::GD;
  double momentum = 0.9;  // momentum SGD rate
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.95;
  double muon_momentum = 0.95;
  double weight_decay = 0.0;
  MuonEligibility eligibility = MuonEligibility::InteriorMatrices;

  void validate() const;
};

/// Learning rates for one step. Muon uses `lr` on its matrix layers and
/// `adam_lr` on the rest; every other kind uses `lr` only.
struct StepRates {
  double lr = 0.0;
  double adam_lr = 0.0;
};

inline constexpr double kAdamEpsilon = 1e-10;
inline constexpr double kNewtonSchulzEpsilon = 1e-7;

/// x - alpha * g
ParamState gd_step(const ParamState& x, const Direction& g, double alpha);

/// Five iterations of X <- (a I + (c A + b I) A) X with A = X X^T and
/// (a, b, c) = (3.4445, -4.7750, 2.0315), after scaling X by its Frobenius
/// norm (+1e-7). Wide inputs are processed transposed. Output shape equals
/// input shape.
Matrix newton_schulz5(const Matrix& x);

/// A stateful inner optimizer. Copies are independent.
class BaseOptimizer {
 public:
  BaseOptimizer(OptimizerConfig config, const ParamState& layout);

  /// One update from x with gradient g; advances step_count by one.
  ParamState step(const ParamState& x, const Direction& g, StepRates rates);

  const OptimizerConfig& config() const noexcept { return config_; }
  OptimizerKind kind() const noexcept { return config_.kind; }
  std::int64_t step_count() const noexcept { return step_count_; }

  bool muon_eligible(std::size_t layer) const { return eligible_.at(layer); }

  /// Momentum SGD buffer s.
  const Direction& momentum_buffer() const noexcept { return momentum_; }
  /// Adam first and second moment EMAs (w and w-hat).
  const Direction& adam_first_moment() const noexcept { return first_; }
  const Direction& adam_second_moment() const noexcept { return second_; }
  /// Muon gradient EMA v.
  const Direction& muon_buffer() const noexcept { return muon_; }
  /// The matrices fed to newton_schulz5 in the most recent step, one per
  /// layer (empty for layers that took the Adam branch).
  const std::vector<Matrix>& last_orthogonalization_inputs() const noexcept { return ns_inputs_; }

 private:
  void adam_layer(std::size_t l, const Matrix& x, const Matrix& g, double lr, Matrix& out);
  void muon_layer(std::size_t l, const Matrix& x, const Matrix& g, double lr, Matrix& out);

  OptimizerConfig config_;
  std::int64_t step_count_ = 0;
  std::vector<bool> eligible_;
  Direction momentum_;
  Direction first_;
  Direction second_;
  Direction muon_;
  std::vector<Matrix> ns_inputs_;
};

std::string to_string(OptimizerKind kind);

}  // namespace lookahead
