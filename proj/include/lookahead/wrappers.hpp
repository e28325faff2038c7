#pragma once

// Outer lookahead algorithms wrapped around a BaseOptimizer.
//
// Every wrapper owns the gradient-oracle call sites, so the point at which a
// gradient is taken is explicit: EMA-Nesterov and classical Nesterov query at
// the lookahead position, the K-step variants at each inner iterate, GPA at
// y^t. Oracle calls are numbered consecutively from zero per wrapper, which
// lets two wrappers built on the same seeded oracle consume identical noise.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lookahead/base_optimizers.hpp"
#include "lookahead/param.hpp"
#include "lookahead/problems.hpp"
#include "lookahead/schedules.hpp"

namespace lookahead {

/// Receives (x, A(x)) for every inner optimizer step.
using InnerObserver = std::function<void(const ParamState& from, const ParamState& to)>;

/// A BaseOptimizer driven by a learning-rate schedule, one oracle call per step.
class InnerLoop {
 public:
  /// `adam_lr_ratio` scales the schedule for Muon's Adam-branch layers.
  InnerLoop(BaseOptimizer optimizer, LrSchedule lr, double adam_lr_ratio = 1.0);

  /// Gradient at `from`, then one optimizer step from `from`.
  ParamState advance(const ParamState& from, const GradientOracle& oracle);

  /// Learning rate the next advance() will use.
  double next_lr() const { return lr_.at(steps_); }
  double last_lr() const noexcept { return last_lr_; }
  std::int64_t steps() const noexcept { return steps_; }
  std::uint64_t oracle_calls() const noexcept { return calls_; }
  const BaseOptimizer& optimizer() const noexcept { return optimizer_; }
  const LrSchedule& schedule() const noexcept { return lr_; }
  const Direction& last_gradient() const noexcept { return last_gradient_; }

  /// Draws the next gradient without stepping; used by forms that apply the
  /// update themselves.
  Direction draw(const ParamState& at, const GradientOracle& oracle);
  /// Rate for the next step, then advances the step counter.
  double consume_lr();

  void set_observer(InnerObserver observer) { observer_ = std::move(observer); }

 private:
  BaseOptimizer optimizer_;
  LrSchedule lr_;
  double adam_lr_ratio_;
  std::int64_t steps_ = 0;
  std::uint64_t calls_ = 0;
  double last_lr_ = 0.0;
  Direction last_gradient_;
  InnerObserver observer_;
};

/// Common surface of every outer algorithm.
class LookaheadMethod {
 public:
  explicit LookaheadMethod(InnerLoop inner) : inner_(std::move(inner)) {}
  virtual ~LookaheadMethod() = default;

  /// One outer iteration. Throws DivergenceError on non-finite iterates.
  virtual void step(const GradientOracle& oracle) = 0;
  /// The point the algorithm reports after the completed iterations.
  virtual ParamState solution() const = 0;
  /// Norm of the lookahead buffer (m or b), when the method keeps one.
  virtual std::optional<double> lookahead_norm() const { return std::nullopt; }
  /// Lookahead step used by the most recent outer iteration.
  virtual double last_beta() const { return 0.0; }
  /// Inner optimizer steps per outer iteration.
  virtual std::int64_t inner_per_outer() const { return 1; }

  std::int64_t iteration() const noexcept { return iteration_; }
  const InnerLoop& inner() const noexcept { return inner_; }
  void set_observer(InnerObserver observer) { inner_.set_observer(std::move(observer)); }

 protected:
  InnerLoop inner_;
  std::int64_t iteration_ = 0;
};

/// The inner optimizer alone: x <- A_t(x).
class BareOptimizer final : public LookaheadMethod {
 public:
  BareOptimizer(ParamState x0, InnerLoop inner);
  void step(const GradientOracle& oracle) override;
  ParamState solution() const override { return x_; }

 private:
  ParamState x_;
};

/// EMA-Nesterov:
///   x^{t+1} = A_t(x^t + beta_t m^t)
///   m^{t+1} = gamma m^t + (1 - gamma)(x^{t+1} - x^t),   m^0 = 0.
class EmaNesterov final : public LookaheadMethod {
 public:
  EmaNesterov(ParamState x0, double gamma, BetaSchedule beta, InnerLoop inner);

  void step(const GradientOracle& oracle) override;
  ParamState solution() const override { return x_; }
  std::optional<double> lookahead_norm() const override { return norm2(m_); }
  double last_beta() const override { return last_beta_; }

  const ParamState& x() const noexcept { return x_; }
  const Direction& m() const noexcept { return m_; }
  double gamma() const noexcept { return gamma_; }
  /// x^{t+1} - x^t of the most recent step (zero before the first).
  const Direction& last_delta() const noexcept { return delta_; }
  /// Lookahead position x^t + beta_t m^t of the most recent step.
  const ParamState& last_lookahead_point() const noexcept { return y_; }

 private:
  ParamState x_;
  Direction m_;
  Direction delta_;
  ParamState y_;
  double gamma_;
  BetaSchedule beta_;
  double last_beta_ = 0.0;
};

/// Classical Nesterov lookahead x^{t+1} = A_t(x^t + beta' (x^t - x^{t-1})),
/// with x^{-1} = x^0.
class NesterovClassic final : public LookaheadMethod {
 public:
  NesterovClassic(ParamState x0, BetaSchedule beta, InnerLoop inner);

  void step(const GradientOracle& oracle) override;
  ParamState solution() const override { return x_; }
  std::optional<double> lookahead_norm() const override { return norm2(difference(x_, x_prev_)); }
  double last_beta() const override { return last_beta_; }

 private:
  ParamState x_;
  ParamState x_prev_;
  BetaSchedule beta_;
  double last_beta_ = 0.0;
};

/// Pessimistic lookahead: K inner steps from the anchor, then
/// anchor <- anchor + beta (x~ - anchor).
class PessimisticLookahead final : public LookaheadMethod {
 public:
  PessimisticLookahead(ParamState x0, int K, double beta, InnerLoop inner);

  void step(const GradientOracle& oracle) override;
  ParamState solution() const override { return anchor_; }
  double last_beta() const override { return beta_; }
  std::int64_t inner_per_outer() const override { return K_; }

  /// End point of the most recent K-step burst, before interpolation.
  const ParamState& last_burst_end() const noexcept { return burst_end_; }

 private:
  ParamState anchor_;
  ParamState burst_end_;
  int K_;
  double beta_;
};

/// K-step optimistic lookahead: K inner steps from anchor + beta' b, then
/// b <- x^{t+K} - x^t and the anchor advances. b^0 = 0.
class KStepLookahead final : public LookaheadMethod {
 public:
  KStepLookahead(ParamState x0, int K, double beta_prime, InnerLoop inner);

  void step(const GradientOracle& oracle) override;
  ParamState solution() const override { return anchor_; }
  std::optional<double> lookahead_norm() const override { return norm2(b_); }
  double last_beta() const override { return beta_prime_; }
  std::int64_t inner_per_outer() const override { return K_; }

  const Direction& b() const noexcept { return b_; }

 private:
  ParamState anchor_;
  Direction b_;
  int K_;
  double beta_prime_;
};

enum class AlgorithmForm { Original, Reduced };

/// SNOO: K inner steps treated as a pseudo-gradient for an outer Nesterov
/// momentum.
///
/// Original (theta coordinates, any eta):
///   theta~ = K steps from theta;  d = theta - theta~
///   b <- beta b + d;  theta <- theta - eta (beta b + d)
/// Reduced (x coordinates, eta = 1):
///   theta~ = K steps from x - beta b;  b <- x - theta~;  x <- theta~
///   reported solution x - beta b.
/// With eta = 1 the two are related by theta = x - beta b.
class Snoo final : public LookaheadMethod {
 public:
  Snoo(ParamState x0, int K, double beta, double eta, AlgorithmForm form, InnerLoop inner);

  void step(const GradientOracle& oracle) override;
  ParamState solution() const override;
  std::optional<double> lookahead_norm() const override { return norm2(b_); }
  double last_beta() const override { return beta_; }
  std::int64_t inner_per_outer() const override { return K_; }

  AlgorithmForm form() const noexcept { return form_; }
  /// theta for Original, x for Reduced.
  const ParamState& state_point() const noexcept { return point_; }
  const Direction& b() const noexcept { return b_; }

 private:
  ParamState point_;
  Direction b_;
  int K_;
  double beta_;
  double eta_;
  AlgorithmForm form_;
};

/// Generalized primal averaging with beta_x = beta_y = beta.
///
/// Original (any inner optimizer):
///   y = beta x + (1 - beta) z;  z <- z + A(y) - y;  x <- beta x + (1 - beta) z
/// Reduced (gradient-descent inner with step gamma_p):
///   z' = z - gamma_p g(y);  x' = beta x + (1 - beta) z'
///   y' = y + (1 - beta)(z' - z) + beta (1 - beta)(z' - x)
/// Both report x.
class Gpa final : public LookaheadMethod {
 public:
  Gpa(ParamState x0, double beta, AlgorithmForm form, InnerLoop inner);

  void step(const GradientOracle& oracle) override;
  ParamState solution() const override { return x_; }
  double last_beta() const override { return beta_; }

  AlgorithmForm form() const noexcept { return form_; }
  const ParamState& x() const noexcept { return x_; }
  const ParamState& y() const noexcept { return y_; }
  const ParamState& z() const noexcept { return z_; }
  /// Gradient drawn in the most recent step, g(y^t).
  const Direction& last_gradient() const noexcept { return inner_.last_gradient(); }

 private:
  ParamState x_;
  ParamState y_;
  ParamState z_;
  double beta_;
  AlgorithmForm form_;
};

/// f(x + beta d) for each beta; no state is touched.
std::vector<double> lookahead_probe(const ParamState& x, const Direction& d, std::span<const double> betas,
                                    const Problem& problem);

}  // namespace lookahead
