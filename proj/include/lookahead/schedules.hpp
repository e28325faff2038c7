#pragma once

#include <cstdint>
#include <string>

namespace lookahead {

enum class LrScheduleKind { Constant, LinearDecayTail, WSD };

/// Learning-rate schedule over steps 0 .. total_steps - 1.
///
/// WSD ramps linearly over the first warmup_frac of steps using (t + 1) / W so
/// the first step is nonzero, holds the peak, and decays exponentially over the
/// last decay_frac of steps from the peak to floor_ratio * peak at the final
/// step. LinearDecayTail holds the peak until decay_start and then decays
/// linearly towards zero at total_steps.
struct LrSchedule {
  LrScheduleKind kind = LrScheduleKind::Constant;
  std::int64_t total_steps = 1;
  double peak = 1.0;
  std::int64_t decay_start = 0;
  double warmup_frac = 0.1;
  double decay_frac = 0.1;
  double floor_ratio = 0.1;

  static LrSchedule constant(double lr, std::int64_t total_steps);
  static LrSchedule wsd(double peak, std::int64_t total_steps, double warmup_frac = 0.1,
                        double decay_frac = 0.1, double floor_ratio = 0.1);
  static LrSchedule linear_decay_tail(double peak, std::int64_t total_steps, std::int64_t decay_start);

  void validate() const;
  double at(std::int64_t t) const;
  /// max_t at(t); always the peak.
  double max() const noexcept { return peak; }

  std::int64_t warmup_steps() const;
  std::int64_t decay_steps() const;
};

enum class BetaScheduleKind { Constant, ThreeStage, ConvexTheory };

/// Lookahead step size beta_t.
///
/// ThreeStage: 0 for t <= warmup_end, beta_max * lr(t) / max lr for
/// warmup_end < t <= rest_start, and 0 again for t > rest_start.
/// ConvexTheory: the time-varying sequence for mu = 0 with EMA rate gamma.
struct BetaSchedule {
  BetaScheduleKind kind = BetaScheduleKind::Constant;
  double beta_max = 0.0;
  std::int64_t warmup_end = 0;
  std::int64_t rest_start = 0;
  double gamma = 0.0;
  LrSchedule lr;

  static BetaSchedule constant(double beta);
  static BetaSchedule three_stage(double beta_max, std::int64_t warmup_end, std::int64_t rest_start,
                                  LrSchedule lr);
  /// Three-stage schedule with the default 30% warm-up and 20% rest.
  static BetaSchedule three_stage_default(double beta_max, LrSchedule lr);
  static BetaSchedule convex_theory(double gamma);

  void validate() const;
  double at(std::int64_t t) const;
};

std::string to_string(LrScheduleKind kind);
std::string to_string(BetaScheduleKind kind);

}  // namespace lookahead
