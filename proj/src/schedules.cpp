#include "lookahead/schedules.hpp"

#include <cmath>

#include "lookahead/errors.hpp"
#include "lookahead/theory.hpp"

namespace lookahead {

LrSchedule LrSchedule::constant(double lr, std::int64_t total_steps) {
  LrSchedule s;
  s.kind = LrScheduleKind::Constant;
  s.peak = lr;
  s.total_steps = total_steps;
  s.validate();
  return s;
}

LrSchedule LrSchedule::wsd(double peak, std::int64_t total_steps, double warmup_frac, double decay_frac,
                           double floor_ratio) {
  LrSchedule s;
  s.kind = LrScheduleKind::WSD;
  s.peak = peak;
  s.total_steps = total_steps;
  s.warmup_frac = warmup_frac;
  s.decay_frac = decay_frac;
  s.floor_ratio = floor_ratio;
  s.validate();
  return s;
}

LrSchedule LrSchedule::linear_decay_tail(double peak, std::int64_t total_steps, std::int64_t decay_start) {
  LrSchedule s;
  s.kind = LrScheduleKind::LinearDecayTail;
  s.peak = peak;
  s.total_steps = total_steps;
  s.decay_start = decay_start;
  s.validate();
  return s;
}

std::int64_t LrSchedule::warmup_steps() const {
  return static_cast<std::int64_t>(std::llround(warmup_frac * static_cast<double>(total_steps)));
}

std::int64_t LrSchedule::decay_steps() const {
  return static_cast<std::int64_t>(std::llround(decay_frac * static_cast<double>(total_steps)));
}

void LrSchedule::validate() const {
  if (!(peak > 0.0) || !std::isfinite(peak)) throw ParameterError("learning rate peak must be positive");
  if (total_steps < 0) throw ParameterError("total_steps must be nonnegative");
  switch (kind) {
    case LrScheduleKind::Constant:
      break;
    case LrScheduleKind::LinearDecayTail:
      if (decay_start < 0 || decay_start >= std::max<std::int64_t>(total_steps, 1))
        throw ParameterError("decay_start must lie in [0, total_steps)");
      break;
    case LrScheduleKind::WSD:
      if (warmup_frac < 0.0 || decay_frac < 0.0 || warmup_frac + decay_frac > 1.0)
        throw ParameterError("WSD fractions must be nonnegative and sum to at most 1");
      if (!(floor_ratio > 0.0 && floor_ratio <= 1.0)) throw ParameterError("WSD floor_ratio must be in (0, 1]");
      break;
  }
}

double LrSchedule::at(std::int64_t t) const {
  if (t < 0 || t >= total_steps)
    throw ParameterError("step " + std::to_string(t) + " outside [0, " + std::to_string(total_steps) + ")");
  switch (kind) {
    case LrScheduleKind::Constant:
      return peak;
    case LrScheduleKind::LinearDecayTail: {
      if (t < decay_start) return peak;
      const double span = static_cast<double>(total_steps - decay_start);
      return peak * static_cast<double>(total_steps - t) / span;
    }
    case LrScheduleKind::WSD: {
      const std::int64_t w = warmup_steps();
      const std::int64_t d = decay_steps();
      if (t < w) return peak * static_cast<double>(t + 1) / static_cast<double>(w);
      const std::int64_t decay_begin = total_steps - d;
      if (t < decay_begin) return peak;
      if (d == 1) return peak * floor_ratio;
      const double s = static_cast<double>(t - decay_begin) / static_cast<double>(d - 1);
      return peak * std::pow(floor_ratio, s);
    }
  }
  return peak;
}

BetaSchedule BetaSchedule::constant(double beta) {
  BetaSchedule s;
  s.kind = BetaScheduleKind::Constant;
  s.beta_max = beta;
  s.validate();
  return s;
}

BetaSchedule BetaSchedule::three_stage(double beta_max, std::int64_t warmup_end, std::int64_t rest_start,
                                       LrSchedule lr) {
  BetaSchedule s;
  s.kind = BetaScheduleKind::ThreeStage;
  s.beta_max = beta_max;
  s.warmup_end = warmup_end;
  s.rest_start = rest_start;
  s.lr = lr;
  s.validate();
  return s;
}

BetaSchedule BetaSchedule::three_stage_default(double beta_max, LrSchedule lr) {
  const double total = static_cast<double>(lr.total_steps);
  return three_stage(beta_max, static_cast<std::int64_t>(std::llround(0.3 * total)),
                     static_cast<std::int64_t>(std::llround(0.8 * total)), lr);
}

BetaSchedule BetaSchedule::convex_theory(double gamma) {
  BetaSchedule s;
  s.kind = BetaScheduleKind::ConvexTheory;
  s.gamma = gamma;
  s.validate();
  return s;
}

void BetaSchedule::validate() const {
  switch (kind) {
    case BetaScheduleKind::Constant:
      if (!(beta_max >= 0.0) || !std::isfinite(beta_max)) throw ParameterError("beta must be nonnegative");
      break;
    case BetaScheduleKind::ThreeStage:
      if (!(beta_max >= 0.0) || !std::isfinite(beta_max)) throw ParameterError("beta_max must be nonnegative");
      if (warmup_end < 0 || warmup_end > rest_start || rest_start > lr.total_steps)
        throw ParameterError("three-stage beta needs 0 <= warmup_end <= rest_start <= total_steps");
      lr.validate();
      break;
    case BetaScheduleKind::ConvexTheory:
      if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
      break;
  }
}

double BetaSchedule::at(std::int64_t t) const {
  if (t < 0) throw ParameterError("negative step");
  switch (kind) {
    case BetaScheduleKind::Constant:
      return beta_max;
    case BetaScheduleKind::ThreeStage:
      if (t >= lr.total_steps)
        throw ParameterError("step " + std::to_string(t) + " beyond the learning-rate schedule");
      if (t <= warmup_end || t > rest_start) return 0.0;
      return beta_max * (lr.at(t) / lr.max());
    case BetaScheduleKind::ConvexTheory:
      return theorem2_beta(gamma, t);
  }
  return 0.0;
}

std::string to_string(LrScheduleKind kind) {
  switch (kind) {
    case LrScheduleKind::Constant: return "constant";
    case LrScheduleKind::LinearDecayTail: return "linear_decay";
    case LrScheduleKind::WSD: return "wsd";
  }
  return "?";
}

std::string to_string(BetaScheduleKind kind) {
  switch (kind) {
    case BetaScheduleKind::Constant: return "constant";
    case BetaScheduleKind::ThreeStage: return "three_stage";
    case BetaScheduleKind::ConvexTheory: return "convex_theory";
  }
  return "?";
}

}  // namespace lookahead
