#include "lookahead/wrappers.hpp"

namespace lookahead {

// ---------------------------------------------------------------- inner loop

InnerLoop::InnerLoop(BaseOptimizer optimizer, LrSchedule lr, double adam_lr_ratio)
    : optimizer_(std::move(optimizer)), lr_(lr), adam_lr_ratio_(adam_lr_ratio) {
  lr_.validate();
  if (!(adam_lr_ratio > 0.0)) throw ParameterError("adam_lr_ratio must be positive");
}

Direction InnerLoop::draw(const ParamState& at, const GradientOracle& oracle) {
  last_gradient_ = oracle.sample(at, calls_++);
  return last_gradient_;
}

double InnerLoop::consume_lr() {
  last_lr_ = lr_.at(steps_);
  ++steps_;
  return last_lr_;
}

ParamState InnerLoop::advance(const ParamState& from, const GradientOracle& oracle) {
  const Direction g = draw(from, oracle);
  const double lr = consume_lr();
  ParamState to = optimizer_.step(from, g, StepRates{lr, lr * adam_lr_ratio_});
  if (observer_) observer_(from, to);
  return to;
}

// ---------------------------------------------------------------- wrappers

BareOptimizer::BareOptimizer(ParamState x0, InnerLoop inner) : LookaheadMethod(std::move(inner)), x_(std::move(x0)) {}

void BareOptimizer::step(const GradientOracle& oracle) {
  ParamState next = inner_.advance(x_, oracle);
  require_finite(next, iteration_, "iterate");
  x_ = std::move(next);
  ++iteration_;
}

EmaNesterov::EmaNesterov(ParamState x0, double gamma, BetaSchedule beta, InnerLoop inner)
    : LookaheadMethod(std::move(inner)),
      x_(std::move(x0)),
      m_(Direction::zeros_like(x_)),
      delta_(Direction::zeros_like(x_)),
      y_(x_),
      gamma_(gamma),
      beta_(beta) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("EMA rate gamma must lie in [0, 1)");
  beta_.validate();
}

void EmaNesterov::step(const GradientOracle& oracle) {
  last_beta_ = beta_.at(iteration_);
  ParamState y = axpy(last_beta_, m_, x_);
  require_finite(y, iteration_, "lookahead position");
  ParamState next = inner_.advance(y, oracle);
  require_finite(next, iteration_, "iterate");
  delta_ = difference(next, x_);
  m_ = combine(gamma_, m_, 1.0 - gamma_, delta_);
  x_ = std::move(next);
  y_ = std::move(y);
  ++iteration_;
}

NesterovClassic::NesterovClassic(ParamState x0, BetaSchedule beta, InnerLoop inner)
    : LookaheadMethod(std::move(inner)), x_(x0), x_prev_(std::move(x0)), beta_(beta) {
  beta_.validate();
}

void NesterovClassic::step(const GradientOracle& oracle) {
  last_beta_ = beta_.at(iteration_);
  ParamState y = axpy(last_beta_, difference(x_, x_prev_), x_);
  require_finite(y, iteration_, "lookahead position");
  ParamState next = inner_.advance(y, oracle);
  require_finite(next, iteration_, "iterate");
  x_prev_ = std::move(x_);
  x_ = std::move(next);
  ++iteration_;
}

namespace {

void require_period(int K) {
  if (K < 1) throw ParameterError("K must be at least 1");
}

ParamState burst(InnerLoop& inner, ParamState from, int K, const GradientOracle& oracle) {
  for (int k = 0; k < K; ++k) from = inner.advance(from, oracle);
  return from;
}

}  // namespace

PessimisticLookahead::PessimisticLookahead(ParamState x0, int K, double beta, InnerLoop inner)
    : LookaheadMethod(std::move(inner)), anchor_(x0), burst_end_(std::move(x0)), K_(K), beta_(beta) {
  require_period(K);
}

void PessimisticLookahead::step(const GradientOracle& oracle) {
  burst_end_ = burst(inner_, anchor_, K_, oracle);
  require_finite(burst_end_, iteration_, "inner iterate");
  anchor_ = axpy(beta_, difference(burst_end_, anchor_), anchor_);
  ++iteration_;
}

KStepLookahead::KStepLookahead(ParamState x0, int K, double beta_prime, InnerLoop inner)
    : LookaheadMethod(std::move(inner)),
      anchor_(std::move(x0)),
      b_(Direction::zeros_like(anchor_)),
      K_(K),
      beta_prime_(beta_prime) {
  require_period(K);
}

void KStepLookahead::step(const GradientOracle& oracle) {
  ParamState start = axpy(beta_prime_, b_, anchor_);
  require_finite(start, iteration_, "lookahead position");
  ParamState end = burst(inner_, std::move(start), K_, oracle);
  require_finite(end, iteration_, "iterate");
  b_ = difference(end, anchor_);
  anchor_ = std::move(end);
  ++iteration_;
}

Snoo::Snoo(ParamState x0, int K, double beta, double eta, AlgorithmForm form, InnerLoop inner)
    : LookaheadMethod(std::move(inner)),
      point_(std::move(x0)),
      b_(Direction::zeros_like(point_)),
      K_(K),
      beta_(beta),
      eta_(eta),
      form_(form) {
  require_period(K);
  if (form == AlgorithmForm::Reduced && eta != 1.0) throw ConfigError("reduced SNOO form requires eta = 1");
}

void Snoo::step(const GradientOracle& oracle) {
  if (form_ == AlgorithmForm::Original) {
    const ParamState end = burst(inner_, point_, K_, oracle);
    require_finite(end, iteration_, "inner iterate");
    const Direction pseudo = difference(point_, end);
    b_ = combine(beta_, b_, 1.0, pseudo);
    point_ = axpy(-eta_, combine(beta_, b_, 1.0, pseudo), point_);
  } else {
    ParamState end = burst(inner_, axpy(-beta_, b_, point_), K_, oracle);
    require_finite(end, iteration_, "inner iterate");
    b_ = difference(point_, end);
    point_ = std::move(end);
  }
  require_finite(point_, iteration_, "iterate");
  ++iteration_;
}

ParamState Snoo::solution() const {
  if (form_ == AlgorithmForm::Original) return point_;
  return axpy(-beta_, b_, point_);
}

Gpa::Gpa(ParamState x0, double beta, AlgorithmForm form, InnerLoop inner)
    : LookaheadMethod(std::move(inner)), x_(x0), y_(x0), z_(std::move(x0)), beta_(beta), form_(form) {
  if (!(beta >= 0.0 && beta < 1.0)) throw ParameterError("GPA beta must lie in [0, 1)");
  if (form == AlgorithmForm::Reduced && inner_.optimizer().kind() != OptimizerKind::GD)
    throw ConfigError("reduced GPA form requires a plain gradient-descent inner optimizer");
}

void Gpa::step(const GradientOracle& oracle) {
  const double keep = 1.0 - beta_;
  if (form_ == AlgorithmForm::Original) {
    // y_ holds beta x + (1 - beta) z for the current (x, z).
    const ParamState moved = inner_.advance(y_, oracle);
    z_ = axpy(1.0, difference(moved, y_), z_);
    x_ = axpy(keep, difference(z_, x_), x_);
    y_ = axpy(keep, difference(z_, x_), x_);
  } else {
    const Direction g = inner_.draw(y_, oracle);
    const double step_size = inner_.consume_lr();
    const ParamState z_next = axpy(-step_size, g, z_);
    const Direction dz = difference(z_next, z_);
    const Direction to_z = difference(z_next, x_);
    const ParamState x_next = axpy(keep, to_z, x_);
    y_ = axpy(1.0, combine(keep, dz, beta_ * keep, to_z), y_);
    z_ = z_next;
    x_ = x_next;
  }
  require_finite(x_, iteration_, "iterate");
  require_finite(z_, iteration_, "iterate");
  ++iteration_;
}

std::vector<double> lookahead_probe(const ParamState& x, const Direction& d, std::span<const double> betas,
                                    const Problem& problem) {
  std::vector<double> out;
  out.reserve(betas.size());
  for (double beta : betas) out.push_back(problem.value(axpy(beta, d, x)));
  return out;
}

}  // namespace lookahead
