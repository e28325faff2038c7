#pragma once

// Experiment harness: a RunConfig fully determines a run, run() turns it into
// a RunRecord of logged scalars.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lookahead/base_optimizers.hpp"
#include "lookahead/problems.hpp"
#include "lookahead/schedules.hpp"
#include "lookahead/wrappers.hpp"

namespace lookahead {

inline constexpr const char* kVersion = "0.1.0";

struct ProblemSpec {
  std::string kind = "quadratic";  // quadratic | convex_flat | river_straight | river_ushaped
  int dim = 50;
  double mu = 1.0;
  double L = 100.0;
  int rank = 10;
  double min_ratio = 1e-3;
  double steep = 10.0;
  double drift = 1.0;
  std::uint64_t seed = 0;
  /// Move the minimizer of a quadratic to the origin. The start point is
  /// unaffected, so the distance to the optimum changes.
  bool minimizer_at_origin = false;  // translate quadratics so x* = 0; the default start moves with it
  /// Reshape a quadratic's parameter to rows x cols (0 keeps dim x 1).
  int rows = 0;
  int cols = 0;
  /// Start point, flattened; empty means all zeros. "minimizer" style starts
  /// are expressed by setting it explicitly.
  std::vector<double> init;

  bool operator==(const ProblemSpec&) const = default;
};

struct OptimizerSpec {
  std::string kind = "gd";  // gd | momentum_sgd | adam | muon
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.95;
  double muon_momentum = 0.95;
  double weight_decay = 0.0;
  std::string eligibility = "interior";  // interior | all
  double adam_lr_ratio = 1.0;

  bool operator==(const OptimizerSpec&) const = default;
};

struct LrSpec {
  std::string kind = "constant";  // constant | wsd | linear_decay_tail
  /// Peak rate; nullopt means 1/L of the problem.
  std::optional<double> peak;
  double warmup_frac = 0.1;
  double decay_frac = 0.1;
  double floor_ratio = 0.1;
  /// Fraction of the inner steps after which linear_decay_tail starts.
  double decay_start_frac = 0.9;

  bool operator==(const LrSpec&) const = default;
};

struct BetaSpec {
  std::string kind = "constant";  // constant | three_stage | strongly_convex | convex
  double value = 0.0;             // beta, or beta_max for three_stage
  /// Outer iteration bounds for three_stage; defaults 0.3 T and 0.8 T.
  std::optional<std::int64_t> warmup_end;
  std::optional<std::int64_t> rest_start;

  bool operator==(const BetaSpec&) const = default;
};

struct WrapperSpec {
  std::string kind = "none";  // none | ema_nesterov | nesterov | pessimistic | kstep | snoo | gpa
  double gamma = 0.9;
  BetaSpec beta;
  int K = 5;
  double eta = 1.0;
  std::string form = "original";  // original | reduced

  bool operator==(const WrapperSpec&) const = default;
};

struct RunConfig {
  ProblemSpec problem;
  OptimizerSpec optimizer;
  LrSpec lr;
  WrapperSpec wrapper;
  std::int64_t total_T = 1000;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  std::int64_t log_every = 1;
  bool log_iterates = false;

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError with a description of the first problem found.
  void validate() const;
};

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

struct RunRow {
  std::int64_t t = 0;
  double f = 0.0;
  std::optional<double> gap;
  std::optional<double> dir_norm;
  std::optional<double> beta;
  std::optional<double> lr;
  std::optional<double> lyapunov;
  std::vector<double> iterate;

  bool operator==(const RunRow&) const = default;
};

enum class RunStatus { Complete, Diverged };

struct RunRecord {
  std::string version = kVersion;
  std::string created;
  std::string config_json;
  RunStatus status = RunStatus::Complete;
  std::optional<std::int64_t> diverged_at;
  std::size_t iterate_width = 0;
  std::vector<RunRow> rows;
};

/// Everything needed to step a configured run by hand.
struct Session {
  std::unique_ptr<Problem> problem;
  std::unique_ptr<GradientOracle> oracle;
  std::unique_ptr<LookaheadMethod> method;
  ParamState x0;
};

Session make_session(const RunConfig& config);

RunRecord run(const RunConfig& config);

struct ProbeRow {
  std::int64_t t = 0;
  double beta = 0.0;
  double f_along_delta = 0.0;
  double f_along_m = 0.0;
};

/// f(x^t + beta dx^t) and f(x^t + beta m^t) for each requested t and beta.
/// Needs an ema_nesterov wrapper.
std::vector<ProbeRow> probe(const RunConfig& config, std::vector<std::int64_t> at_iters,
                            const std::vector<double>& betas);

inline const std::vector<double> kSweepGammas{0.9, 0.95, 0.99, 0.995, 0.999};
inline const std::vector<double> kSweepBetas{0.1, 0.3, 0.5, 0.7, 0.9};

struct SweepPoint {
  double gamma = 0.0;
  double beta_max = 0.0;
  std::uint64_t seed = 0;
  RunRecord record;
};

/// Runs the gamma x beta_max grid for every noise seed. With threads > 1 the
/// runs execute concurrently; the result order and contents do not depend on
/// the thread count.
std::vector<SweepPoint> sweep(const RunConfig& base, const std::vector<double>& gammas,
                              const std::vector<double>& betas, const std::vector<std::uint64_t>& seeds,
                              int threads = 1);

std::string to_string(RunStatus status);

}  // namespace lookahead
