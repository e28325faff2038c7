#include "lookahead/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include <nlohmann/json.hpp>

#include "lookahead/record_io.hpp"
#include "lookahead/theory.hpp"

namespace lookahead {

using nlohmann::json;

// ------------------------------------------------------------------- config

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!known.contains(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ProblemSpec problem_from(const json& j) {
  reject_unknown(j, "problem",
                 {"kind", "dim", "mu", "L", "rank", "min_ratio", "steep", "drift", "seed", "minimizer_at_origin",
                  "rows", "cols", "init"});
  ProblemSpec p;
  read(j, "kind", p.kind);
  read(j, "dim", p.dim);
  read(j, "mu", p.mu);
  read(j, "L", p.L);
  read(j, "rank", p.rank);
  read(j, "min_ratio", p.min_ratio);
  read(j, "steep", p.steep);
  read(j, "drift", p.drift);
  read(j, "seed", p.seed);
  read(j, "minimizer_at_origin", p.minimizer_at_origin);
  read(j, "rows", p.rows);
  read(j, "cols", p.cols);
  read(j, "init", p.init);
  return p;
}

OptimizerSpec optimizer_from(const json& j) {
  reject_unknown(j, "optimizer",
                 {"kind", "momentum", "adam_beta1", "adam_beta2", "muon_momentum", "weight_decay", "eligibility",
                  "adam_lr_ratio"});
  OptimizerSpec o;
  read(j, "kind", o.kind);
  read(j, "momentum", o.momentum);
  read(j, "adam_beta1", o.adam_beta1);
  read(j, "adam_beta2", o.adam_beta2);
  read(j, "muon_momentum", o.muon_momentum);
  read(j, "weight_decay", o.weight_decay);
  read(j, "eligibility", o.eligibility);
  read(j, "adam_lr_ratio", o.adam_lr_ratio);
  return o;
}

LrSpec lr_from(const json& j) {
  reject_unknown(j, "lr", {"kind", "peak", "warmup_frac", "decay_frac", "floor_ratio", "decay_start_frac"});
  LrSpec s;
  read(j, "kind", s.kind);
  if (j.contains("peak")) {
    const json& p = j.at("peak");
    if (p.is_string()) {
      if (p.get<std::string>() != "1/L") throw ConfigError("lr.peak: expected a number or \"1/L\"");
    } else {
      s.peak = p.get<double>();
    }
  }
  read(j, "warmup_frac", s.warmup_frac);
  read(j, "decay_frac", s.decay_frac);
  read(j, "floor_ratio", s.floor_ratio);
  read(j, "decay_start_frac", s.decay_start_frac);
  return s;
}

BetaSpec beta_from(const json& j) {
  reject_unknown(j, "wrapper.beta", {"kind", "value", "warmup_end", "rest_start"});
  BetaSpec b;
  read(j, "kind", b.kind);
  read(j, "value", b.value);
  if (j.contains("warmup_end")) b.warmup_end = j.at("warmup_end").get<std::int64_t>();
  if (j.contains("rest_start")) b.rest_start = j.at("rest_start").get<std::int64_t>();
  return b;
}

WrapperSpec wrapper_from(const json& j) {
  reject_unknown(j, "wrapper", {"kind", "gamma", "beta", "K", "eta", "form"});
  WrapperSpec w;
  read(j, "kind", w.kind);
  read(j, "gamma", w.gamma);
  if (j.contains("beta")) w.beta = beta_from(j.at("beta"));
  read(j, "K", w.K);
  read(j, "eta", w.eta);
  read(j, "form", w.form);
  return w;
}

json to_json_value(const RunConfig& c) {
  json problem = {{"kind", c.problem.kind},
                  {"dim", c.problem.dim},
                  {"mu", c.problem.mu},
                  {"L", c.problem.L},
                  {"rank", c.problem.rank},
                  {"min_ratio", c.problem.min_ratio},
                  {"steep", c.problem.steep},
                  {"drift", c.problem.drift},
                  {"seed", c.problem.seed},
                  {"minimizer_at_origin", c.problem.minimizer_at_origin},
                  {"rows", c.problem.rows},
                  {"cols", c.problem.cols},
                  {"init", c.problem.init}};
  json optimizer = {{"kind", c.optimizer.kind},
                    {"momentum", c.optimizer.momentum},
                    {"adam_beta1", c.optimizer.adam_beta1},
                    {"adam_beta2", c.optimizer.adam_beta2},
                    {"muon_momentum", c.optimizer.muon_momentum},
                    {"weight_decay", c.optimizer.weight_decay},
                    {"eligibility", c.optimizer.eligibility},
                    {"adam_lr_ratio", c.optimizer.adam_lr_ratio}};
  json lr = {{"kind", c.lr.kind},
             {"warmup_frac", c.lr.warmup_frac},
             {"decay_frac", c.lr.decay_frac},
             {"floor_ratio", c.lr.floor_ratio},
             {"decay_start_frac", c.lr.decay_start_frac}};
  lr["peak"] = c.lr.peak ? json(*c.lr.peak) : json("1/L");
  json beta = {{"kind", c.wrapper.beta.kind}, {"value", c.wrapper.beta.value}};
  if (c.wrapper.beta.warmup_end) beta["warmup_end"] = *c.wrapper.beta.warmup_end;
  if (c.wrapper.beta.rest_start) beta["rest_start"] = *c.wrapper.beta.rest_start;
  json wrapper = {{"kind", c.wrapper.kind}, {"gamma", c.wrapper.gamma}, {"beta", beta},
                  {"K", c.wrapper.K},       {"eta", c.wrapper.eta},     {"form", c.wrapper.form}};
  return {{"problem", problem},
          {"optimizer", optimizer},
          {"lr", lr},
          {"wrapper", wrapper},
          {"total_T", c.total_T},
          {"noise_sigma", c.noise_sigma},
          {"noise_seed", c.noise_seed},
          {"log_every", c.log_every},
          {"log_iterates", c.log_iterates}};
}

void require_one_of(const std::string& value, const std::string& field, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(field + " '" + value + "' is not one of: " + list);
}

bool is_quadratic(const ProblemSpec& p) { return p.kind == "quadratic" || p.kind == "convex_flat"; }

}  // namespace

void RunConfig::validate() const {
  require_one_of(problem.kind, "problem.kind", {"quadratic", "convex_flat", "river_straight", "river_ushaped"});
  require_one_of(optimizer.kind, "optimizer.kind", {"gd", "momentum_sgd", "adam", "muon"});
  require_one_of(optimizer.eligibility, "optimizer.eligibility", {"interior", "all"});
  require_one_of(lr.kind, "lr.kind", {"constant", "wsd", "linear_decay_tail"});
  require_one_of(wrapper.kind, "wrapper.kind",
                 {"none", "ema_nesterov", "nesterov", "pessimistic", "kstep", "snoo", "gpa"});
  require_one_of(wrapper.beta.kind, "wrapper.beta.kind", {"constant", "three_stage", "strongly_convex", "convex"});
  require_one_of(wrapper.form, "wrapper.form", {"original", "reduced"});
  if (total_T < 0) throw ConfigError("total_T must be nonnegative");
  if (log_every < 1) throw ConfigError("log_every must be at least 1");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be nonnegative");
  if (lr.peak && !(*lr.peak > 0.0)) throw ConfigError("lr.peak must be positive");
  if (wrapper.K < 1) throw ConfigError("wrapper.K must be at least 1");
  if (!(wrapper.gamma >= 0.0 && wrapper.gamma < 1.0)) throw ConfigError("wrapper.gamma must lie in [0, 1)");
  if (!(optimizer.adam_lr_ratio > 0.0)) throw ConfigError("optimizer.adam_lr_ratio must be positive");
  const bool scheduled_beta = wrapper.beta.kind != "constant";
  if (scheduled_beta && wrapper.kind != "ema_nesterov" && wrapper.kind != "nesterov")
    throw ConfigError("beta kind '" + wrapper.beta.kind + "' needs an ema_nesterov or nesterov wrapper");
  if (wrapper.beta.kind == "strongly_convex" && problem.kind != "quadratic")
    throw ConfigError("strongly_convex beta needs a strongly convex quadratic problem");
  if ((problem.rows > 0 || problem.cols > 0) && (!is_quadratic(problem) || problem.rows * problem.cols != problem.dim))
    throw ConfigError("problem.rows x problem.cols must equal dim for a quadratic");
  if (!problem.init.empty()) {
    const std::size_t want = is_quadratic(problem) ? static_cast<std::size_t>(problem.dim) : 2;
    if (problem.init.size() != want)
      throw ConfigError("problem.init has " + std::to_string(problem.init.size()) + " entries, expected " +
                        std::to_string(want));
  }
}

RunConfig config_from_json(const std::string& text) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    reject_unknown(j, "config",
                   {"problem", "optimizer", "lr", "wrapper", "total_T", "noise_sigma", "noise_seed", "log_every",
                    "log_iterates"});
    if (j.contains("problem")) c.problem = problem_from(j.at("problem"));
    if (j.contains("optimizer")) c.optimizer = optimizer_from(j.at("optimizer"));
    if (j.contains("lr")) c.lr = lr_from(j.at("lr"));
    if (j.contains("wrapper")) c.wrapper = wrapper_from(j.at("wrapper"));
    read(j, "total_T", c.total_T);
    read(j, "noise_sigma", c.noise_sigma);
    read(j, "noise_seed", c.noise_seed);
    read(j, "log_every", c.log_every);
    read(j, "log_iterates", c.log_iterates);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& config) { return to_json_value(config).dump(); }

// ------------------------------------------------------------------ session

namespace {

QuadraticProblem base_quadratic(const ProblemSpec& p) {
  return p.kind == "quadratic" ? make_quadratic(p.dim, p.mu, p.L, p.seed)
                               : make_convex_flat(p.dim, p.L, p.rank, p.seed, p.min_ratio);
}

std::unique_ptr<Problem> build_problem(const ProblemSpec& p) {
  try {
    if (p.kind == "river_straight")
      return std::make_unique<RiverValleyProblem>(ValleyShape::Straight, p.steep, p.drift);
    if (p.kind == "river_ushaped")
      return std::make_unique<RiverValleyProblem>(ValleyShape::UShaped, p.steep, p.drift);
    QuadraticProblem q = base_quadratic(p);
    if (p.minimizer_at_origin) q = q.recentered(Vector::Zero(p.dim));
    if (p.rows > 0) q = q.reshaped(p.rows, p.cols);
    return std::make_unique<QuadraticProblem>(std::move(q));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

// Without an explicit init the run starts at zero. A translated quadratic
// starts at minus the original minimizer instead, so x0 - x* is unchanged.
ParamState initial_point(const ProblemSpec& spec, const Problem& problem) {
  ParamState x = problem.zero_point();
  Matrix& v = x.value(0);
  if (!spec.init.empty()) {
    std::copy(spec.init.begin(), spec.init.end(), v.data());
  } else if (spec.minimizer_at_origin) {
    const Vector original = base_quadratic(spec).minimizer();
    std::transform(original.begin(), original.end(), v.data(), [](double e) { return -e; });
  }
  return x;
}

OptimizerConfig optimizer_config(const OptimizerSpec& s) {
  OptimizerConfig c;
  if (s.kind == "gd") c.kind = OptimizerKind::GD;
  else if (s.kind == "momentum_sgd") c.kind = OptimizerKind::MomentumSGD;
  else if (s.kind == "adam") c.kind = OptimizerKind::Adam;
  else c.kind = OptimizerKind::Muon;
  c.momentum = s.momentum;
  c.adam_beta1 = s.adam_beta1;
  c.adam_beta2 = s.adam_beta2;
  c.muon_momentum = s.muon_momentum;
  c.weight_decay = s.weight_decay;
  c.eligibility = s.eligibility == "all" ? MuonEligibility::AllMatrices : MuonEligibility::InteriorMatrices;
  return c;
}

std::int64_t inner_per_outer(const WrapperSpec& w) {
  if (w.kind == "pessimistic" || w.kind == "kstep" || w.kind == "snoo") return w.K;
  return 1;
}

LrSchedule lr_schedule(const LrSpec& s, double L, std::int64_t steps) {
  const double peak = s.peak ? *s.peak : 1.0 / L;
  if (s.kind == "wsd") return LrSchedule::wsd(peak, steps, s.warmup_frac, s.decay_frac, s.floor_ratio);
  if (s.kind == "linear_decay_tail")
    return LrSchedule::linear_decay_tail(peak, steps, static_cast<std::int64_t>(s.decay_start_frac * steps));
  return LrSchedule::constant(peak, steps);
}

BetaSchedule beta_schedule(const RunConfig& c, const Problem& problem, const LrSchedule& lr) {
  const BetaSpec& b = c.wrapper.beta;
  if (b.kind == "three_stage") {
    const auto T = c.total_T;
    const std::int64_t warm = b.warmup_end.value_or(std::llround(0.3 * static_cast<double>(T)));
    const std::int64_t rest = b.rest_start.value_or(std::llround(0.8 * static_cast<double>(T)));
    return BetaSchedule::three_stage(b.value, warm, rest, lr);
  }
  if (b.kind == "strongly_convex") return BetaSchedule::constant(theorem1_beta(c.wrapper.gamma, problem.constants().kappa()));
  if (b.kind == "convex") return BetaSchedule::convex_theory(c.wrapper.gamma);
  return BetaSchedule::constant(b.value);
}

}  // namespace

Session make_session(const RunConfig& config) {
  config.validate();
  Session s;
  s.problem = build_problem(config.problem);
  s.x0 = initial_point(config.problem, *s.problem);
  if (config.noise_sigma > 0.0)
    s.oracle = std::make_unique<StochasticOracle>(*s.problem, config.noise_sigma, config.noise_seed);
  else
    s.oracle = std::make_unique<ExactOracle>(*s.problem);

  const WrapperSpec& w = config.wrapper;
  try {
    const std::int64_t steps = std::max<std::int64_t>(1, config.total_T * inner_per_outer(w));
    const LrSchedule lr = lr_schedule(config.lr, s.problem->constants().L, steps);
    InnerLoop inner(BaseOptimizer(optimizer_config(config.optimizer), s.x0), lr, config.optimizer.adam_lr_ratio);
    const AlgorithmForm form = w.form == "reduced" ? AlgorithmForm::Reduced : AlgorithmForm::Original;
    if (w.kind == "none") {
      s.method = std::make_unique<BareOptimizer>(s.x0, std::move(inner));
    } else if (w.kind == "ema_nesterov") {
      s.method = std::make_unique<EmaNesterov>(s.x0, w.gamma, beta_schedule(config, *s.problem, lr), std::move(inner));
    } else if (w.kind == "nesterov") {
      s.method = std::make_unique<NesterovClassic>(s.x0, beta_schedule(config, *s.problem, lr), std::move(inner));
    } else if (w.kind == "pessimistic") {
      s.method = std::make_unique<PessimisticLookahead>(s.x0, w.K, w.beta.value, std::move(inner));
    } else if (w.kind == "kstep") {
      s.method = std::make_unique<KStepLookahead>(s.x0, w.K, w.beta.value, std::move(inner));
    } else if (w.kind == "snoo") {
      s.method = std::make_unique<Snoo>(s.x0, w.K, w.beta.value, w.eta, form, std::move(inner));
    } else {
      s.method = std::make_unique<Gpa>(s.x0, w.beta.value, form, std::move(inner));
    }
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

// ---------------------------------------------------------------------- run

namespace {

/// Which potential, if any, the configuration certifies.
enum class Certificate { None, StronglyConvex, Convex };

Certificate certificate_for(const RunConfig& c, const Problem& problem) {
  const auto& k = problem.constants();
  if (c.wrapper.kind != "ema_nesterov" || c.optimizer.kind != "gd" || c.lr.kind != "constant") return Certificate::None;
  if (c.lr.peak && *c.lr.peak != 1.0 / k.L) return Certificate::None;
  if (!k.x_star || !k.f_star) return Certificate::None;
  if (c.wrapper.beta.kind == "strongly_convex" && k.mu > 0.0) return Certificate::StronglyConvex;
  if (c.wrapper.beta.kind == "convex") return Certificate::Convex;
  return Certificate::None;
}

}  // namespace

RunRecord run(const RunConfig& config) {
  Session s = make_session(config);
  const Problem& problem = *s.problem;
  const auto& k = problem.constants();
  const Certificate kind = certificate_for(config, problem);
  std::optional<StrongConvexCertificate> sc;
  std::optional<ConvexCertificate> cvx;
  if (kind == Certificate::StronglyConvex) sc = StrongConvexCertificate::make(config.wrapper.gamma, k.mu, k.L);
  if (kind == Certificate::Convex) cvx.emplace(config.wrapper.gamma, k.L);
  const auto* ema = dynamic_cast<const EmaNesterov*>(s.method.get());

  RunRecord record;
  record.created = utc_timestamp();
  record.config_json = config_to_json(config);
  if (config.log_iterates) record.iterate_width = s.x0.size();

  auto log_row = [&](std::int64_t t) {
    const ParamState x = s.method->solution();
    RunRow row;
    row.t = t;
    row.f = problem.value(x);
    if (!std::isfinite(row.f)) throw DivergenceError(t, "objective value");
    if (k.f_star) row.gap = row.f - *k.f_star;
    row.dir_norm = s.method->lookahead_norm();
    if (t > 0) {
      row.beta = s.method->last_beta();
      row.lr = s.method->inner().last_lr();
    }
    if (sc) row.lyapunov = lyapunov_strongly_convex(ema->x(), ema->m(), *sc, problem);
    if (cvx) row.lyapunov = lyapunov_convex(ema->x(), ema->m(), t, *cvx, problem);
    if (config.log_iterates) row.iterate = x.flatten();
    record.rows.push_back(std::move(row));
  };

  try {
    log_row(0);
    for (std::int64_t t = 1; t <= config.total_T; ++t) {
      s.method->step(*s.oracle);
      if (t % config.log_every == 0 || t == config.total_T) log_row(t);
    }
  } catch (const DivergenceError& e) {
    record.status = RunStatus::Diverged;
    record.diverged_at = e.iteration();
  }
  return record;
}

// -------------------------------------------------------------------- probe

std::vector<ProbeRow> probe(const RunConfig& config, std::vector<std::int64_t> at_iters,
                            const std::vector<double>& betas) {
  if (config.wrapper.kind != "ema_nesterov") throw ConfigError("probe needs an ema_nesterov wrapper");
  for (auto t : at_iters)
    if (t < 0 || t > config.total_T)
      throw ParameterError("probe iteration " + std::to_string(t) + " outside [0, " +
                           std::to_string(config.total_T) + "]");
  std::sort(at_iters.begin(), at_iters.end());
  at_iters.erase(std::unique(at_iters.begin(), at_iters.end()), at_iters.end());

  Session s = make_session(config);
  const auto& ema = dynamic_cast<const EmaNesterov&>(*s.method);
  std::vector<ProbeRow> rows;
  std::int64_t t = 0;
  for (auto target : at_iters) {
    for (; t < target; ++t) s.method->step(*s.oracle);
    const auto along_delta = lookahead_probe(ema.x(), ema.last_delta(), betas, *s.problem);
    const auto along_m = lookahead_probe(ema.x(), ema.m(), betas, *s.problem);
    for (std::size_t i = 0; i < betas.size(); ++i) rows.push_back({target, betas[i], along_delta[i], along_m[i]});
  }
  return rows;
}

// -------------------------------------------------------------------- sweep

std::vector<SweepPoint> sweep(const RunConfig& base, const std::vector<double>& gammas,
                              const std::vector<double>& betas, const std::vector<std::uint64_t>& seeds,
                              int threads) {
  if (base.wrapper.kind != "ema_nesterov") throw ConfigError("sweep needs an ema_nesterov wrapper");
  if (threads < 1) throw ConfigError("--parallel must be at least 1");
  std::vector<SweepPoint> points;
  std::vector<RunConfig> configs;
  for (double g : gammas)
    for (double b : betas)
      for (auto seed : seeds) {
        RunConfig c = base;
        c.wrapper.gamma = g;
        c.wrapper.beta.value = b;
        c.noise_seed = seed;
        c.validate();
        configs.push_back(c);
        points.push_back({g, b, seed, {}});
      }

  const auto n = static_cast<std::int64_t>(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      points[i].record = run(configs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return points;
}

std::string to_string(RunStatus status) { return status == RunStatus::Complete ? "complete" : "diverged"; }

}  // namespace lookahead
