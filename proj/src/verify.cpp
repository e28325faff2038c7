#include "lookahead/verify.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lookahead/theory.hpp"
#include "lookahead/wrappers.hpp"

namespace lookahead {

namespace {

Check le(std::string name, double measured, double bound, std::string detail = {}) {
  return {std::move(name), measured, bound, measured <= bound, std::move(detail)};
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

InnerLoop gd_loop(const ParamState& layout, double lr, std::int64_t steps) {
  return InnerLoop(BaseOptimizer({}, layout), LrSchedule::constant(lr, steps));
}

/// A quadratic whose minimizer sits at the origin, started from the
/// minimizer the seed would otherwise have produced. Iterates then keep full
/// relative precision all the way down.
struct CenteredQuadratic {
  QuadraticProblem problem;
  ParamState x0;
};

CenteredQuadratic centered_quadratic(int dim, double mu, double L, std::uint64_t seed) {
  const QuadraticProblem q = make_quadratic(dim, mu, L, seed);
  return {q.recentered(Vector::Zero(dim)), *q.constants().x_star};
}

CenteredQuadratic centered_flat(int dim, double L, int rank, std::uint64_t seed) {
  const QuadraticProblem q = make_convex_flat(dim, L, rank, seed);
  Vector start(dim);
  const CounterRng rng(seed, 3);
  for (int i = 0; i < dim; ++i) start(i) = 2.0 * rng.uniform(0, static_cast<std::uint64_t>(i)) - 1.0;
  return {q.recentered(Vector::Zero(dim)), ParamState::single("x", start)};
}

double distance(const ParamState& x, const Problem& p) { return norm2(difference(x, *p.constants().x_star)); }

constexpr int kRateSteps = 2000;

// ---------------------------------------------------------------- rates

std::vector<double> distances_ema(const CenteredQuadratic& q, double gamma, BetaSchedule beta, int steps) {
  const ExactOracle oracle(q.problem);
  EmaNesterov ema(q.x0, gamma, beta, gd_loop(q.x0, 1.0 / q.problem.constants().L, steps));
  std::vector<double> out;
  for (int t = 0; t < steps; ++t) {
    ema.step(oracle);
    out.push_back(distance(ema.x(), q.problem));
  }
  return out;
}

void rates_sc(Report& r) {
  const auto q = centered_quadratic(50, 1.0, 100.0, 7);
  const double kappa = 100.0;
  const ExactOracle oracle(q.problem);
  BareOptimizer gd(q.x0, gd_loop(q.x0, 0.01, kRateSteps));
  std::vector<double> gd_dist;
  for (int t = 0; t < kRateSteps; ++t) {
    gd.step(oracle);
    gd_dist.push_back(distance(gd.solution(), q.problem));
  }
  const double rho_gd = fit_geometric_rate(gd_dist);
  r.checks.push_back(le("gd_rate_near_1-1/kappa", std::abs(rho_gd - (1.0 - 1.0 / kappa)), 0.005,
                        fmt("rho_gd=%.6f", rho_gd)));
  for (double gamma : {0.0, 0.3, 0.5, 0.9}) {
    const auto d = distances_ema(q, gamma, BetaSchedule::constant(theorem1_beta(gamma, kappa)), kRateSteps);
    const double rho = fit_geometric_rate(d);
    const std::string tag = fmt("gamma=%g", gamma);
    r.checks.push_back(le("ema_rate_" + tag, rho, 1.0 - std::sqrt((1.0 - gamma) / kappa) + 0.01));
    r.checks.push_back({"ema_faster_than_gd_" + tag, rho, rho_gd, rho < rho_gd, {}});
  }
}

void rates_cvx(Report& r) {
  const auto q = centered_flat(20, 1.0, 10, 7);
  const ExactOracle oracle(q.problem);
  const double d0 = std::pow(distance(q.x0, q.problem), 2);
  for (double gamma : {0.0, 0.5, 0.9}) {
    const ConvexCertificate cert(gamma, 1.0);
    EmaNesterov ema(q.x0, gamma, BetaSchedule::convex_theory(gamma), gd_loop(q.x0, 1.0, kRateSteps));
    std::vector<double> gaps;
    double worst = 0.0;
    for (int t = 1; t <= kRateSteps; ++t) {
      ema.step(oracle);
      const double gap = q.problem.value(ema.x());
      gaps.push_back(gap);
      worst = std::max(worst, gap / cert.gap_bound(t, d0));
    }
    const std::string tag = fmt("gamma=%g", gamma);
    r.checks.push_back(le("gap_over_explicit_bound_" + tag, worst, 1.0));
    r.checks.push_back(le("tail_loglog_slope_" + tag, fit_power_law_slope(gaps), -1.9));
  }
}

// ------------------------------------------------------------ reductions

void reductions(Report& r) {
  constexpr int kSteps = 1000;
  {
    const auto q = centered_quadratic(50, 1.0, 100.0, 7);
    const ExactOracle oracle(q.problem);
    const auto beta = BetaSchedule::constant(theorem1_beta(0.0, 100.0));
    EmaNesterov ema(q.x0, 0.0, beta, gd_loop(q.x0, 0.01, kSteps));
    NesterovClassic classic(q.x0, beta, gd_loop(q.x0, 0.01, kSteps));
    double dev = 0.0;
    for (int t = 0; t < kSteps; ++t) {
      ema.step(oracle);
      classic.step(oracle);
      dev = std::max(dev, max_abs_difference(ema.solution(), classic.solution()));
    }
    r.checks.push_back(le("ema_gamma0_vs_classic", dev, 0.0));
  }

  const QuadraticProblem p = make_quadratic(20, 1.0, 10.0, 11);
  const StochasticOracle noisy(p, 0.1, 5);
  const ParamState x0 = p.zero_point();
  {
    OptimizerConfig sgd;
    sgd.kind = OptimizerKind::MomentumSGD;
    sgd.momentum = 0.9;
    const auto loop = [&] { return InnerLoop(BaseOptimizer(sgd, x0), LrSchedule::constant(0.005, 5 * kSteps)); };
    Snoo original(x0, 5, 0.9, 1.0, AlgorithmForm::Original, loop());
    Snoo reduced(x0, 5, 0.9, 1.0, AlgorithmForm::Reduced, loop());
    double dev = 0.0;
    for (int t = 0; t < kSteps; ++t) {
      original.step(noisy);
      reduced.step(noisy);
      dev = std::max(dev, max_abs_difference(original.solution(), reduced.solution()));
    }
    r.checks.push_back(le("snoo_original_vs_reduced", dev, 1e-10));
  }
  {
    const double beta = 0.9, gamma_p = 0.1, gamma_m = (1.0 - beta) * gamma_p;
    Gpa original(x0, beta, AlgorithmForm::Original, gd_loop(x0, gamma_p, kSteps));
    Gpa reduced(x0, beta, AlgorithmForm::Reduced, gd_loop(x0, gamma_p, kSteps));
    double dev = 0.0, id_x = 0.0, id_b = 0.0, id_y = 0.0;
    Direction b_prev = Direction::zeros_like(x0);
    for (int t = 0; t < kSteps; ++t) {
      const ParamState x = original.x(), y = original.y(), z = original.z();
      original.step(noisy);
      reduced.step(noisy);
      dev = std::max(dev, max_abs_difference(original.x(), reduced.x()));
      const Direction b = scale(1.0 / gamma_m, difference(x, original.x()));
      const Direction& g = original.last_gradient();
      id_x = std::max(id_x, max_abs_difference(x, axpy(gamma_p * beta, b_prev, z)));
      id_b = std::max(id_b, max_abs_difference(b, combine(beta, b_prev, 1.0, g)));
      id_y = std::max(id_y, max_abs_difference(original.y(), axpy(-gamma_m, combine(beta, b, 1.0, g), y)));
      b_prev = b;
    }
    r.checks.push_back(le("gpa_original_vs_reduced", dev, 1e-10));
    r.checks.push_back(le("gpa_identity_x_eq_z_plus_momentum", id_x, 1e-12));
    r.checks.push_back(le("gpa_identity_b_recursion", id_b, 1e-12));
    r.checks.push_back(le("gpa_identity_y_update", id_y, 1e-12));
  }
  {
    constexpr int K = 5;
    KStepLookahead kstep(x0, K, 0.5, gd_loop(x0, 0.05, K * kSteps));
    std::vector<Direction> deltas;
    ParamState prev = x0;
    kstep.set_observer([&](const ParamState&, const ParamState& to) {
      deltas.push_back(difference(to, prev));
      prev = to;
    });
    double dev = 0.0;
    for (int t = 0; t < kSteps; ++t) {
      kstep.step(noisy);
      Direction sum = Direction::zeros_like(x0);
      for (std::size_t i = deltas.size() - K; i < deltas.size(); ++i) sum = combine(1.0, sum, 1.0, deltas[i]);
      dev = std::max(dev, max_abs_difference(kstep.b(), scale(static_cast<double>(K), scale(1.0 / K, sum))));
    }
    r.checks.push_back(le("kstep_b_is_K_times_mean_update", dev, 1e-12));
  }
  {
    const double beta = 0.5;
    PessimisticLookahead pess(x0, 1, beta, gd_loop(x0, 0.05, kSteps));
    double dev = 0.0;
    for (int t = 0; t < kSteps; ++t) {
      const ParamState x = pess.solution();
      pess.step(noisy);
      const ParamState& ax = pess.last_burst_end();
      dev = std::max(dev, max_abs_difference(pess.solution(), axpy(beta - 1.0, difference(ax, x), ax)));
    }
    r.checks.push_back(le("pessimistic_K1_reversed_lookahead", dev, 1e-14));
  }
}

// --------------------------------------------------------------- filters

void filters(Report& r) {
  for (double gamma : {0.1, 0.5, 0.9, 0.99, 0.995}) {
    const std::string tag = fmt("gamma=%g", gamma);
    r.checks.push_back(le("dc_gain_" + tag, std::abs(ema_transfer_magnitude(gamma, 0.0) - 1.0), 1e-15));
    int violations = 0;
    double prev = ema_transfer_magnitude(gamma, 0.0);
    for (int i = 1; i < 1000; ++i) {
      const double h = ema_transfer_magnitude(gamma, std::numbers::pi * i / 999.0);
      if (!(h < prev)) ++violations;
      prev = h;
    }
    r.checks.push_back(le("strictly_decreasing_" + tag, violations, 0.0));
  }

  constexpr int kSteps = 500;
  const QuadraticProblem p = make_quadratic(20, 1.0, 10.0, 13);
  const StochasticOracle noisy(p, 0.1, 9);
  const ParamState x0 = p.zero_point();
  const double gamma = 0.9;
  EmaNesterov ema(x0, gamma, BetaSchedule::constant(0.5), gd_loop(x0, 0.05, kSteps));
  std::vector<Direction> deltas;
  double dev = 0.0;
  for (int t = 0; t < kSteps; ++t) {
    ema.step(noisy);
    deltas.push_back(ema.last_delta());
    Direction sum = Direction::zeros_like(x0);
    double weight = 1.0 - gamma;
    for (auto it = deltas.rbegin(); it != deltas.rend(); ++it, weight *= gamma) sum = combine(1.0, sum, weight, *it);
    dev = std::max(dev, max_abs_difference(ema.m(), sum));
  }
  r.checks.push_back(le("ema_closed_form_expansion", dev, 1e-10));
}

// ------------------------------------------------------------- lyapunov

void lyapunov(Report& r) {
  const auto q = centered_quadratic(50, 1.0, 100.0, 7);
  const ExactOracle oracle(q.problem);
  for (double gamma : {0.0, 0.5, 0.9}) {
    const auto cert = StrongConvexCertificate::make(gamma, 1.0, 100.0);
    EmaNesterov ema(q.x0, gamma, BetaSchedule::constant(cert.beta), gd_loop(q.x0, cert.alpha, kRateSteps));
    double prev = lyapunov_strongly_convex(ema.x(), ema.m(), cert, q.problem);
    int violations = 0;
    for (int t = 0; t < kRateSteps; ++t) {
      ema.step(oracle);
      const double e = lyapunov_strongly_convex(ema.x(), ema.m(), cert, q.problem);
      if (e > (1.0 - cert.r) * prev * (1.0 + 1e-9)) ++violations;
      prev = e;
    }
    r.checks.push_back(le(fmt("strongly_convex_contraction_gamma=%g", gamma), violations, 0.0));
  }

  const auto flat = centered_flat(20, 1.0, 10, 7);
  const ExactOracle flat_oracle(flat.problem);
  for (double gamma : {0.0, 0.5, 0.9}) {
    const ConvexCertificate cert(gamma, 1.0);
    EmaNesterov ema(flat.x0, gamma, BetaSchedule::convex_theory(gamma), gd_loop(flat.x0, 1.0, kRateSteps));
    double prev = lyapunov_convex(ema.x(), ema.m(), 0, cert, flat.problem);
    int violations = 0;
    for (int t = 1; t <= kRateSteps; ++t) {
      ema.step(flat_oracle);
      const double phi = lyapunov_convex(ema.x(), ema.m(), t, cert, flat.problem);
      if (phi > prev * (1.0 + 1e-9)) ++violations;
      prev = phi;
    }
    r.checks.push_back(le(fmt("convex_monotone_gamma=%g", gamma), violations, 0.0));
  }

  double worst_disc = 0.0;
  for (double kappa : {2.0, 10.0, 100.0, 1e4})
    for (int i = 0; i < 100; ++i) {
      const double gamma = (1.0 - 1.0 / kappa) * i / 100.0;
      worst_disc = std::min(worst_disc, strong_convex_discriminant(gamma, kappa));
    }
  r.checks.push_back({"discriminant_nonnegative", worst_disc, 0.0, worst_disc >= 0.0, {}});

  double worst_a = 1e300;
  for (double gamma : {0.0, 0.3, 0.5, 0.9, 0.99}) {
    const ConvexCertificate cert(gamma, 1.0);
    for (std::int64_t t = 1; t <= 10000; ++t) {
      const double lower = (1.0 - gamma) * static_cast<double>(t * t) / 16.0;
      worst_a = std::min(worst_a, cert.a(t) / lower);
    }
  }
  r.checks.push_back({"a_t_lower_bound_ratio", worst_a, 1.0, worst_a >= 1.0, {}});
}

// --------------------------------------------------------- newton-schulz

Matrix conditioned_matrix(int rows, int cols, double condition, std::uint64_t seed) {
  const int n = std::min(rows, cols);
  const Matrix u = random_rotation(rows, seed).leftCols(n);
  const Matrix v = random_rotation(cols, seed + 1).leftCols(n);
  Vector s(n);
  for (int i = 0; i < n; ++i) s(i) = std::pow(condition, -static_cast<double>(i) / std::max(1, n - 1));
  return u * s.asDiagonal() * v.transpose();
}

void newton_schulz(Report& r) {
  double lo = 1e300, hi = 0.0, orth = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CounterRng rng(4242, static_cast<std::uint64_t>(k));
    const int rows = 2 + static_cast<int>(rng.uniform(0, 0) * 63.0);
    const int cols = 2 + static_cast<int>(rng.uniform(0, 1) * 63.0);
    const double condition = 1.0 + 99.0 * rng.uniform(0, 2);
    const Matrix y = newton_schulz5(conditioned_matrix(rows, cols, condition, 1000 + 2 * k));
    const Vector sv = Eigen::JacobiSVD<Matrix>(y).singularValues();
    lo = std::min(lo, sv.minCoeff());
    hi = std::max(hi, sv.maxCoeff());
    const Matrix gram = rows <= cols ? Matrix(y * y.transpose()) : Matrix(y.transpose() * y);
    orth = std::max(orth, (gram - Matrix::Identity(gram.rows(), gram.cols())).norm() / std::sqrt(gram.rows()));
  }
  r.checks.push_back({"singular_values_lower", lo, 0.7, lo >= 0.7, {}});
  r.checks.push_back(le("singular_values_upper", hi, 1.3));
  r.checks.push_back(le("orthogonality_over_sqrt_min_dim", orth, 0.5));

  const QuadraticProblem p = make_quadratic(64, 1.0, 10.0, 17).reshaped(8, 8);
  const StochasticOracle noisy(p, 0.1, 3);
  OptimizerConfig muon;
  muon.kind = OptimizerKind::Muon;
  muon.eligibility = MuonEligibility::AllMatrices;
  muon.weight_decay = 0.1;
  ParamState x = p.zero_point();
  BaseOptimizer opt(muon, x);
  const double phi = muon.muon_momentum;
  double input_dev = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Direction g = noisy.sample(x, static_cast<std::uint64_t>(t));
    const Matrix expected = (phi * phi) * opt.muon_buffer().value(0) + (1.0 - phi * phi) * g.value(0);
    x = opt.step(x, g, {0.02, 0.02});
    input_dev = std::max(input_dev, (opt.last_orthogonalization_inputs()[0] - expected).cwiseAbs().maxCoeff());
  }
  r.checks.push_back(le("ns_input_is_nesterov_blend", input_dev, 0.0));

  muon.muon_momentum = 0.0;
  BaseOptimizer plain(muon, x);
  double reduce_dev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Direction g = noisy.sample(x, 100 + static_cast<std::uint64_t>(t));
    const Matrix expected = (1.0 - 0.02 * muon.weight_decay) * x.value(0) - 0.02 * newton_schulz5(g.value(0));
    x = plain.step(x, g, {0.02, 0.02});
    reduce_dev = std::max(reduce_dev, (x.value(0) - expected).cwiseAbs().maxCoeff());
  }
  r.checks.push_back(le("momentum_zero_reduction", reduce_dev, 0.0));
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Report verify(Suite suite) {
  Report r;
  r.suite = suite;
  switch (suite) {
    case Suite::RatesSC: rates_sc(r); break;
    case Suite::RatesCvx: rates_cvx(r); break;
    case Suite::Reductions: reductions(r); break;
    case Suite::Filters: filters(r); break;
    case Suite::Lyapunov: lyapunov(r); break;
    case Suite::NewtonSchulz: newton_schulz(r); break;
  }
  return r;
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites{Suite::RatesSC, Suite::RatesCvx, Suite::Reductions,
                                         Suite::Filters, Suite::Lyapunov, Suite::NewtonSchulz};
  return suites;
}

std::string to_string(Suite suite) {
  switch (suite) {
    case Suite::RatesSC: return "rates_sc";
    case Suite::RatesCvx: return "rates_cvx";
    case Suite::Reductions: return "reductions";
    case Suite::Filters: return "filters";
    case Suite::Lyapunov: return "lyapunov";
    case Suite::NewtonSchulz: return "newton_schulz";
  }
  return "?";
}

std::optional<Suite> parse_suite(const std::string& name) {
  for (Suite s : all_suites())
    if (to_string(s) == name) return s;
  return std::nullopt;
}

std::string format_report(const Report& report) {
  std::string out;
  char buf[96];
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, " measured=%.6g bound=%.6g", c.measured, c.bound);
    out += std::string(c.passed ? "PASS " : "FAIL ") + to_string(report.suite) + "/" + c.name + buf;
    if (!c.detail.empty()) out += " " + c.detail;
    out += "\n";
  }
  return out;
}

}  // namespace lookahead
