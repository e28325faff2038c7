// End-to-end acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance 3 7        run the listed criteria
//
// Bounds are evaluated with oracles written here (plain Eigen loops,
// closed-form step sizes and potentials), not with the library's own
// certificate code.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lookahead/harness.hpp"
#include "lookahead/record_io.hpp"
#include "lookahead/rng.hpp"
#include "lookahead/theory.hpp"
#include "lookahead/verify.hpp"
#include "lookahead/wrappers.hpp"

using namespace lookahead;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!! ") + what;
  }
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vector flat(const ParamState& x) { return x.value(0).reshaped(); }
Vector flat(const Direction& d) { return d.value(0).reshaped(); }

// Least-squares slope of v against u.
double slope(const std::vector<double>& u, const std::vector<double>& v) {
  const double n = static_cast<double>(u.size());
  double mu = 0, mv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) mu += u[i], mv += v[i];
  mu /= n;
  mv /= n;
  double suu = 0, suv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) suu += (u[i] - mu) * (u[i] - mu), suv += (u[i] - mu) * (v[i] - mv);
  return suv / suu;
}

// Per-step contraction from the last 40% of a sequence indexed t = 1, 2, ...
double tail_rate(const std::vector<double>& d) {
  std::vector<double> u, v;
  for (std::size_t i = d.size() - d.size() * 2 / 5; i < d.size(); ++i) u.push_back(double(i + 1)), v.push_back(std::log(d[i]));
  return std::exp(slope(u, v));
}

double tail_loglog_slope(const std::vector<double>& d) {
  std::vector<double> u, v;
  for (std::size_t i = d.size() - d.size() * 2 / 5; i < d.size(); ++i)
    u.push_back(std::log(double(i + 1))), v.push_back(std::log(d[i]));
  return slope(u, v);
}

InnerLoop gd_loop(const ParamState& layout, double lr, std::int64_t steps) {
  return InnerLoop(BaseOptimizer({}, layout), LrSchedule::constant(lr, steps));
}

// Seed-7 quadratic with its Hessian kept and the minimizer moved to the
// origin; the start is where the minimizer used to be.
struct Centered {
  QuadraticProblem problem;
  ParamState x0;
};

Centered strongly_convex_case() {
  const QuadraticProblem q = make_quadratic(50, 1.0, 100.0, 7);
  return {q.recentered(Vector::Zero(50)), *q.constants().x_star};
}

Centered flat_case() {
  const QuadraticProblem q = make_convex_flat(20, 1.0, 10, 7);
  Vector start(20);
  const CounterRng rng(7, 3);
  for (int i = 0; i < 20; ++i) start(i) = 2.0 * rng.uniform(0, static_cast<std::uint64_t>(i)) - 1.0;
  return {q.recentered(Vector::Zero(20)), ParamState::single("x", start)};
}

// ------------------------------------------------------------ criteria 1, 2

struct StronglyConvexRun {
  std::vector<double> dist;
  std::vector<double> energy;  // E_0 .. E_T
  double r = 0;
};

StronglyConvexRun strongly_convex_run(const Centered& q, double gamma, int steps) {
  const double kappa = 100.0, mu = 1.0;
  const double beta = std::pow(std::sqrt(1 - gamma) - std::sqrt(1 / kappa), 2) / ((1 - gamma) * (1 - 1 / kappa));
  const double r = std::sqrt((1 - gamma) / kappa);
  const double c = (1 - gamma - r) / ((1 - gamma) * r);
  const Matrix& H = q.problem.hessian();
  const auto energy = [&](const Vector& x, const Vector& m) {
    const Vector v = x + c * m;
    return 0.5 * x.dot(H * x) + 0.5 * mu * v.squaredNorm();
  };
  const ExactOracle oracle(q.problem);
  EmaNesterov ema(q.x0, gamma, BetaSchedule::constant(beta), gd_loop(q.x0, 1.0 / kappa, steps));
  StronglyConvexRun out;
  out.r = r;
  out.energy.push_back(energy(flat(ema.x()), flat(ema.m())));
  for (int t = 0; t < steps; ++t) {
    ema.step(oracle);
    const Vector x = flat(ema.x());
    out.dist.push_back(x.norm());
    out.energy.push_back(energy(x, ema.m().value(0).reshaped()));
  }
  return out;
}

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  const auto q = strongly_convex_case();
  const Matrix H = q.problem.hessian();
  Vector x = flat(q.x0);
  std::vector<double> gd;
  for (int t = 0; t < 2000; ++t) {
    x = x - 0.01 * (H * x);
    gd.push_back(x.norm());
  }
  const double rho_gd = tail_rate(gd);
  o.require(std::abs(rho_gd - 0.99) <= 0.005, "rho_gd=" + num(rho_gd));
  for (double gamma : {0.0, 0.3, 0.5, 0.9}) {
    const double rho = tail_rate(strongly_convex_run(q, gamma, 2000).dist);
    const double bound = 1 - std::sqrt((1 - gamma) / 100.0) + 0.01;
    o.require(rho <= bound && rho < rho_gd, "gamma=" + num(gamma) + " rho=" + num(rho) + " bound=" + num(bound));
  }
  const double secs = seconds_since(start);
  o.require(secs < 5.0, "time=" + num(secs) + "s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto q = strongly_convex_case();
  for (double gamma : {0.0, 0.3, 0.5, 0.9}) {
    const auto run = strongly_convex_run(q, gamma, 2000);
    int violations = 0;
    double worst = 0;
    for (std::size_t t = 0; t + 1 < run.energy.size(); ++t) {
      const double ratio = run.energy[t + 1] / ((1 - run.r) * run.energy[t]);
      worst = std::max(worst, ratio);
      if (run.energy[t + 1] > (1 - run.r) * run.energy[t] * (1 + 1e-9)) ++violations;
    }
    o.require(violations == 0, "gamma=" + num(gamma) + " violations=" + std::to_string(violations) +
                                   " max E'/((1-r)E)=" + num(worst));
  }
  return o;
}

// -------------------------------------------------------------- criterion 3

Outcome criterion3() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  const auto q = flat_case();
  const Matrix& H = q.problem.hessian();
  const double L = 1.0;
  const double d0 = flat(q.x0).squaredNorm();  // minimizer at the origin
  for (double gamma : {0.0, 0.5, 0.9}) {
    const auto c = [&](double t) { return 1 + gamma / (4 * (1 - gamma)) + t / 4; };
    const auto beta = [&](double t) { return (c(t) - gamma * c(t + 1)) / (1 + (1 - gamma) * c(t + 1)); };
    const auto a = [&](double t) {
      t = std::max(t, 1.0);
      const double qt = 1 + (1 - gamma) * c(t);
      return c(t - 1) * qt * qt / (c(t - 1) - gamma * c(t));
    };
    const auto potential = [&](const Vector& x, const Vector& m, double t) {
      return a(t) / L * 0.5 * x.dot(H * x) + 0.5 * (x + c(t) * m).squaredNorm();
    };
    const ExactOracle oracle(q.problem);
    EmaNesterov ema(q.x0, gamma, BetaSchedule::convex_theory(gamma), gd_loop(q.x0, 1.0 / L, 2000));
    double prev = potential(flat(ema.x()), flat(ema.m()), 0);
    double worst_gap = 0, worst_beta = 0;
    int violations = 0;
    std::vector<double> gaps;
    for (int t = 1; t <= 2000; ++t) {
      ema.step(oracle);
      worst_beta = std::max(worst_beta, std::abs(ema.last_beta() - beta(t - 1)));
      const Vector x = flat(ema.x());
      const double gap = 0.5 * x.dot(H * x);
      gaps.push_back(gap);
      const double bound = 97 * L * d0 / (2 * std::pow(1 - gamma, 3) * double(t) * double(t));
      worst_gap = std::max(worst_gap, gap / bound);
      const double phi = potential(x, flat(ema.m()), t);
      if (phi > prev * (1 + 1e-9)) ++violations;
      prev = phi;
    }
    const double s = tail_loglog_slope(gaps);
    o.require(worst_gap <= 1 && violations == 0 && s <= -1.9 && worst_beta <= 1e-15,
              "gamma=" + num(gamma) + " max gap/bound=" + num(worst_gap) + " potential violations=" +
                  std::to_string(violations) + " slope=" + num(s));
  }
  const double secs = seconds_since(start);
  o.require(secs < 5.0, "time=" + num(secs) + "s");
  return o;
}

// -------------------------------------------------------------- criterion 4

Outcome criterion4() {
  Outcome o;
  const QuadraticProblem p = make_quadratic(50, 1.0, 100.0, 7);
  const double beta = (std::sqrt(100.0) - 1) / (std::sqrt(100.0) + 1), alpha = 0.01;
  const ExactOracle oracle(p);
  EmaNesterov ema(p.zero_point(), 0.0, BetaSchedule::constant(beta), gd_loop(p.zero_point(), alpha, 1000));
  Vector x = Vector::Zero(50), prev = x;
  int mismatches = 0;
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const Vector y = x + beta * (x - prev);
    const Vector g = flat(p.gradient(ParamState::single("x", y)));
    prev = x;
    x = y - alpha * g;
    ema.step(oracle);
    const Vector got = flat(ema.x());
    if (got != x) ++mismatches;
    worst = std::max(worst, (got - x).cwiseAbs().maxCoeff());
  }
  o.require(mismatches == 0, "steps differing=" + std::to_string(mismatches) + " max dev=" + num(worst));
  return o;
}

// -------------------------------------------------------------- criterion 5

Outcome criterion5() {
  Outcome o;
  const QuadraticProblem p = make_quadratic(20, 1.0, 10.0, 11);
  const StochasticOracle noisy(p, 0.1, 5);
  const ParamState x0 = p.zero_point();
  OptimizerConfig sgd;
  sgd.kind = OptimizerKind::MomentumSGD;
  const auto loop = [&] { return InnerLoop(BaseOptimizer(sgd, x0), LrSchedule::constant(0.005, 5000)); };
  const double beta = 0.9;
  Snoo original(x0, 5, beta, 1.0, AlgorithmForm::Original, loop());
  Snoo reduced(x0, 5, beta, 1.0, AlgorithmForm::Reduced, loop());
  double dev = 0;
  for (int t = 0; t < 1000; ++t) {
    original.step(noisy);
    reduced.step(noisy);
    const Vector theta = flat(original.state_point());
    const Vector mapped = flat(reduced.state_point()) - beta * reduced.b().value(0).reshaped();
    dev = std::max(dev, (theta - mapped).cwiseAbs().maxCoeff());
  }
  o.require(dev < 1e-10, "max |theta - (x - beta b)|=" + num(dev));
  return o;
}

// -------------------------------------------------------------- criterion 6

Outcome criterion6() {
  Outcome o;
  const QuadraticProblem p = make_quadratic(20, 1.0, 10.0, 11);
  const StochasticOracle noisy(p, 0.1, 5);
  const ParamState x0 = p.zero_point();
  const double beta = 0.9, gamma_p = 0.1, gamma_m = (1 - beta) * gamma_p;
  Gpa original(x0, beta, AlgorithmForm::Original, gd_loop(x0, gamma_p, 1000));
  Gpa reduced(x0, beta, AlgorithmForm::Reduced, gd_loop(x0, gamma_p, 1000));
  double dev = 0, id_x = 0, id_b = 0, id_y = 0;
  Vector b_prev = Vector::Zero(20);
  for (int t = 0; t < 1000; ++t) {
    const Vector x = flat(original.x()), y = flat(original.y()), z = flat(original.z());
    original.step(noisy);
    reduced.step(noisy);
    const Vector x_next = flat(original.x()), y_next = flat(original.y());
    dev = std::max(dev, (x_next - flat(reduced.x())).cwiseAbs().maxCoeff());
    const Vector g = original.last_gradient().value(0).reshaped();
    const Vector b = (x - x_next) / gamma_m;
    id_x = std::max(id_x, (x - (z + gamma_p * beta * b_prev)).cwiseAbs().maxCoeff());
    id_b = std::max(id_b, (b - (beta * b_prev + g)).cwiseAbs().maxCoeff());
    id_y = std::max(id_y, (y_next - (y - gamma_m * (beta * b + g))).cwiseAbs().maxCoeff());
    b_prev = b;
  }
  o.require(dev < 1e-10, "x deviation=" + num(dev));
  o.require(std::max({id_x, id_b, id_y}) <= 1e-12,
            "identities x=" + num(id_x) + " b=" + num(id_b) + " y=" + num(id_y));
  return o;
}

// -------------------------------------------------------------- criterion 7

Outcome criterion7() {
  Outcome o;
  const QuadraticProblem p = make_quadratic(20, 1.0, 10.0, 11);
  const StochasticOracle noisy(p, 0.1, 5);
  const ParamState x0 = p.zero_point();
  {
    // The trajectory is every inner iterate plus the anchor jumps; b is the
    // sum of the K displacements ending each period, lookahead jump included.
    constexpr int K = 5;
    KStepLookahead kstep(x0, K, 0.5, gd_loop(x0, 0.05, K * 1000));
    std::vector<Vector> deltas;
    Vector last = flat(x0);
    kstep.set_observer([&](const ParamState&, const ParamState& to) {
      deltas.push_back(flat(to) - last);
      last = flat(to);
    });
    double dev = 0;
    for (int t = 0; t < 1000; ++t) {
      kstep.step(noisy);
      Vector mean = Vector::Zero(20);
      for (std::size_t i = deltas.size() - K; i < deltas.size(); ++i) mean += deltas[i];
      mean /= K;
      dev = std::max(dev, (kstep.b().value(0).reshaped() - K * mean).cwiseAbs().maxCoeff());
    }
    o.require(dev <= 1e-12, "kstep |b - K mean(dx)|=" + num(dev));
  }
  {
    const double beta = 0.5, alpha = 0.05;
    PessimisticLookahead pess(x0, 1, beta, gd_loop(x0, alpha, 1000));
    Vector x = flat(x0);
    double dev = 0;
    for (int t = 0; t < 1000; ++t) {
      const Vector g = flat(noisy.sample(ParamState::single("x", x), static_cast<std::uint64_t>(t)));
      const Vector ax = x - alpha * g;
      x = ax + (beta - 1) * (ax - x);
      pess.step(noisy);
      dev = std::max(dev, (flat(pess.solution()) - x).cwiseAbs().maxCoeff());
    }
    o.require(dev <= 1e-14, "pessimistic K=1 deviation=" + num(dev));
  }
  return o;
}

// -------------------------------------------------------------- criterion 8

Outcome criterion8() {
  Outcome o;
  for (double gamma : {0.1, 0.5, 0.9, 0.99, 0.995}) {
    const double dc = std::abs(ema_transfer_magnitude(gamma, 0.0) - 1.0);
    int violations = 0;
    double prev = ema_transfer_magnitude(gamma, 0.0);
    double worst_ref = 0;
    for (int i = 1; i < 1000; ++i) {
      const double w = std::numbers::pi * i / 999.0;
      const double h = ema_transfer_magnitude(gamma, w);
      const double ref = std::abs((1 - gamma) / (1.0 - gamma * std::polar(1.0, -w)));
      worst_ref = std::max(worst_ref, std::abs(h - ref));
      if (!(h < prev)) ++violations;
      prev = h;
    }
    o.require(dc <= 1e-15 && violations == 0 && worst_ref <= 1e-12,
              "gamma=" + num(gamma) + " |H(0)-1|=" + num(dc) + " non-decreasing=" + std::to_string(violations));
  }

  const QuadraticProblem p = make_quadratic(20, 1.0, 10.0, 13);
  const StochasticOracle noisy(p, 0.1, 9);
  const ParamState x0 = p.zero_point();
  const double gamma = 0.9;
  EmaNesterov ema(x0, gamma, BetaSchedule::constant(0.5), gd_loop(x0, 0.05, 500));
  std::vector<Vector> x{flat(x0)};
  double dev = 0;
  for (int t = 1; t <= 500; ++t) {
    ema.step(noisy);
    x.push_back(flat(ema.x()));
    // m^t = (1 - gamma) sum_{i=1..t} gamma^{t-i} (x^i - x^{i-1})
    Vector m = Vector::Zero(20);
    for (int i = 1; i <= t; ++i) m += (1 - gamma) * std::pow(gamma, t - i) * (x[i] - x[i - 1]);
    dev = std::max(dev, (ema.m().value(0).reshaped() - m).cwiseAbs().maxCoeff());
  }
  o.require(dev < 1e-10, "EMA closed form deviation=" + num(dev));
  return o;
}

// -------------------------------------------------------------- criterion 9

RunConfig river_config(const std::string& kind) {
  RunConfig c;
  c.problem.kind = kind;
  c.problem.steep = 10;
  c.problem.drift = 1;
  c.problem.init = kind == "river_straight" ? std::vector<double>{-3, 0.5} : std::vector<double>{1.9, -1.0};
  c.lr.kind = "wsd";
  c.lr.peak = 0.09;
  c.wrapper.kind = "ema_nesterov";
  c.wrapper.gamma = 0.995;
  c.wrapper.beta.kind = "three_stage";
  c.wrapper.beta.value = 0.5;
  c.total_T = 1000;
  c.noise_sigma = 0.3;
  c.noise_seed = 11;
  return c;
}

Outcome criterion9() {
  Outcome o;
  const std::vector<double> betas{0.5, 1, 2, 4, 8};
  for (const std::string kind : {"river_straight", "river_ushaped"}) {
    for (const auto& row : probe(river_config(kind), {400, 500, 600}, betas)) {
      if (row.beta != 8.0) continue;
      o.require(row.f_along_delta > row.f_along_m, kind + " t=" + std::to_string(row.t) + " f(x+8dx)=" +
                                                        num(row.f_along_delta) + " f(x+8m)=" + num(row.f_along_m));
    }
  }
  // Decay phase: with a tiny step size the EMA direction still carries
  // momentum from the plateau and moving along it raises the loss.
  RunConfig q;
  q.problem.kind = "quadratic";
  q.problem.dim = 10;
  q.problem.mu = 1;
  q.problem.L = 10;
  q.problem.seed = 3;
  q.problem.init = std::vector<double>(10, 0.0);
  q.lr.kind = "wsd";
  q.lr.peak = 0.05;
  q.wrapper = river_config("river_straight").wrapper;
  q.total_T = 1000;
  q.noise_sigma = 0.5;
  q.noise_seed = 11;
  std::map<std::int64_t, std::pair<double, double>> at;
  for (const auto& row : probe(q, {920, 960, 1000}, {0.0, 8.0}))
    (row.beta == 0.0 ? at[row.t].first : at[row.t].second) = row.f_along_m;
  for (const auto& [t, f] : at)
    o.require(f.second > f.first, "decay t=" + std::to_string(t) + " f(x)=" + num(f.first) + " f(x+8m)=" + num(f.second));
  return o;
}

// ------------------------------------------------------------- criterion 10

Outcome criterion10() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  double lo = 1e300, hi = 0, orth = 0;
  for (int k = 0; k < 100; ++k) {
    const CounterRng rng(2024, static_cast<std::uint64_t>(k));
    const int rows = 2 + static_cast<int>(rng.uniform(0, 0) * 63.0);
    const int cols = 2 + static_cast<int>(rng.uniform(0, 1) * 63.0);
    const double cond = 1.0 + 99.0 * rng.uniform(0, 2);
    const int n = std::min(rows, cols);
    // Gaussian factors orthonormalized by QR, singular values spread
    // uniformly between 1/cond and 1.
    const auto orthonormal = [&](int dim, std::uint64_t stream) {
      Matrix g(dim, n);
      for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal(stream, static_cast<std::uint64_t>(i));
      Eigen::HouseholderQR<Matrix> qr(g);
      return Matrix(qr.householderQ() * Matrix::Identity(dim, n));
    };
    Vector s(n);
    for (int i = 0; i < n; ++i) s(i) = n == 1 ? 1.0 : 1.0 - (1.0 - 1.0 / cond) * i / (n - 1);
    const Matrix x = orthonormal(rows, 1) * s.asDiagonal() * orthonormal(cols, 2).transpose();
    const Matrix y = newton_schulz5(x);
    const Vector sv = Eigen::JacobiSVD<Matrix>(y).singularValues();
    lo = std::min(lo, sv.minCoeff());
    hi = std::max(hi, sv.maxCoeff());
    const Matrix gram = y * y.transpose();
    const Matrix gram_small = rows <= cols ? gram : Matrix(y.transpose() * y);
    orth = std::max(orth, (gram_small - Matrix::Identity(n, n)).norm() / std::sqrt(double(n)));
  }
  o.require(lo >= 0.7 && hi <= 1.3, "singular values in [" + num(lo) + ", " + num(hi) + "] vs [0.7, 1.3]");
  o.require(orth <= 0.5, "max |YY^T - I|_F / sqrt(min dim)=" + num(orth) + " vs 0.5");

  const QuadraticProblem p = make_quadratic(64, 1.0, 10.0, 17).reshaped(8, 8);
  const StochasticOracle noisy(p, 0.1, 3);
  OptimizerConfig muon;
  muon.kind = OptimizerKind::Muon;
  muon.eligibility = MuonEligibility::AllMatrices;
  const double phi = muon.muon_momentum;
  ParamState x = p.zero_point();
  BaseOptimizer opt(muon, x);
  Matrix v = Matrix::Zero(8, 8);
  int blend_mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const Direction g = noisy.sample(x, static_cast<std::uint64_t>(t));
    const Matrix expected = (phi * phi) * v + (1 - phi * phi) * g.value(0);
    x = opt.step(x, g, {0.02, 0.02});
    if (opt.last_orthogonalization_inputs()[0] != expected) ++blend_mismatches;
    v = phi * v + (1 - phi) * g.value(0);
  }
  o.require(blend_mismatches == 0, "NS input blend mismatches=" + std::to_string(blend_mismatches));

  muon.muon_momentum = 0.0;
  BaseOptimizer plain(muon, x);
  int reduction_mismatches = 0;
  for (int t = 0; t < 10; ++t) {
    const Direction g = noisy.sample(x, 100 + static_cast<std::uint64_t>(t));
    const Matrix expected = x.value(0) - 0.02 * newton_schulz5(g.value(0));
    x = plain.step(x, g, {0.02, 0.02});
    if (x.value(0) != expected) ++reduction_mismatches;
  }
  o.require(reduction_mismatches == 0, "phi=0 mismatches=" + std::to_string(reduction_mismatches));
  const double secs = seconds_since(start);
  o.require(secs < 10.0, "time=" + num(secs) + "s");
  return o;
}

// ------------------------------------------------------------- criterion 11

int shell(const std::string& command) {
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string without_created_line(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# created ", 0) != 0) out += line + "\n";
  return out;
}

Outcome criterion11() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("lookahead_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = LOOKAHEAD_CLI;

  RunConfig c = river_config("river_ushaped");
  c.log_every = 7;
  c.log_iterates = true;
  write_file((dir / "run.json").string(), config_to_json(c));
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  const int run_a = shell(cli + " run --config " + (dir / "run.json").string() + " --out " + a);
  const int run_b = shell(cli + " run --config " + (dir / "run.json").string() + " --out " + b);
  const bool identical = run_a == 0 && run_b == 0 && without_created_line(read_file(a)) == without_created_line(read_file(b));
  o.require(identical, "repeated CLI runs identical modulo timestamp");

  const RunRecord in_process = run(c);
  o.require(to_csv(parse_csv(to_csv(in_process))) == to_csv(in_process) && parse_csv(to_csv(in_process)).rows == in_process.rows,
            "CSV round trip exact");
  const std::string exported = (dir / "exported.csv").string();
  const bool export_ok = shell(cli + " export " + a + " --out " + exported + " --format csv") == 0 &&
                         read_file(exported) == read_file(a);
  o.require(export_ok, "CLI export round trip exact");

  for (const Suite s : all_suites()) {
    const int expected = verify(s).passed() ? 0 : 1;
    const int got = shell(cli + " verify --suite " + to_string(s));
    o.require(got == expected, "verify " + to_string(s) + " exit=" + std::to_string(got) + " expected=" +
                                   std::to_string(expected));
  }

  write_file((dir / "bad.json").string(), R"({"problem": {"kind": "quadratic", "dimension": 3}})");
  const int bad = shell(cli + " run --config " + (dir / "bad.json").string());
  o.require(bad == 2, "config error exit=" + std::to_string(bad));
  RunConfig diverging = c;
  diverging.lr.kind = "constant";
  diverging.lr.peak = 5.0;
  diverging.wrapper.beta.kind = "constant";
  write_file((dir / "diverge.json").string(), config_to_json(diverging));
  const int div = shell(cli + " run --config " + (dir / "diverge.json").string() + " --out " + (dir / "d.csv").string());
  o.require(div == 3, "divergence exit=" + std::to_string(div));

  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"strongly convex accelerated rate", criterion1},
      {"strongly convex potential contraction", criterion2},
      {"convex rate with explicit constant", criterion3},
      {"gamma = 0 reduces to classical Nesterov", criterion4},
      {"SNOO original and reduced forms agree", criterion5},
      {"GPA original and reduced forms agree", criterion6},
      {"K-step and pessimistic identities", criterion7},
      {"EMA filter response", criterion8},
      {"river valley lookahead probes", criterion9},
      {"Newton-Schulz and Muon mechanics", criterion10},
      {"determinism and CLI contracts", criterion11},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(static_cast<int>(i));

  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    const auto& [name, check] = criteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::printf("criterion %2d %s  %s  [%s]\n", n, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
