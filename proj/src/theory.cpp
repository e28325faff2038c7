#include "lookahead/theory.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace lookahead {

StrongConvexCertificate StrongConvexCertificate::make(double gamma, double mu, double L) {
  if (!(mu > 0.0) || !(L > mu)) throw ParameterError("strongly convex certificate needs L > mu > 0");
  if (!(gamma >= 0.0 && gamma < 1.0 - mu / L))
    throw ParameterError("gamma = " + std::to_string(gamma) + " outside [0, 1 - 1/kappa)");
  StrongConvexCertificate cert;
  cert.gamma = gamma;
  cert.mu = mu;
  cert.L = L;
  cert.alpha = 1.0 / L;
  const double keep = 1.0 - gamma;
  cert.r = std::sqrt(cert.alpha * mu * keep);
  cert.c = (keep - cert.r) / (keep * cert.r);
  cert.beta = (keep - cert.r) * (keep - cert.r) / (keep * (keep - cert.r * cert.r));
  return cert;
}

ConvexCertificate::ConvexCertificate(double gamma, double L) : gamma_(gamma), L_(L) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
  if (!(L > 0.0)) throw ParameterError("L must be positive");
}

double ConvexCertificate::c(std::int64_t t) const {
  return 1.0 + gamma_ / (4.0 * (1.0 - gamma_)) + static_cast<double>(t) / 4.0;
}

double ConvexCertificate::q(std::int64_t t) const { return 1.0 + (1.0 - gamma_) * c(t + 1); }

double ConvexCertificate::a(std::int64_t t) const {
  if (t < 0) throw ParameterError("negative step");
  if (t == 0) t = 1;
  const double ct = c(t - 1);
  const double qt = q(t - 1);
  return ct * qt * qt / (ct - gamma_ * c(t));
}

double ConvexCertificate::beta(std::int64_t t) const {
  if (t < 0) throw ParameterError("negative step");
  return (c(t) - gamma_ * c(t + 1)) / q(t);
}

double ConvexCertificate::a0_closed_form() const {
  const double g = gamma_;
  return (4.0 - 3.0 * g) * (9.0 - 4.0 * g) * (9.0 - 4.0 * g) / (64.0 * (1.0 - g) * (1.0 - g));
}

double ConvexCertificate::gap_bound(std::int64_t t, double initial_distance_sq) const {
  const double keep = 1.0 - gamma_;
  const double tt = static_cast<double>(t);
  return 97.0 * L_ * initial_distance_sq / (2.0 * keep * keep * keep * tt * tt);
}

double theorem1_beta(double gamma, double kappa) {
  if (!(kappa > 1.0)) throw ParameterError("kappa must exceed 1");
  if (!(gamma >= 0.0 && gamma < 1.0 - 1.0 / kappa))
    throw ParameterError("gamma = " + std::to_string(gamma) + " outside [0, 1 - 1/kappa)");
  const double gap = std::sqrt(1.0 - gamma) - std::sqrt(1.0 / kappa);
  return gap * gap / ((1.0 - gamma) * (1.0 - 1.0 / kappa));
}

double theorem2_beta(double gamma, std::int64_t t) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
  return ConvexCertificate(gamma, 1.0).beta(t);
}

namespace {

void require_optimum(const Problem& problem, const char* what) {
  const auto& k = problem.constants();
  if (!k.x_star || !k.f_star)
    throw ConfigError(std::string(what) + " needs a problem with known x* and f*");
}

}  // namespace

double lyapunov_strongly_convex(const ParamState& x, const Direction& m, const StrongConvexCertificate& cert,
                                const Problem& problem) {
  require_optimum(problem, "strongly convex Lyapunov function");
  if (!(problem.constants().mu > 0.0)) throw ConfigError("strongly convex Lyapunov function needs mu > 0");
  const auto& k = problem.constants();
  const ParamState v = axpy(cert.c, m, x);
  const double dist = norm2(difference(v, *k.x_star));
  return problem.value(x) - *k.f_star + 0.5 * cert.mu * dist * dist;
}

double lyapunov_convex(const ParamState& x, const Direction& m, std::int64_t t, const ConvexCertificate& cert,
                       const Problem& problem) {
  require_optimum(problem, "convex Lyapunov function");
  const auto& k = problem.constants();
  const ParamState v = axpy(cert.c(t), m, x);
  const double dist = norm2(difference(v, *k.x_star));
  return cert.a(t) / cert.L() * (problem.value(x) - *k.f_star) + 0.5 * dist * dist;
}

double ema_transfer_magnitude(double gamma, double omega) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
  if (!(omega >= 0.0 && omega <= std::numbers::pi)) throw ParameterError("omega must lie in [0, pi]");
  // 1 - 2 gamma cos(w) + gamma^2 written as (1 - gamma)^2 + 4 gamma sin^2(w/2),
  // which is exact at w = 0 and avoids cancellation for gamma near 1.
  const double keep = 1.0 - gamma;
  const double half = std::sin(0.5 * omega);
  return keep / std::sqrt(keep * keep + 4.0 * gamma * half * half);
}

double strong_convex_discriminant(double gamma, double kappa) {
  if (!(kappa > 1.0)) throw ParameterError("kappa must exceed 1");
  const double keep = 1.0 - gamma;
  const double r = std::sqrt(keep / kappa);
  return r * gamma * (1.0 - r) * (keep - r * r) / ((keep - r) * keep);
}

namespace {

struct Line {
  double slope;
  double intercept;
};

Line least_squares(const std::vector<double>& u, const std::vector<double>& v) {
  const auto n = static_cast<double>(u.size());
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  const double slope = suv / suu;
  return {slope, mv - slope * mu};
}

std::size_t tail_start(std::size_t n, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ParameterError("tail_fraction must lie in (0, 1]");
  const auto len = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (len < 50) throw ParameterError("rate fit needs at least 50 tail points, got " + std::to_string(len));
  return n - len;
}

}  // namespace

double fit_geometric_rate(std::span<const double> gaps, double tail_fraction) {
  const std::size_t start = tail_start(gaps.size(), tail_fraction);
  std::vector<double> t, y;
  for (std::size_t i = start; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0)) throw ParameterError("rate fit undefined: nonpositive gap at t = " + std::to_string(i));
    t.push_back(static_cast<double>(i));
    y.push_back(std::log(gaps[i]));
  }
  return std::exp(least_squares(t, y).slope);
}

double fit_power_law_slope(std::span<const double> gaps, double tail_fraction, std::int64_t first_t) {
  if (first_t < 1) throw ParameterError("power-law fit needs t >= 1");
  const std::size_t start = tail_start(gaps.size(), tail_fraction);
  std::vector<double> lt, y;
  for (std::size_t i = start; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0)) throw ParameterError("rate fit undefined: nonpositive gap");
    lt.push_back(std::log(static_cast<double>(first_t) + static_cast<double>(i)));
    y.push_back(std::log(gaps[i]));
  }
  return least_squares(lt, y).slope;
}

}  // namespace lookahead
