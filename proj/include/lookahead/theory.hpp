#pragma once

// Step-size formulas, Lyapunov potentials and rate measurement for
// EMA-Nesterov on top of gradient descent with step 1/L.

#include <cstdint>
#include <span>

#include "lookahead/param.hpp"
#include "lookahead/problems.hpp"

namespace lookahead {

/// Constants of the linear-rate argument for mu > 0.
///
/// With alpha = 1/L, r = sqrt(alpha mu (1 - gamma)) is the per-step
/// contraction of E_t = f(x) - f* + mu/2 |x + c m - x*|^2, and beta is the
/// constant lookahead step that makes it contract.
struct StrongConvexCertificate {
  double gamma = 0.0;
  double mu = 0.0;
  double L = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double c = 0.0;
  double beta = 0.0;

  /// Throws ParameterError outside gamma in [0, 1 - mu/L).
  static StrongConvexCertificate make(double gamma, double mu, double L);
};

/// Time-varying constants of the O(1/t^2) argument for mu = 0.
///
///   c_t = 1 + gamma / (4 (1 - gamma)) + t / 4
///   q_t = 1 + (1 - gamma) c_{t+1}
///   a_{t+1} = c_t q_t^2 / (c_t - gamma c_{t+1}),  a_0 = a_1
///   beta_t = (c_t - gamma c_{t+1}) / q_t
class ConvexCertificate {
 public:
  ConvexCertificate(double gamma, double L);

  double gamma() const noexcept { return gamma_; }
  double L() const noexcept { return L_; }

  double c(std::int64_t t) const;
  double q(std::int64_t t) const;
  double a(std::int64_t t) const;
  double beta(std::int64_t t) const;
  /// (4 - 3 gamma)(9 - 4 gamma)^2 / (64 (1 - gamma)^2)
  double a0_closed_form() const;
  /// 97 L |x0 - x*|^2 / (2 (1 - gamma)^3 t^2)
  double gap_bound(std::int64_t t, double initial_distance_sq) const;

 private:
  double gamma_;
  double L_;
};

/// Constant beta for the strongly convex case:
/// (sqrt(1 - gamma) - sqrt(1/kappa))^2 / ((1 - gamma)(1 - 1/kappa)).
double theorem1_beta(double gamma, double kappa);

/// beta_t of the convex (mu = 0) schedule.
double theorem2_beta(double gamma, std::int64_t t);

double lyapunov_strongly_convex(const ParamState& x, const Direction& m, const StrongConvexCertificate& cert,
                                const Problem& problem);

double lyapunov_convex(const ParamState& x, const Direction& m, std::int64_t t, const ConvexCertificate& cert,
                       const Problem& problem);

/// |H(e^{i omega})| for the EMA filter H(z) = (1 - gamma) / (1 - gamma z^{-1}).
double ema_transfer_magnitude(double gamma, double omega);

/// The discriminant r gamma (1 - r)(1 - gamma - r^2) / ((1 - gamma - r)(1 - gamma))
/// whose sign decides the last step of the strongly convex argument.
double strong_convex_discriminant(double gamma, double kappa);

/// Per-step factor exp(slope) of a least-squares fit of log(gap) against t
/// over the final `tail_fraction` of the sequence (t = index).
double fit_geometric_rate(std::span<const double> gaps, double tail_fraction = 0.4);

/// Slope of log(gap) against log(t) over the final `tail_fraction`, where
/// gaps[i] belongs to t = first_t + i.
double fit_power_law_slope(std::span<const double> gaps, double tail_fraction = 0.4, std::int64_t first_t = 1);

}  // namespace lookahead
