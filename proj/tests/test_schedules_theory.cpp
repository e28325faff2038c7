#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lookahead/schedules.hpp"
#include "lookahead/theory.hpp"

using namespace lookahead;

// ---------------------------------------------------------------- schedules

TEST(LrSchedule, WsdExamples) {
  const auto s = LrSchedule::wsd(1.0, 100);
  EXPECT_DOUBLE_EQ(s.at(4), 0.5);
  EXPECT_DOUBLE_EQ(s.at(0), 0.1);
  EXPECT_EQ(s.at(50), 1.0);
  EXPECT_DOUBLE_EQ(s.at(99), 0.1);
  EXPECT_EQ(s.at(90), 1.0);
  EXPECT_THROW(s.at(100), ParameterError);
  EXPECT_THROW(s.at(-1), ParameterError);
}

TEST(LrSchedule, WsdShape) {
  const auto s = LrSchedule::wsd(0.3, 1000);
  double prev = 0.0, max = 0.0;
  for (std::int64_t t = 0; t < 1000; ++t) {
    const double a = s.at(t);
    EXPECT_GT(a, 0.0);
    EXPECT_LE(a, 0.3);
    if (t < 100) {
      EXPECT_GE(a, prev);
    } else if (t < 900) {
      EXPECT_EQ(a, 0.3);
    } else if (t > 900) {
      EXPECT_LT(a, prev);
    }
    prev = a;
    max = std::max(max, a);
  }
  EXPECT_EQ(max, s.max());
}

TEST(LrSchedule, LinearDecayTail) {
  const auto s = LrSchedule::linear_decay_tail(2.0, 100, 80);
  EXPECT_EQ(s.at(79), 2.0);
  EXPECT_EQ(s.at(80), 2.0);
  EXPECT_DOUBLE_EQ(s.at(90), 1.0);
  EXPECT_DOUBLE_EQ(s.at(99), 2.0 / 20);
  EXPECT_THROW(LrSchedule::linear_decay_tail(1.0, 100, 100), ParameterError);
}

TEST(LrSchedule, Validation) {
  EXPECT_THROW(LrSchedule::constant(0.0, 10), ParameterError);
  EXPECT_THROW(LrSchedule::wsd(1.0, 10, 0.6, 0.6), ParameterError);
  EXPECT_THROW(LrSchedule::wsd(1.0, 10, 0.1, 0.1, 0.0), ParameterError);
}

TEST(BetaSchedule, ThreeStageBoundaries) {
  const auto lr = LrSchedule::wsd(1.0, 100);
  const auto b = BetaSchedule::three_stage(0.7, 30, 80, lr);
  EXPECT_EQ(b.at(30), 0.0);
  EXPECT_EQ(b.at(31), 0.7);
  EXPECT_EQ(b.at(50), 0.7);
  EXPECT_EQ(b.at(80), 0.7);
  EXPECT_EQ(b.at(81), 0.0);
  EXPECT_THROW(b.at(100), ParameterError);
}

TEST(BetaSchedule, ProportionalToLrInsideWindow) {
  const auto lr = LrSchedule::wsd(0.5, 200, 0.3, 0.3);
  const auto b = BetaSchedule::three_stage(0.9, 20, 190, lr);
  for (std::int64_t t = 0; t < 200; ++t) {
    if (t <= 20 || t > 190)
      EXPECT_EQ(b.at(t), 0.0) << t;
    else
      EXPECT_DOUBLE_EQ(b.at(t), 0.9 * lr.at(t) / 0.5) << t;
  }
}

TEST(BetaSchedule, ConstantLrGivesStepFunction) {
  const auto lr = LrSchedule::constant(0.1, 50);
  const auto b = BetaSchedule::three_stage_default(0.4, lr);
  EXPECT_EQ(b.warmup_end, 15);
  EXPECT_EQ(b.rest_start, 40);
  for (std::int64_t t = 0; t < 50; ++t) EXPECT_TRUE(b.at(t) == 0.0 || b.at(t) == 0.4);
}

TEST(BetaSchedule, Validation) {
  const auto lr = LrSchedule::constant(0.1, 50);
  EXPECT_THROW(BetaSchedule::three_stage(0.5, 40, 30, lr), ParameterError);
  EXPECT_THROW(BetaSchedule::three_stage(0.5, 10, 60, lr), ParameterError);
  EXPECT_THROW(BetaSchedule::three_stage(-0.5, 10, 30, lr), ParameterError);
}

// -------------------------------------------------------------- strongly convex step

TEST(StronglyConvexStep, ClassicalMomentumCrossCheck) {
  const double kappa = 4.0;
  EXPECT_NEAR(theorem1_beta(0.0, kappa), (std::sqrt(kappa) - 1) / (std::sqrt(kappa) + 1), 1e-15);
  EXPECT_NEAR(theorem1_beta(0.0, kappa), 1.0 / 3, 1e-15);
}

TEST(StronglyConvexStep, KnownValueAndBoundary) {
  EXPECT_NEAR(theorem1_beta(0.5, 100.0), std::pow(std::sqrt(0.5) - 0.1, 2) / (0.5 * 0.99), 1e-15);
  EXPECT_NEAR(theorem1_beta(0.5, 100.0), 0.7446033, 1e-7);
  EXPECT_LT(theorem1_beta(0.99 - 1e-9, 100.0), 1e-8);
  EXPECT_THROW(theorem1_beta(0.99, 100.0), ParameterError);
  EXPECT_THROW(theorem1_beta(-0.1, 100.0), ParameterError);
}

TEST(StronglyConvexStep, CertificateMatchesDisplayedBeta) {
  for (double kappa : {2.0, 10.0, 100.0, 1e4})
    for (double frac : {0.0, 0.25, 0.5, 0.9, 0.99}) {
      const double gamma = frac * (1 - 1 / kappa);
      const auto c = StrongConvexCertificate::make(gamma, 1.0, kappa);
      EXPECT_NEAR(c.beta, theorem1_beta(gamma, kappa), 1e-12) << gamma << " " << kappa;
      EXPECT_DOUBLE_EQ(c.r, std::sqrt((1 - gamma) / kappa));
      EXPECT_GT(1 - gamma - c.r, 0.0);
    }
}

TEST(StronglyConvexStep, DiscriminantAgreesWithQuadraticForm) {
  // Independent route: 4AB - C^2 from the cross-term coefficients.
  for (double kappa : {4.0, 50.0})
    for (double gamma : {0.0, 0.3, 0.6}) {
      const double mu = 1.0;
      const auto cert = StrongConvexCertificate::make(gamma, mu, kappa);
      const double r = cert.r, c = cert.c, beta = cert.beta, alpha = cert.alpha;
      const double k = c / beta - 1;
      const double A = mu * (1 - r) / 2 * (1 + r * k * k);
      const double B = -r / (2 * mu) + alpha / 2 + r * (1 - r) / (2 * mu);
      const double C = (1 - r) * (1 - r * k);
      EXPECT_NEAR(4 * A * B - C * C, strong_convex_discriminant(gamma, kappa), 1e-12);
      EXPECT_GE(strong_convex_discriminant(gamma, kappa), 0.0);
    }
}

// -------------------------------------------------------------- convex step schedule

TEST(ConvexStepSchedule, Examples) {
  EXPECT_NEAR(theorem2_beta(0.0, 0), 4.0 / 9, 1e-15);
  EXPECT_NEAR(theorem2_beta(0.5, 0), 2.0 / 7, 1e-15);
  EXPECT_NEAR(theorem2_beta(0.0, 1000000), 1.0, 1e-5);
  double prev = 0.0;
  for (std::int64_t t = 0; t < 1000; ++t) {
    const double b = theorem2_beta(0.0, t);
    EXPECT_GT(b, prev);
    EXPECT_LT(b, 1.0);
    prev = b;
  }
  EXPECT_THROW(theorem2_beta(1.0, 0), ParameterError);
}

TEST(ConvexStepSchedule, CertificateInvariants) {
  for (double gamma : {0.0, 0.3, 0.5, 0.9, 0.99}) {
    const ConvexCertificate cert(gamma, 2.0);
    const double a0 = (4 - 3 * gamma) * std::pow(9 - 4 * gamma, 2) / (64 * std::pow(1 - gamma, 2));
    EXPECT_NEAR(cert.a(0), a0, 1e-12 * a0);
    EXPECT_NEAR(cert.a(1), a0, 1e-12 * a0);
    EXPECT_NEAR(cert.a0_closed_form(), cert.a(0), 1e-12 * a0);
    for (std::int64_t t = 0; t < 5000; ++t) {
      EXPECT_GE(cert.a(t + 1), cert.q(t) * cert.q(t) * (1 - 1e-12));
      EXPECT_LE(cert.a(t + 1) - cert.q(t), cert.a(t) * (1 + 1e-12));
      if (t >= 1) {
        EXPECT_GE(cert.a(t), (1 - gamma) * double(t * t) / 16);
      }
      EXPECT_DOUBLE_EQ(cert.beta(t), theorem2_beta(gamma, t));
    }
  }
  EXPECT_DOUBLE_EQ(ConvexCertificate(0.0, 1.0).a(0), 5.0625);
}

TEST(ConvexStepSchedule, GapBoundFormula) {
  const ConvexCertificate cert(0.5, 3.0);
  EXPECT_DOUBLE_EQ(cert.gap_bound(10, 2.0), 97 * 3.0 * 2.0 / (2 * 0.125 * 100));
}

// ---------------------------------------------------------------- lyapunov

TEST(Lyapunov, StronglyConvexAtStartAndOptimum) {
  Vector lambda(2);
  lambda << 1.0, 4.0;
  const auto p = QuadraticProblem::from_spectrum(lambda, Matrix::Identity(2, 2), Vector::Zero(2));
  const auto cert = StrongConvexCertificate::make(0.3, 1.0, 4.0);
  Vector v(2);
  v << 1.0, 0.0;
  const ParamState x = ParamState::single("x", v);
  const Direction m0 = Direction::zeros_like(x);
  // f = 1/2 * 1 * 1, plus mu/2 * |x|^2 = 1/2.
  EXPECT_DOUBLE_EQ(lyapunov_strongly_convex(x, m0, cert, p), 1.0);
  EXPECT_EQ(lyapunov_strongly_convex(p.zero_point(), m0, cert, p), 0.0);
  Vector mv(2);
  mv << 0.0, 0.5;
  const Direction m = Direction::single("x", mv);
  const double vy = cert.c * 0.5;
  EXPECT_DOUBLE_EQ(lyapunov_strongly_convex(x, m, cert, p), 0.5 + 0.5 * (1 + vy * vy));
}

TEST(Lyapunov, ConvexStartBound) {
  const auto p = make_convex_flat(10, 1.0, 4, 3);
  const ConvexCertificate cert(0.5, 1.0);
  const ParamState x0 = p.zero_point();
  const Direction m0 = Direction::zeros_like(x0);
  const double d0 = std::pow(norm2(difference(x0, *p.constants().x_star)), 2);
  EXPECT_LE(lyapunov_convex(x0, m0, 0, cert, p), (cert.a(0) + 1) / 2 * d0);
  EXPECT_EQ(lyapunov_convex(*p.constants().x_star, m0, 7, cert, p), 0.0);
}

TEST(Lyapunov, NeedsKnownOptimum) {
  const RiverValleyProblem river(ValleyShape::Straight, 1.0, 1.0);
  const ParamState x = river.zero_point();
  EXPECT_THROW(lyapunov_convex(x, Direction::zeros_like(x), 0, ConvexCertificate(0.5, 1.0), river), ConfigError);
  EXPECT_THROW(lyapunov_strongly_convex(x, Direction::zeros_like(x), StrongConvexCertificate::make(0.1, 1, 4), river),
               ConfigError);
}

// ----------------------------------------------------------------- filters

TEST(TransferFunction, Examples) {
  for (double gamma : {0.0, 0.3, 0.995}) EXPECT_EQ(ema_transfer_magnitude(gamma, 0.0), 1.0);
  EXPECT_NEAR(ema_transfer_magnitude(0.5, std::numbers::pi), 1.0 / 3, 1e-15);
  for (double w : {0.1, 1.0, 3.0}) EXPECT_EQ(ema_transfer_magnitude(0.0, w), 1.0);
  EXPECT_THROW(ema_transfer_magnitude(1.0, 0.5), ParameterError);
  EXPECT_THROW(ema_transfer_magnitude(0.5, 4.0), ParameterError);
}

TEST(TransferFunction, MatchesComplexEvaluation) {
  for (double gamma : {0.1, 0.9})
    for (double w : {0.01, 0.5, 2.0}) {
      const std::complex<double> z = std::polar(1.0, w);
      const double ref = std::abs((1 - gamma) / (1.0 - gamma / z));
      EXPECT_NEAR(ema_transfer_magnitude(gamma, w), ref, 1e-14);
    }
}

TEST(TransferFunction, StrictlyDecreasing) {
  for (double gamma : {0.1, 0.5, 0.9, 0.99, 0.995}) {
    double prev = 2.0;
    for (int i = 0; i < 1000; ++i) {
      const double h = ema_transfer_magnitude(gamma, std::numbers::pi * i / 999);
      EXPECT_LT(h, prev);
      prev = h;
    }
  }
}

// --------------------------------------------------------------- rate fits

TEST(RateFit, GeometricAndPowerLaw) {
  std::vector<double> geo, power;
  for (int t = 0; t < 400; ++t) geo.push_back(3.0 * std::pow(0.9, t));
  EXPECT_NEAR(fit_geometric_rate(geo), 0.9, 1e-9);
  for (int t = 1; t <= 400; ++t) power.push_back(5.0 / (double(t) * t));
  EXPECT_NEAR(fit_power_law_slope(power), -2.0, 1e-6);
}

TEST(RateFit, RejectsBadInput) {
  std::vector<double> gaps(100, 1.0);
  gaps[90] = 0.0;
  EXPECT_THROW(fit_geometric_rate(gaps), ParameterError);
  EXPECT_THROW(fit_geometric_rate(std::vector<double>(60, 1.0)), ParameterError);
}
