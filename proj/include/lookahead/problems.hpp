#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lookahead/param.hpp"
#include "lookahead/rng.hpp"

namespace lookahead {

/// Smoothness and convexity constants plus the optimum when it is known.
struct ProblemConstants {
  double L = 1.0;
  double mu = 0.0;
  std::optional<double> f_star;
  std::optional<ParamState> x_star;

  /// L / mu; infinite for mu = 0.
  double kappa() const;
};

/// A differentiable objective with an exact gradient.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual double value(const ParamState& x) const = 0;
  virtual Direction gradient(const ParamState& x) const = 0;
  /// The parameter layout, all entries zero.
  virtual ParamState zero_point() const = 0;

  const ProblemConstants& constants() const noexcept { return constants_; }
  std::size_t dim() const { return zero_point().size(); }

 protected:
  ProblemConstants constants_;
};

/// f(x) = 1/2 (x - x*)^T H (x - x*), with H = Q diag(lambda) Q^T.
///
/// The parameter is stored as a single layer, by default dim x 1; reshaped()
/// gives the same objective over a rows x cols matrix (column-major flatten).
class QuadraticProblem final : public Problem {
 public:
  /// Builds H from an explicit spectrum and orthogonal eigenvector matrix.
  /// x_star is the projection of `center` onto the range of H, i.e. the
  /// minimum-norm minimizer.
  static QuadraticProblem from_spectrum(const Vector& eigenvalues, const Matrix& eigenvectors,
                                        const Vector& center);

  std::string name() const override { return "quadratic"; }
  double value(const ParamState& x) const override;
  Direction gradient(const ParamState& x) const override;
  ParamState zero_point() const override;

  QuadraticProblem reshaped(Eigen::Index rows, Eigen::Index cols) const;
  /// Same Hessian, minimizer moved to the projection of `center` onto the
  /// range of H. Translating to the origin keeps iterates at full relative
  /// precision as they converge.
  QuadraticProblem recentered(const Vector& center) const;

  const Matrix& hessian() const noexcept { return hessian_; }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  const Vector& minimizer() const noexcept { return minimizer_; }

 private:
  QuadraticProblem() = default;

  Vector flat(const ParamState& x) const;
  ParamState unflat(const Vector& v) const;

  Matrix hessian_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  Vector minimizer_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 1;
};

/// Strongly convex quadratic: eigenvalues log-uniform on [mu, L] with both
/// endpoints attained, seeded random rotation, x* uniform in [-1, 1]^dim.
QuadraticProblem make_quadratic(int dim, double mu, double L, std::uint64_t seed);

/// Convex quadratic with a `rank`-dimensional range and a flat null space.
/// The positive eigenvalues are log-uniform on [min_ratio * L, L].
QuadraticProblem make_convex_flat(int dim, double L, int rank, std::uint64_t seed,
                                  double min_ratio = 1e-3);

/// Seeded random orthogonal matrix (Haar distributed).
Matrix random_rotation(int dim, std::uint64_t seed);

enum class ValleyShape { Straight, UShaped };

/// Two-dimensional narrow valley with a slow drift along its floor.
///
///   Straight: f = steep * x2^2 + drift * log(1 + exp(-x1))
///   UShaped:  f = steep * (r - R)^2 + drift * (pi - theta),
///
/// with (r, theta) polar coordinates about (0, -R), R = 2, theta measured from
/// the +x1 axis with its branch cut pointing straight down and clamped to
/// [0, pi]. The U-shaped floor runs from (R, -R) over (0, 0) to (-R, -R).
class RiverValleyProblem final : public Problem {
 public:
  static constexpr double kRadius = 2.0;

  RiverValleyProblem(ValleyShape shape, double steep, double drift);

  std::string name() const override;
  double value(const ParamState& x) const override;
  Direction gradient(const ParamState& x) const override;
  ParamState zero_point() const override;

  ValleyShape shape() const noexcept { return shape_; }
  double steep() const noexcept { return steep_; }
  double drift() const noexcept { return drift_; }

  /// Distance from the valley floor, |x2| or |r - R|.
  double distance_from_floor(const ParamState& x) const;
  /// Clamped polar angle about (0, -R); only meaningful for UShaped.
  double angle(const ParamState& x) const;

  static ParamState point(double x1, double x2);

 private:
  ValleyShape shape_;
  double steep_;
  double drift_;
};

RiverValleyProblem make_river_valley(ValleyShape shape, double steep, double drift);

/// Source of gradients for the optimizers. `call_index` identifies the draw so
/// stochastic oracles are reproducible.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;
  virtual Direction sample(const ParamState& x, std::uint64_t call_index) const = 0;
};

class ExactOracle final : public GradientOracle {
 public:
  explicit ExactOracle(const Problem& problem) : problem_(&problem) {}
  Direction sample(const ParamState& x, std::uint64_t) const override { return problem_->gradient(x); }

 private:
  const Problem* problem_;
};

/// Exact gradient plus iid N(0, sigma^2) noise per entry, keyed on
/// (seed, stream, call_index).
class StochasticOracle final : public GradientOracle {
 public:
  StochasticOracle(const Problem& base, double noise_sigma, std::uint64_t seed, std::uint64_t stream = 0);

  Direction sample(const ParamState& x, std::uint64_t call_index) const override;

  const Problem& base() const noexcept { return *base_; }
  double noise_sigma() const noexcept { return sigma_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  const Problem* base_;
  double sigma_;
  std::uint64_t seed_;
  CounterRng rng_;
};

Direction sample_gradient(const StochasticOracle& oracle, const ParamState& x, std::uint64_t call_index);

}  // namespace lookahead
