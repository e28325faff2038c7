#include "lookahead/problems.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lookahead {

double ProblemConstants::kappa() const {
  return mu > 0.0 ? L / mu : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- quadratic

Matrix random_rotation(int dim, std::uint64_t seed) {
  const CounterRng rng(seed, 1);
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      g(i, j) = rng.normal(static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

QuadraticProblem QuadraticProblem::from_spectrum(const Vector& eigenvalues, const Matrix& eigenvectors,
                                                 const Vector& center) {
  const auto n = eigenvalues.size();
  if (n < 1 || eigenvectors.rows() != n || eigenvectors.cols() != n || center.size() != n)
    throw ConformabilityError("from_spectrum: spectrum, eigenvectors and center disagree in size");
  if ((eigenvalues.array() < 0.0).any()) throw ParameterError("from_spectrum: negative eigenvalue");

  QuadraticProblem p;
  p.eigenvalues_ = eigenvalues;
  p.eigenvectors_ = eigenvectors;
  p.hessian_ = eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  p.hessian_ = 0.5 * (p.hessian_ + p.hessian_.transpose()).eval();

  Vector coords = eigenvectors.transpose() * center;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eigenvalues(i) == 0.0) coords(i) = 0.0;
  p.minimizer_ = eigenvectors * coords;

  p.rows_ = n;
  p.cols_ = 1;
  p.constants_.L = eigenvalues.maxCoeff();
  p.constants_.mu = eigenvalues.minCoeff();
  p.constants_.f_star = 0.0;
  p.constants_.x_star = p.unflat(p.minimizer_);
  return p;
}

Vector QuadraticProblem::flat(const ParamState& x) const {
  if (x.num_layers() != 1 || x.value(0).rows() != rows_ || x.value(0).cols() != cols_)
    throw ConformabilityError("quadratic: point does not match the problem layout");
  return Eigen::Map<const Vector>(x.value(0).data(), rows_ * cols_);
}

ParamState QuadraticProblem::unflat(const Vector& v) const {
  return ParamState::single("x", Eigen::Map<const Matrix>(v.data(), rows_, cols_));
}

double QuadraticProblem::value(const ParamState& x) const {
  // Evaluated in the eigenbasis so the result is never negative.
  const Vector coords = eigenvectors_.transpose() * (flat(x) - minimizer_);
  return 0.5 * (eigenvalues_.array() * coords.array().square()).sum();
}

Direction QuadraticProblem::gradient(const ParamState& x) const {
  const Vector g = hessian_ * (flat(x) - minimizer_);
  return unflat(g).as<DisplacementRole>();
}

ParamState QuadraticProblem::zero_point() const { return ParamState::single("x", Matrix::Zero(rows_, cols_)); }

QuadraticProblem QuadraticProblem::reshaped(Eigen::Index rows, Eigen::Index cols) const {
  if (rows < 1 || cols < 1 || rows * cols != minimizer_.size())
    throw ParameterError("reshape " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " does not hold " + std::to_string(minimizer_.size()) + " entries");
  QuadraticProblem p = *this;
  p.rows_ = rows;
  p.cols_ = cols;
  p.constants_.x_star = p.unflat(p.minimizer_);
  return p;
}

QuadraticProblem QuadraticProblem::recentered(const Vector& center) const {
  QuadraticProblem p = from_spectrum(eigenvalues_, eigenvectors_, center);
  return p.reshaped(rows_, cols_);
}

QuadraticProblem make_quadratic(int dim, double mu, double L, std::uint64_t seed) {
  if (dim < 2) throw ParameterError("make_quadratic: dim must be at least 2");
  if (!(mu > 0.0) || !(L >= mu) || !std::isfinite(L))
    throw ParameterError("make_quadratic: need L >= mu > 0");
  Vector lambda(dim);
  const double log_ratio = std::log(L / mu);
  for (int i = 0; i < dim; ++i) lambda(i) = mu * std::exp(log_ratio * i / (dim - 1));
  lambda(0) = mu;
  lambda(dim - 1) = L;

  const CounterRng rng(seed, 2);
  Vector center(dim);
  for (int i = 0; i < dim; ++i) center(i) = 2.0 * rng.uniform(0, static_cast<std::uint64_t>(i)) - 1.0;
  return QuadraticProblem::from_spectrum(lambda, random_rotation(dim, seed), center);
}

QuadraticProblem make_convex_flat(int dim, double L, int rank, std::uint64_t seed, double min_ratio) {
  if (rank < 1 || rank >= dim) throw ParameterError("make_convex_flat: need 1 <= rank < dim");
  if (!(L > 0.0)) throw ParameterError("make_convex_flat: L must be positive");
  if (!(min_ratio > 0.0 && min_ratio <= 1.0)) throw ParameterError("make_convex_flat: min_ratio in (0, 1]");
  Vector lambda = Vector::Zero(dim);
  for (int i = 0; i < rank; ++i)
    lambda(i) = rank == 1 ? L : L * std::pow(min_ratio, 1.0 - static_cast<double>(i) / (rank - 1));
  lambda(rank - 1) = L;

  const CounterRng rng(seed, 2);
  Vector center(dim);
  for (int i = 0; i < dim; ++i) center(i) = 2.0 * rng.uniform(0, static_cast<std::uint64_t>(i)) - 1.0;
  return QuadraticProblem::from_spectrum(lambda, random_rotation(dim, seed), center);
}

// ------------------------------------------------------------- river valley

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Polar {
  double dx, dy, r, theta;
  bool clamped;
};

Polar polar(double x1, double x2) {
  const double dx = x1;
  const double dy = x2 + RiverValleyProblem::kRadius;
  double theta = std::atan2(dy, dx);
  if (theta < -0.5 * std::numbers::pi) theta += 2.0 * std::numbers::pi;
  bool clamped = false;
  if (theta < 0.0) {
    theta = 0.0;
    clamped = true;
  } else if (theta > std::numbers::pi) {
    theta = std::numbers::pi;
    clamped = true;
  }
  return {dx, dy, std::hypot(dx, dy), theta, clamped};
}

void require_2d(const ParamState& x) {
  if (x.num_layers() != 1 || x.value(0).rows() != 2 || x.value(0).cols() != 1)
    throw ConformabilityError("river valley: expected a single 2x1 layer");
}

}  // namespace

RiverValleyProblem::RiverValleyProblem(ValleyShape shape, double steep, double drift)
    : shape_(shape), steep_(steep), drift_(drift) {
  if (!(steep > 0.0) || !(drift > 0.0)) throw ParameterError("river valley: steep and drift must be positive");
  constants_.mu = 0.0;
  if (shape == ValleyShape::Straight) {
    // Hessian is diag(drift * s(1 - s), 2 steep) with s(1 - s) <= 1/4.
    constants_.L = std::max(2.0 * steep, 0.25 * drift);
  } else {
    // Bound over the valley region r >= R/2: radial and tangential curvature
    // of the valley term are at most 2 steep, the angular term contributes
    // drift / r^2 <= 4 drift / R^2.
    constants_.L = 2.0 * steep + 4.0 * drift / (kRadius * kRadius);
  }
}

std::string RiverValleyProblem::name() const {
  return shape_ == ValleyShape::Straight ? "river_straight" : "river_ushaped";
}

ParamState RiverValleyProblem::point(double x1, double x2) {
  Matrix m(2, 1);
  m << x1, x2;
  return ParamState::single("x", std::move(m));
}

ParamState RiverValleyProblem::zero_point() const { return point(0.0, 0.0); }

double RiverValleyProblem::value(const ParamState& x) const {
  require_2d(x);
  const double x1 = x.value(0)(0), x2 = x.value(0)(1);
  if (shape_ == ValleyShape::Straight) return steep_ * x2 * x2 + drift_ * softplus(-x1);
  const Polar p = polar(x1, x2);
  return steep_ * (p.r - kRadius) * (p.r - kRadius) + drift_ * (std::numbers::pi - p.theta);
}

Direction RiverValleyProblem::gradient(const ParamState& x) const {
  require_2d(x);
  const double x1 = x.value(0)(0), x2 = x.value(0)(1);
  Matrix g(2, 1);
  if (shape_ == ValleyShape::Straight) {
    g << -drift_ * sigmoid(-x1), 2.0 * steep_ * x2;
  } else {
    const Polar p = polar(x1, x2);
    double g1 = 0.0, g2 = 0.0;
    if (p.r > 0.0) {
      const double radial = 2.0 * steep_ * (p.r - kRadius) / p.r;
      g1 = radial * p.dx;
      g2 = radial * p.dy;
      if (!p.clamped) {
        const double r2 = p.r * p.r;
        // d theta = (-dy, dx) / r^2, and f carries -drift * theta.
        g1 += drift_ * p.dy / r2;
        g2 -= drift_ * p.dx / r2;
      }
    }
    g << g1, g2;
  }
  return Direction::single("x", std::move(g));
}

double RiverValleyProblem::distance_from_floor(const ParamState& x) const {
  require_2d(x);
  const double x1 = x.value(0)(0), x2 = x.value(0)(1);
  if (shape_ == ValleyShape::Straight) return std::abs(x2);
  return std::abs(polar(x1, x2).r - kRadius);
}

double RiverValleyProblem::angle(const ParamState& x) const {
  require_2d(x);
  return polar(x.value(0)(0), x.value(0)(1)).theta;
}

RiverValleyProblem make_river_valley(ValleyShape shape, double steep, double drift) {
  return RiverValleyProblem(shape, steep, drift);
}

// ------------------------------------------------------------------- oracles

StochasticOracle::StochasticOracle(const Problem& base, double noise_sigma, std::uint64_t seed,
                                   std::uint64_t stream)
    : base_(&base), sigma_(noise_sigma), seed_(seed), rng_(seed, stream) {
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be nonnegative");
}

Direction StochasticOracle::sample(const ParamState& x, std::uint64_t call_index) const {
  Direction g = base_->gradient(x);
  if (sigma_ == 0.0) return g;
  std::uint64_t k = 0;
  for (std::size_t l = 0; l < g.num_layers(); ++l) {
    Matrix& v = g.value(l);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] += sigma_ * rng_.normal(call_index, k++);
  }
  return g;
}

Direction sample_gradient(const StochasticOracle& oracle, const ParamState& x, std::uint64_t call_index) {
  return oracle.sample(x, call_index);
}

}  // namespace lookahead
