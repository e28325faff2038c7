#pragma once

// Parameter containers shared by every optimizer, wrapper and problem.
//
// A model is an ordered list of named dense matrices (vectors are N x 1).
// Points in parameter space (iterates, lookahead positions, minimizers) are
// ParamState; displacements between them (updates, gradients, EMA buffers)
// are Direction. Both have the same layout, and only the operations that make
// sense between a point and a displacement are offered.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lookahead/errors.hpp"

namespace lookahead {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Layer {
  std::string name;
  Matrix value;
};

struct PointRole {};
struct DisplacementRole {};

template <class Role>
class Layered {
 public:
  Layered() = default;
  explicit Layered(std::vector<Layer> layers) : layers_(std::move(layers)) {}

  static Layered single(std::string name, Matrix value) {
    std::vector<Layer> layers;
    layers.push_back({std::move(name), std::move(value)});
    return Layered(std::move(layers));
  }

  /// Same layout as `like`, all entries zero.
  template <class OtherRole>
  static Layered zeros_like(const Layered<OtherRole>& like) {
    std::vector<Layer> layers;
    layers.reserve(like.num_layers());
    for (const auto& l : like.layers())
      layers.push_back({l.name, Matrix::Zero(l.value.rows(), l.value.cols())});
    return Layered(std::move(layers));
  }

  /// Refill a layout from a flat column-major vector laid out in layer order.
  template <class OtherRole>
  static Layered from_flat(const Layered<OtherRole>& like, std::span<const double> flat) {
    if (flat.size() != like.size())
      throw ConformabilityError("flat vector of length " + std::to_string(flat.size()) +
                                " does not match layout of size " + std::to_string(like.size()));
    Layered out = zeros_like(like);
    std::size_t offset = 0;
    for (auto& l : out.layers_) {
      const auto n = static_cast<std::size_t>(l.value.size());
      std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                flat.begin() + static_cast<std::ptrdiff_t>(offset + n), l.value.data());
      offset += n;
    }
    return out;
  }

  std::size_t num_layers() const noexcept { return layers_.size(); }
  std::span<const Layer> layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }
  const Matrix& value(std::size_t i) const { return layers_.at(i).value; }
  Matrix& value(std::size_t i) { return layers_.at(i).value; }

  /// Total number of scalar entries over all layers.
  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.value.size());
    return n;
  }

  template <class OtherRole>
  bool conformable(const Layered<OtherRole>& other) const noexcept {
    if (num_layers() != other.num_layers()) return false;
    for (std::size_t i = 0; i < num_layers(); ++i) {
      const auto& a = layers_[i];
      const auto& b = other.layer(i);
      if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols())
        return false;
    }
    return true;
  }

  /// Reinterpret the same numbers under another role, e.g. a point as its
  /// displacement from the origin.
  template <class OtherRole>
  Layered<OtherRole> as() const {
    return Layered<OtherRole>(layers_);
  }

  /// Layers concatenated in declaration order, each column-major.
  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(size());
    for (const auto& l : layers_) out.insert(out.end(), l.value.data(), l.value.data() + l.value.size());
    return out;
  }

  bool all_finite() const;

  friend bool operator==(const Layered& a, const Layered& b) {
    if (!a.conformable(b)) return false;
    for (std::size_t i = 0; i < a.num_layers(); ++i)
      if (a.layers_[i].value != b.layers_[i].value) return false;
    return true;
  }

 private:
  std::vector<Layer> layers_;
};

using ParamState = Layered<PointRole>;
using Direction = Layered<DisplacementRole>;

/// y + a*x.
ParamState axpy(double a, const Direction& x, const ParamState& y);
/// a - b.
Direction difference(const ParamState& a, const ParamState& b);
/// c*x.
Direction scale(double c, const Direction& x);
/// a*x + b*y.
Direction combine(double a, const Direction& x, double b, const Direction& y);
double dot(const Direction& x, const Direction& y);
/// Euclidean norm of all entries of all layers, flattened in layer order.
double norm2(const Direction& x);
/// Largest absolute entry-wise difference between two conformable states.
template <class Role>
double max_abs_difference(const Layered<Role>& a, const Layered<Role>& b);

/// Throws DivergenceError carrying `iteration` if any entry is NaN or Inf.
template <class Role>
void require_finite(const Layered<Role>& x, std::int64_t iteration, const std::string& what);

// Small dense helpers with explicit conformability errors.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double frobenius(const Matrix& a);

template <class RoleA, class RoleB>
void require_conformable(const Layered<RoleA>& a, const Layered<RoleB>& b, const char* op) {
  if (!a.conformable(b)) throw ConformabilityError(std::string(op) + ": operands are not conformable");
}

}  // namespace lookahead
