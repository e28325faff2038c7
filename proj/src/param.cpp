#include "lookahead/param.hpp"

#include <algorithm>
#include <cmath>

#include "lookahead/kernels.hpp"

namespace lookahead {

namespace {

std::span<const double> view(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

std::span<double> view(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

// out_l = a*x_l + b*y_l for every layer, keeping the layout of x.
template <class Out, class X, class Y>
Out layerwise_axpby(double a, const X& x, double b, const Y& y) {
  Out out = Out::zeros_like(x);
  for (std::size_t i = 0; i < x.num_layers(); ++i)
    kernels::axpby(a, view(x.value(i)), b, view(y.value(i)), view(out.value(i)));
  return out;
}

}  // namespace

template <class Role>
bool Layered<Role>::all_finite() const {
  for (const auto& l : layers_)
    if (!kernels::all_finite(view(l.value))) return false;
  return true;
}

template bool Layered<PointRole>::all_finite() const;
template bool Layered<DisplacementRole>::all_finite() const;

ParamState axpy(double a, const Direction& x, const ParamState& y) {
  require_conformable(x, y, "axpy");
  return layerwise_axpby<ParamState>(1.0, y, a, x);
}

Direction difference(const ParamState& a, const ParamState& b) {
  require_conformable(a, b, "difference");
  return layerwise_axpby<Direction>(1.0, a, -1.0, b);
}

Direction scale(double c, const Direction& x) {
  Direction out = Direction::zeros_like(x);
  for (std::size_t i = 0; i < x.num_layers(); ++i) kernels::scale(c, view(x.value(i)), view(out.value(i)));
  return out;
}

Direction combine(double a, const Direction& x, double b, const Direction& y) {
  require_conformable(x, y, "combine");
  return layerwise_axpby<Direction>(a, x, b, y);
}

double dot(const Direction& x, const Direction& y) {
  require_conformable(x, y, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.num_layers(); ++i) s += kernels::dot(view(x.value(i)), view(y.value(i)));
  return s;
}

double norm2(const Direction& x) {
  double s = 0.0;
  for (const auto& l : x.layers()) s += kernels::sum_squares(view(l.value));
  return std::sqrt(s);
}

template <class Role>
double max_abs_difference(const Layered<Role>& a, const Layered<Role>& b) {
  require_conformable(a, b, "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.num_layers(); ++i)
    m = std::max(m, (a.value(i) - b.value(i)).cwiseAbs().maxCoeff());
  return m;
}

template double max_abs_difference(const ParamState&, const ParamState&);
template double max_abs_difference(const Direction&, const Direction&);

template <class Role>
void require_finite(const Layered<Role>& x, std::int64_t iteration, const std::string& what) {
  if (!x.all_finite()) throw DivergenceError(iteration, what + " contains non-finite entries");
}

template void require_finite(const ParamState&, std::int64_t, const std::string&);
template void require_finite(const Direction&, std::int64_t, const std::string&);

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ConformabilityError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                              " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  return a * b;
}

Matrix transpose(const Matrix& a) { return a.transpose(); }

double frobenius(const Matrix& a) { return a.norm(); }

}  // namespace lookahead
