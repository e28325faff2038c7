#include "lookahead/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

namespace lookahead::kernels {

namespace serial {

void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
}

void scale(double a, std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace serial

namespace parallel {

namespace {

std::size_t num_blocks(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

// Block partials are computed independently and then accumulated in block
// order, which fixes the summation tree for a given length.
template <class BlockSum>
double blocked_sum(std::size_t n, BlockSum&& block_sum) {
  const std::size_t blocks = num_blocks(n);
  if (blocks == 0) return 0.0;
  std::vector<double> partial(blocks);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_sum(lo, hi);
  }
  double total = partial[0];
  for (std::size_t b = 1; b < blocks; ++b) total += partial[b];
  return total;
}

}  // namespace

void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void scale(double a, std::span<const double> x, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    return serial::dot(x.subspan(lo, hi - lo), y.subspan(lo, hi - lo));
  });
}

double sum_squares(std::span<const double> x) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    return serial::sum_squares(x.subspan(lo, hi - lo));
  });
}

bool all_finite(std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::ptrdiff_t i = 0; i < n; ++i) ok = ok && std::isfinite(x[i]);
  return ok;
}

}  // namespace parallel

void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out) {
  if (out.size() >= kParallelThreshold)
    parallel::axpby(a, x, b, y, out);
  else
    serial::axpby(a, x, b, y, out);
}

void scale(double a, std::span<const double> x, std::span<double> out) {
  if (out.size() >= kParallelThreshold)
    parallel::scale(a, x, out);
  else
    serial::scale(a, x, out);
}

double dot(std::span<const double> x, std::span<const double> y) { return parallel::dot(x, y); }

double sum_squares(std::span<const double> x) { return parallel::sum_squares(x); }

bool all_finite(std::span<const double> x) {
  return x.size() >= kParallelThreshold ? parallel::all_finite(x) : serial::all_finite(x);
}

}  // namespace lookahead::kernels
