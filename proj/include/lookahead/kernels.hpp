#pragma once

// Flat dense kernels behind every ParamState/Direction operation.
//
// Each kernel exists twice: a plain sequential loop in `serial` that serves as
// the reference implementation in tests, and an OpenMP version in `parallel`.
// Element-wise kernels produce bit-identical results in both. Reductions in
// `parallel` sum fixed-size blocks and then add the block partials in order,
// so the result depends only on the input length, never on the thread count.
// For inputs no longer than one block they match `serial` bit-for-bit.

#include <cstddef>
#include <span>

namespace lookahead::kernels {

inline constexpr std::size_t kReductionBlock = 4096;
inline constexpr std::size_t kParallelThreshold = 1u << 15;

namespace serial {

/// out = a*x + b*y
void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out);
void scale(double a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
bool all_finite(std::span<const double> x);

}  // namespace serial

namespace parallel {

void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out);
void scale(double a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
bool all_finite(std::span<const double> x);

}  // namespace parallel

// Dispatching entry points used by the library: the OpenMP path above
// kParallelThreshold entries, the serial loop below it. Reductions always take
// the blocked path so results never depend on which side of the threshold a
// call falls.
void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out);
void scale(double a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
bool all_finite(std::span<const double> x);

}  // namespace lookahead::kernels
