#pragma once

// Data-parallel inner loops. Each OpenMP kernel in `ellreg::kernels` has a
// plain loop twin in `ellreg::serial` that the tests hold it against.
//
// Reductions are accumulated over fixed-size blocks and the block partials are
// summed in order, so results do not depend on the number of threads.

#include <cstddef>
#include <span>

#include "ellreg/grid.hpp"

namespace ellreg::kernels {

inline constexpr std::size_t kReductionBlock = 4096;

/// Euclidean modulus of each point's channel vector.
void modulus(std::span<const cplx> data, int channels, std::span<double> out);
/// sum_i v_i^p (finite p).
double power_sum(std::span<const double> v, double p);
double max_value(std::span<const double> v);
/// coeffs[mode*channels + c] *= symbol[mode]
void multiply_symbol(std::span<cplx> coeffs, int channels, std::span<const cplx> symbol);
/// y += a * x
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);

} // namespace ellreg::kernels

namespace ellreg::serial {

void modulus(std::span<const cplx> data, int channels, std::span<double> out);
double power_sum(std::span<const double> v, double p);
double max_value(std::span<const double> v);
void multiply_symbol(std::span<cplx> coeffs, int channels, std::span<const cplx> symbol);
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);

} // namespace ellreg::serial
