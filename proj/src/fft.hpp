#pragma once

#include <span>

#include "ellreg/grid.hpp"

namespace ellreg::detail {

/// Unnormalized in-place multi-dimensional DFT over every channel of an
/// interleaved (point, channel) buffer. sign = -1 forward, +1 backward.
void fft_inplace(const GridSpec& grid, int channels, std::span<cplx> data, int sign);

} // namespace ellreg::detail
