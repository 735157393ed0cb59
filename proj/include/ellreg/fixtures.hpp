#pragma once

#include "ellreg/grid.hpp"
#include "ellreg/rng.hpp"

namespace ellreg {

/// C-infinity step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);

/// 1 on |s| <= inner, 0 on |s| >= outer, smooth in between.
double plateau(double s, double inner, double outer);

/// Analytic plateau 0.5*(erf((s + radius)/softness) - erf((s - radius)/softness)).
/// Not compactly supported, but below round-off a few softness units away
/// from the radius and spectrally resolved, so it serves as a window for
/// fixtures that get differentiated on the grid.
double soft_plateau(double s, double radius, double softness);
Field soft_window(const GridSpec& grid, double radius, double softness);

/// Radial plateau in |x| sampled on the grid as a scalar field.
Field radial_window(const GridSpec& grid, double inner, double outer);

/// Random smooth field made of lattice modes with every |k_j| <= kmax. The
/// draws depend only on (rng, channels, kmax, dim), so the same continuum
/// function is produced on every grid fine enough to hold those modes.
Field random_low_modes(const GridSpec& grid, int channels, int kmax, Rng& rng);

} // namespace ellreg
