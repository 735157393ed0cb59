#include "ellreg/fixtures.hpp"

#include <cmath>

#include "ellreg/error.hpp"

namespace ellreg {

double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

double plateau(double s, double inner, double outer) {
    return 1.0 - smooth_step((std::abs(s) - inner) / (outer - inner));
}

double soft_plateau(double s, double radius, double softness) {
    return 0.5 * (std::erf((s + radius) / softness) - std::erf((s - radius) / softness));
}

Field soft_window(const GridSpec& grid, double radius, double softness) {
    return Field::sample(grid, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return cplx(soft_plateau(std::sqrt(r2), radius, softness));
    });
}

Field radial_window(const GridSpec& grid, double inner, double outer) {
    return Field::sample(grid, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return cplx(plateau(std::sqrt(r2), inner, outer));
    });
}

Field random_low_modes(const GridSpec& grid, int channels, int kmax, Rng& rng) {
    if (2 * kmax >= grid.points) throw InvalidArgument("random_low_modes: kmax does not fit on the grid");
    SpectralField F(grid, channels);
    const int side = 2 * kmax + 1;
    std::size_t count = 1;
    for (int a = 0; a < grid.dim; ++a) count *= static_cast<std::size_t>(side);
    std::vector<int> k(grid.dim), pos(grid.dim);
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t rest = c;
        double k2 = 0.0;
        for (int a = grid.dim - 1; a >= 0; --a) {
            k[a] = static_cast<int>(rest % side) - kmax;
            rest /= side;
            k2 += double(k[a]) * k[a];
        }
        for (int ch = 0; ch < channels; ++ch) {
            const cplx z = rng.complex_normal() / (1.0 + k2);
            for (int a = 0; a < grid.dim; ++a) pos[a] = grid.fft_position(k[a]);
            F.at(grid.flatten(pos), ch) = z;
        }
    }
    return idft(F);
}

} // namespace ellreg
