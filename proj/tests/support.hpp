#pragma once

// Independent reference computations used to pin down library results.

#include <cmath>
#include <vector>

#include "ellreg/grid.hpp"

namespace oracle {

using ellreg::cplx;
using ellreg::GridSpec;

/// Fourier coefficients by direct summation of (2L)^{-m} h^m sum f(x) e^{-i xi.x}.
inline std::vector<cplx> naive_dft(const ellreg::Field& f, int channel = 0) {
    const GridSpec& g = f.grid();
    std::vector<cplx> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto xi = g.frequency_vector(k);
        cplx s{};
        for (std::size_t j = 0; j < g.size(); ++j) {
            const auto x = g.point(j);
            double ph = 0.0;
            for (int a = 0; a < g.dim; ++a) ph += xi[a] * x[a];
            s += f.at(j, channel) * std::polar(1.0, -ph);
        }
        out[k] = s / static_cast<double>(g.size());
    }
    return out;
}

inline double max_abs_diff(const ellreg::Field& a, const ellreg::Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double max_abs(const ellreg::Field& a) {
    double m = 0.0;
    for (const auto& z : a.data()) m = std::max(m, std::abs(z));
    return m;
}

/// Midpoint rule on [a, b] with n cells.
template <class F>
double midpoint(F&& fn, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += fn(a + (i + 0.5) * h);
    return s * h;
}

} // namespace oracle
