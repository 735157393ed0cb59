#include "ellreg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ellreg::kernels {

namespace {

inline double pow_abs(double v, double p) {
    if (p == 1.0) return v;
    if (p == 2.0) return v * v;
    return std::pow(v, p);
}

} // namespace

void modulus(std::span<const cplx> data, int channels, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const cplx* row = data.data() + i * channels;
        if (channels == 1) {
            out[i] = std::abs(row[0]);
        } else {
            double s = 0.0;
            for (int c = 0; c < channels; ++c) s += std::norm(row[c]);
            out[i] = std::sqrt(s);
        }
    }
}

double power_sum(std::span<const double> v, double p) {
    const std::size_t n = v.size();
    const auto blocks = static_cast<std::ptrdiff_t>((n + kReductionBlock - 1) / kReductionBlock);
    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += pow_abs(v[i], p);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

double max_value(std::span<const double> v) {
    double m = 0.0;
    const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for reduction(max : m) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, v[i]);
    return m;
}

void multiply_symbol(std::span<cplx> coeffs, int channels, std::span<const cplx> symbol) {
    const auto n = static_cast<std::ptrdiff_t>(symbol.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (int c = 0; c < channels; ++c) coeffs[i * channels + c] *= symbol[i];
    }
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

} // namespace ellreg::kernels

namespace ellreg::serial {

void modulus(std::span<const cplx> data, int channels, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < channels; ++c) s += std::norm(data[i * channels + c]);
        out[i] = std::sqrt(s);
    }
}

double power_sum(std::span<const double> v, double p) {
    double s = 0.0;
    for (double x : v) s += std::pow(x, p);
    return s;
}

double max_value(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

void multiply_symbol(std::span<cplx> coeffs, int channels, std::span<const cplx> symbol) {
    for (std::size_t i = 0; i < symbol.size(); ++i)
        for (int c = 0; c < channels; ++c) coeffs[i * channels + c] *= symbol[i];
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

} // namespace ellreg::serial
