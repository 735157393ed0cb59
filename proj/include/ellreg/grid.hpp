#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ellreg {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Periodic uniform grid on the torus [-L, L)^m with N points per axis.
///
/// Grid point j along an axis sits at -L + j*h, h = 2L/N, so x = 0 is always
/// a grid point (N is even). Frequencies are (pi/L)*k with -N/2 <= k < N/2.
struct GridSpec {
    int dim = 1;
    int points = 64;
    double half_period = kPi;

    GridSpec() = default;
    GridSpec(int m, int n, double l);

    double spacing() const { return 2.0 * half_period / points; }
    double cell_volume() const;
    double volume() const;
    std::size_t size() const { return size_; }

    /// Coordinate of grid index j along one axis.
    double coordinate(int j) const { return -half_period + j * spacing(); }
    /// Integer wavenumber stored at FFT position i along one axis.
    int wavenumber(int i) const { return i < points / 2 ? i : i - points; }
    double frequency(int i) const { return kPi / half_period * wavenumber(i); }
    /// FFT position of integer wavenumber k.
    int fft_position(int k) const { return k >= 0 ? k : k + points; }

    /// Per-axis indices of a flat (row-major, axis 0 slowest) point index.
    void unflatten(std::size_t flat, std::span<int> out) const;
    std::size_t flatten(std::span<const int> idx) const;

    std::vector<double> point(std::size_t flat) const;
    std::vector<double> frequency_vector(std::size_t flat) const;
    /// Flat index of the point x = 0.
    std::size_t origin_index() const;
    /// Flat index of the grid point closest to x (periodic).
    std::size_t nearest_index(std::span<const double> x) const;

    /// Same torus, twice the points per axis.
    GridSpec refined(int factor = 2) const { return GridSpec(dim, points * factor, half_period); }

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && points == o.points && half_period == o.half_period;
    }

private:
    std::size_t size_ = 64;
};

/// Axis-aligned sub-cube used to restrict norms ("windows").
struct Box {
    std::vector<double> lo, hi;

    static Box cube(int dim, double radius);
    static Box cube_around(std::span<const double> centre, double radius);
    bool contains(std::span<const double> x) const;
    /// Periodic containment on the torus of half period L.
    bool contains_periodic(std::span<const double> x, double half_period) const;
};

/// Complex l-channel samples on a grid; sample (point, channel) lives at
/// point * channels + channel.
class Field {
public:
    Field() = default;
    Field(GridSpec grid, int channels);
    Field(GridSpec grid, int channels, std::vector<cplx> data);

    /// Samples a scalar function of position.
    static Field sample(const GridSpec& grid, const std::function<cplx(std::span<const double>)>& fn);
    static Field constant(const GridSpec& grid, int channels, cplx value);

    const GridSpec& grid() const { return grid_; }
    int channels() const { return channels_; }
    std::size_t points() const { return grid_.size(); }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }
    cplx& at(std::size_t point, int channel = 0) { return data_[point * channels_ + channel]; }
    const cplx& at(std::size_t point, int channel = 0) const { return data_[point * channels_ + channel]; }

    bool all_finite() const;
    /// True when every point carries the same channel vector.
    bool is_constant(double tol = 0.0) const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(cplx s);

    /// Pointwise product with a scalar field (broadcast over channels).
    Field times(const Field& scalar) const;
    Field channel(int c) const;
    Field real_part() const;

private:
    GridSpec grid_;
    int channels_ = 1;
    std::vector<cplx> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);

/// Fourier coefficients on the frequency lattice, FFT ordering per axis.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(GridSpec grid, int channels);

    const GridSpec& grid() const { return grid_; }
    int channels() const { return channels_; }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }
    cplx& at(std::size_t mode, int channel = 0) { return data_[mode * channels_ + channel]; }
    const cplx& at(std::size_t mode, int channel = 0) const { return data_[mode * channels_ + channel]; }
    /// Coefficient at integer wavevector k.
    cplx& coefficient(std::span<const int> k, int channel = 0);

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator*=(cplx s);

private:
    GridSpec grid_;
    int channels_ = 1;
    std::vector<cplx> data_;
};

/// Coefficients c(xi) = (2L)^{-m} * Riemann sum of f e^{-i xi.x}.
SpectralField dft(const Field& f);
Field idft(const SpectralField& F);

/// Quadrature L^p norm of the channel-wise Euclidean modulus; p = kInf gives the
/// sample maximum.
double lp_norm(const Field& f, double p);
double lp_norm(const Field& f, double p, const Box& window);

/// f(. + shift), exact for band-limited fields.
Field translate(const Field& f, std::span<const double> shift);

/// Spectral partial derivative d^alpha f.
Field derivative(const Field& f, std::span<const int> alpha);

/// Multiplies every lattice coefficient by a scalar symbol a(xi).
Field scalar_multiplier(const Field& f, const std::function<cplx(std::span<const double>)>& symbol);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

} // namespace ellreg
