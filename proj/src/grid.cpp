#include "ellreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ellreg/error.hpp"
#include "ellreg/kernels.hpp"
#include "fft.hpp"

namespace ellreg {

GridSpec::GridSpec(int m, int n, double l) : dim(m), points(n), half_period(l) {
    if (m < 1) throw InvalidArgument("grid dimension must be >= 1");
    if (n < 4 || n % 2 != 0) throw InvalidArgument("points per axis must be even and >= 4, got " + std::to_string(n));
    if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("half period must be positive");
    size_ = 1;
    for (int i = 0; i < m; ++i) size_ *= static_cast<std::size_t>(n);
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }
double GridSpec::volume() const { return std::pow(2.0 * half_period, dim); }

void GridSpec::unflatten(std::size_t flat, std::span<int> out) const {
    for (int a = dim - 1; a >= 0; --a) {
        out[a] = static_cast<int>(flat % static_cast<std::size_t>(points));
        flat /= static_cast<std::size_t>(points);
    }
}

std::size_t GridSpec::flatten(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * static_cast<std::size_t>(points) + static_cast<std::size_t>(idx[a]);
    return flat;
}

std::vector<double> GridSpec::point(std::size_t flat) const {
    std::vector<int> idx(dim);
    unflatten(flat, idx);
    std::vector<double> x(dim);
    for (int a = 0; a < dim; ++a) x[a] = coordinate(idx[a]);
    return x;
}

std::vector<double> GridSpec::frequency_vector(std::size_t flat) const {
    std::vector<int> idx(dim);
    unflatten(flat, idx);
    std::vector<double> xi(dim);
    for (int a = 0; a < dim; ++a) xi[a] = frequency(idx[a]);
    return xi;
}

std::size_t GridSpec::origin_index() const {
    std::vector<int> idx(dim, points / 2);
    return flatten(idx);
}

std::size_t GridSpec::nearest_index(std::span<const double> x) const {
    std::vector<int> idx(dim);
    for (int a = 0; a < dim; ++a) {
        const double t = (x[a] + half_period) / spacing();
        long j = std::lround(t) % points;
        if (j < 0) j += points;
        idx[a] = static_cast<int>(j);
    }
    return flatten(idx);
}

Box Box::cube(int dim, double radius) {
    return Box{std::vector<double>(dim, -radius), std::vector<double>(dim, radius)};
}

Box Box::cube_around(std::span<const double> centre, double radius) {
    Box b;
    for (double c : centre) {
        b.lo.push_back(c - radius);
        b.hi.push_back(c + radius);
    }
    return b;
}

bool Box::contains(std::span<const double> x) const {
    for (std::size_t a = 0; a < lo.size(); ++a)
        if (x[a] < lo[a] || x[a] > hi[a]) return false;
    return true;
}

bool Box::contains_periodic(std::span<const double> x, double half_period) const {
    const double period = 2.0 * half_period;
    for (std::size_t a = 0; a < lo.size(); ++a) {
        const double mid = 0.5 * (lo[a] + hi[a]);
        double d = std::remainder(x[a] - mid, period);
        if (std::abs(d) > 0.5 * (hi[a] - lo[a]) + 1e-12) return false;
    }
    return true;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

// ---------------------------------------------------------------- Field

Field::Field(GridSpec grid, int channels) : grid_(grid), channels_(channels) {
    if (channels < 1) throw InvalidArgument("channel count must be positive");
    data_.assign(grid_.size() * static_cast<std::size_t>(channels), cplx{});
}

Field::Field(GridSpec grid, int channels, std::vector<cplx> data)
    : grid_(grid), channels_(channels), data_(std::move(data)) {
    if (channels < 1) throw InvalidArgument("channel count must be positive");
    if (data_.size() != grid_.size() * static_cast<std::size_t>(channels))
        throw InvalidArgument("sample count does not match N^m * channels");
}

Field Field::sample(const GridSpec& grid, const std::function<cplx(std::span<const double>)>& fn) {
    Field f(grid, 1);
    std::vector<int> idx(grid.dim);
    std::vector<double> x(grid.dim);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.unflatten(i, idx);
        for (int a = 0; a < grid.dim; ++a) x[a] = grid.coordinate(idx[a]);
        f.data_[i] = fn(x);
    }
    return f;
}

Field Field::constant(const GridSpec& grid, int channels, cplx value) {
    Field f(grid, channels);
    std::fill(f.data_.begin(), f.data_.end(), value);
    return f;
}

bool Field::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool Field::is_constant(double tol) const {
    for (std::size_t i = 1; i < points(); ++i)
        for (int c = 0; c < channels_; ++c)
            if (std::abs(at(i, c) - at(0, c)) > tol) return false;
    return true;
}

Field& Field::operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator+=");
    if (channels_ != o.channels_) throw ChannelMismatch("Field::operator+=: channel counts differ");
    kernels::axpy(1.0, o.data_, data_);
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator-=");
    if (channels_ != o.channels_) throw ChannelMismatch("Field::operator-=: channel counts differ");
    kernels::axpy(-1.0, o.data_, data_);
    return *this;
}

Field& Field::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

Field Field::times(const Field& scalar) const {
    require_same_grid(grid_, scalar.grid_, "Field::times");
    if (scalar.channels_ != 1) throw ChannelMismatch("Field::times expects a scalar multiplier");
    Field out = *this;
    for (std::size_t i = 0; i < points(); ++i)
        for (int c = 0; c < channels_; ++c) out.at(i, c) *= scalar.at(i);
    return out;
}

Field Field::channel(int c) const {
    Field out(grid_, 1);
    for (std::size_t i = 0; i < points(); ++i) out.at(i) = at(i, c);
    return out;
}

Field Field::real_part() const {
    Field out = *this;
    for (auto& z : out.data_) z = z.real();
    return out;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

// ---------------------------------------------------------------- SpectralField

SpectralField::SpectralField(GridSpec grid, int channels) : grid_(grid), channels_(channels) {
    data_.assign(grid_.size() * static_cast<std::size_t>(channels), cplx{});
}

cplx& SpectralField::coefficient(std::span<const int> k, int channel) {
    std::vector<int> idx(grid_.dim);
    for (int a = 0; a < grid_.dim; ++a) {
        if (k[a] < -grid_.points / 2 || k[a] >= grid_.points / 2)
            throw InvalidArgument("wavenumber outside the frequency lattice");
        idx[a] = grid_.fft_position(k[a]);
    }
    return at(grid_.flatten(idx), channel);
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField::operator+=");
    if (channels_ != o.channels_) throw ChannelMismatch("SpectralField::operator+=: channel counts differ");
    kernels::axpy(1.0, o.data_, data_);
    return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

// ---------------------------------------------------------------- transforms

namespace {

// (-1)^{sum k} accounts for the grid starting at -L instead of 0.
std::vector<cplx> shift_phase(const GridSpec& g, double scale) {
    std::vector<cplx> phase(g.size());
    std::vector<int> idx(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        int parity = 0;
        for (int a = 0; a < g.dim; ++a) parity += g.wavenumber(idx[a]);
        phase[i] = (parity % 2 == 0) ? scale : -scale;
    }
    return phase;
}

} // namespace

SpectralField dft(const Field& f) {
    const GridSpec& g = f.grid();
    SpectralField F(g, f.channels());
    std::copy(f.data().begin(), f.data().end(), F.data().begin());
    detail::fft_inplace(g, f.channels(), F.data(), -1);
    const auto phase = shift_phase(g, 1.0 / static_cast<double>(g.size()));
    kernels::multiply_symbol(F.data(), f.channels(), phase);
    return F;
}

Field idft(const SpectralField& F) {
    const GridSpec& g = F.grid();
    std::vector<cplx> buf(F.data().begin(), F.data().end());
    const auto phase = shift_phase(g, 1.0);
    kernels::multiply_symbol(buf, F.channels(), phase);
    detail::fft_inplace(g, F.channels(), buf, +1);
    return Field(g, F.channels(), std::move(buf));
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
    std::vector<double> mod(f.points());
    kernels::modulus(f.data(), f.channels(), mod);
    if (std::isinf(p)) return kernels::max_value(mod);
    const double s = kernels::power_sum(mod, p) * f.grid().cell_volume();
    return std::pow(s, 1.0 / p);
}

double lp_norm(const Field& f, double p, const Box& window) {
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
    const GridSpec& g = f.grid();
    std::vector<double> mod(f.points());
    kernels::modulus(f.data(), f.channels(), mod);
    std::vector<int> idx(g.dim);
    std::vector<double> x(g.dim);
    for (std::size_t i = 0; i < mod.size(); ++i) {
        g.unflatten(i, idx);
        for (int a = 0; a < g.dim; ++a) x[a] = g.coordinate(idx[a]);
        if (!window.contains(x)) mod[i] = 0.0;
    }
    if (std::isinf(p)) return kernels::max_value(mod);
    return std::pow(kernels::power_sum(mod, p) * g.cell_volume(), 1.0 / p);
}

Field scalar_multiplier(const Field& f, const std::function<cplx(std::span<const double>)>& symbol) {
    const GridSpec& g = f.grid();
    SpectralField F = dft(f);
    std::vector<cplx> sym(g.size());
    std::vector<int> idx(g.dim);
    std::vector<double> xi(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        for (int a = 0; a < g.dim; ++a) xi[a] = g.frequency(idx[a]);
        sym[i] = symbol(xi);
    }
    kernels::multiply_symbol(F.data(), f.channels(), sym);
    return idft(F);
}

Field translate(const Field& f, std::span<const double> shift) {
    if (static_cast<int>(shift.size()) != f.grid().dim) throw InvalidArgument("translate: shift dimension mismatch");
    return scalar_multiplier(f, [&](std::span<const double> xi) {
        double phase = 0.0;
        for (std::size_t a = 0; a < xi.size(); ++a) phase += xi[a] * shift[a];
        return std::polar(1.0, phase);
    });
}

Field derivative(const Field& f, std::span<const int> alpha) {
    if (static_cast<int>(alpha.size()) != f.grid().dim) throw InvalidArgument("derivative: multi-index dimension mismatch");
    bool zero = true;
    for (int a : alpha) zero = zero && (a == 0);
    if (zero) return f;
    return scalar_multiplier(f, [&](std::span<const double> xi) {
        cplx s = 1.0;
        for (std::size_t a = 0; a < xi.size(); ++a)
            for (int r = 0; r < alpha[a]; ++r) s *= cplx(0.0, xi[a]);
        return s;
    });
}

} // namespace ellreg
