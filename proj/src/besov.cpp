#include "ellreg/besov.hpp"

#include <algorithm>
#include <cmath>

#include "ellreg/error.hpp"
#include "ellreg/kernels.hpp"
#include "ellreg/pdo.hpp"

namespace ellreg {

Field bessel_lift(double gamma, const Field& f) {
    if (gamma == 0.0) return f;
    return scalar_multiplier(f, [gamma](std::span<const double> xi) {
        double n2 = 0.0;
        for (double v : xi) n2 += v * v;
        return cplx(std::pow(1.0 + n2, -0.5 * gamma));
    });
}

int integer_part_below(double alpha) { return static_cast<int>(std::ceil(alpha)) - 1; }

DisplacementSet DisplacementSet::for_grid(const GridSpec& grid) {
    DisplacementSet s;
    for (double r = 0.5 * grid.half_period; r >= grid.spacing() * (1.0 - 1e-12); r *= 0.5) s.radii.push_back(r);
    if (grid.dim == 1) {
        s.directions = {{1.0}};
        s.sphere_area = 2.0;
    } else if (grid.dim == 2) {
        for (int k = 0; k < 4; ++k) s.directions.push_back({std::cos(k * kPi / 4), std::sin(k * kPi / 4)});
        s.sphere_area = 2.0 * kPi;
    } else {
        s.directions = unit_directions(grid.dim, 8 * grid.dim);
        s.sphere_area = 2.0 * std::pow(kPi, 0.5 * grid.dim) / std::tgamma(0.5 * grid.dim);
    }
    return s;
}

namespace {

double second_difference_norm(const SpectralField& F, std::span<const double> shift, double p) {
    const GridSpec& g = F.grid();
    SpectralField D = F;
    std::vector<cplx> sym(g.size());
    std::vector<int> idx(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double ph = 0.0;
        for (int a = 0; a < g.dim; ++a) ph += g.frequency(idx[a]) * shift[a];
        sym[i] = 2.0 * std::cos(ph) - 2.0;
    }
    serial::multiply_symbol(D.data(), F.channels(), sym);
    return lp_norm(idft(D), p);
}

std::vector<double> shift_of(const DisplacementSet& set, std::size_t job) {
    const std::size_t nd = set.directions.size();
    const double r = set.radii[job / nd];
    std::vector<double> x = set.directions[job % nd];
    for (double& v : x) v *= r;
    return x;
}

} // namespace

std::vector<double> second_difference_norms(const SpectralField& F, const DisplacementSet& set, double p) {
    const auto jobs = static_cast<std::ptrdiff_t>(set.radii.size() * set.directions.size());
    std::vector<double> out(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < jobs; ++j) {
        const auto x = shift_of(set, static_cast<std::size_t>(j));
        out[static_cast<std::size_t>(j)] = second_difference_norm(F, x, p);
    }
    return out;
}

namespace serial {
std::vector<double> second_difference_norms(const SpectralField& F, const DisplacementSet& set, double p) {
    std::vector<double> out(set.radii.size() * set.directions.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = second_difference_norm(F, shift_of(set, j), p);
    return out;
}
} // namespace serial

double second_difference_seminorm(const Field& f, double s, double p, double q) {
    if (!(s > 0.0 && s < 2.0)) throw InvalidArgument("second-difference order must lie in (0, 2)");
    if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidArgument("Besov exponents need p, q >= 1");
    const auto set = DisplacementSet::for_grid(f.grid());
    const auto norms = second_difference_norms(dft(f), set, p);
    const std::size_t nd = set.directions.size();
    if (std::isinf(q)) {
        double sup = 0.0;
        for (std::size_t j = 0; j < norms.size(); ++j) sup = std::max(sup, norms[j] / std::pow(set.radii[j / nd], s));
        return sup;
    }
    double total = 0.0;
    for (std::size_t r = 0; r < set.radii.size(); ++r) {
        double mean = 0.0;
        for (std::size_t d = 0; d < nd; ++d) mean += std::pow(norms[r * nd + d], q);
        mean /= static_cast<double>(nd);
        total += std::log(2.0) * set.sphere_area * mean * std::pow(set.radii[r], -s * q);
    }
    return std::pow(total, 1.0 / q);
}

double sobolev_norm(const Field& f, int k, double p) {
    double s = 0.0;
    for (const auto& b : all_indices(f.grid().dim, k)) s += lp_norm(derivative(f, b.e), p);
    return s;
}

double sobolev_norm(const Field& f, int k, double p, const Box& window) {
    double s = 0.0;
    for (const auto& b : all_indices(f.grid().dim, k)) s += lp_norm(derivative(f, b.e), p, window);
    return s;
}

double besov_norm(const Field& f, const BesovParams& params) {
    const double alpha = params.alpha;
    if (alpha <= 0.0) return besov_norm(bessel_lift(1.0 - alpha, f), {1.0, params.p, params.q});
    if (alpha <= 1.0) return lp_norm(f, params.p) + second_difference_seminorm(f, alpha, params.p, params.q);
    const int k = integer_part_below(alpha);
    double s = sobolev_norm(f, k, params.p);
    for (const auto& b : all_indices(f.grid().dim, k, true))
        s += second_difference_seminorm(derivative(f, b.e), alpha - k, params.p, params.q);
    return s;
}

Field fourier_multiplier(const MultiplierSpec& spec, const Field& f) {
    if (f.channels() != spec.cols) throw ChannelMismatch("multiplier expects " + std::to_string(spec.cols) + " channels");
    const GridSpec& g = f.grid();
    const SpectralField F = dft(f);
    SpectralField out(g, spec.rows);
    std::vector<int> idx(g.dim);
    std::vector<double> xi(g.dim);
    Eigen::VectorXcd v(spec.cols);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        for (int a = 0; a < g.dim; ++a) xi[a] = g.frequency(idx[a]);
        const Eigen::MatrixXcd a = spec.symbol(xi);
        if (a.rows() != spec.rows || a.cols() != spec.cols) throw ChannelMismatch("multiplier symbol has the wrong shape");
        if (!a.allFinite()) {
            std::string at;
            for (double x : xi) at += (at.empty() ? "" : ", ") + std::to_string(x);
            throw SingularMultiplier("multiplier is not finite at xi = (" + at + ")");
        }
        for (int c = 0; c < spec.cols; ++c) v(c) = F.at(i, c);
        const Eigen::VectorXcd w = a * v;
        for (int r = 0; r < spec.rows; ++r) out.at(i, r) = w(r);
    }
    return idft(out);
}

double multiplier_growth_constant(const MultiplierSpec& spec, const GridSpec& grid) {
    double c = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto xi = grid.frequency_vector(i);
        double n2 = 0.0;
        for (double v : xi) n2 += v * v;
        const Eigen::MatrixXcd a = spec.symbol(xi);
        const double opnorm = a.size() == 1 ? std::abs(a(0, 0)) : Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()(0);
        c = std::max(c, opnorm / std::pow(1.0 + std::sqrt(n2), spec.degree));
    }
    return c;
}

ProductEstimate product_estimate_check(const Field& a, const Field& f, const BesovParams& params, double constant,
                                       int derivatives) {
    if (a.channels() != 1) throw ChannelMismatch("product estimate needs a scalar multiplier field");
    ProductEstimate r;
    r.constant = constant;
    r.lhs = besov_norm(f.times(a), params);
    r.leading = lp_norm(a, kInf) * besov_norm(f, params);
    double wn = 0.0;
    for (const auto& b : all_indices(a.grid().dim, derivatives)) wn += lp_norm(derivative(a, b.e), kInf);
    r.correction = wn * besov_norm(f, {params.alpha - 1.0, params.p, params.q});
    const double denom = r.leading + r.correction;
    r.ratio = denom > 0.0 ? r.lhs / denom : 0.0;
    r.holds = r.ratio <= constant;
    return r;
}

} // namespace ellreg
