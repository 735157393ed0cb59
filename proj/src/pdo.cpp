#include "ellreg/pdo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"
#include "ellreg/kernels.hpp"

namespace ellreg {

// ---------------------------------------------------------------- multi-indices

MultiIndex MultiIndex::unit(int dim, int axis, int power) {
    MultiIndex a = zero(dim);
    a.e[axis] = power;
    return a;
}

int MultiIndex::order() const { return std::accumulate(e.begin(), e.end(), 0); }

bool MultiIndex::le(const MultiIndex& o) const {
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] > o.e[i]) return false;
    return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
    MultiIndex r = *this;
    for (std::size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
    return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
    MultiIndex r = *this;
    for (std::size_t i = 0; i < e.size(); ++i) r.e[i] -= o.e[i];
    return r;
}

std::vector<MultiIndex> sub_indices(const MultiIndex& alpha) {
    std::vector<MultiIndex> out{MultiIndex::zero(alpha.dim())};
    for (int a = 0; a < alpha.dim(); ++a) {
        std::vector<MultiIndex> next;
        for (const auto& g : out)
            for (int k = 0; k <= alpha.e[a]; ++k) {
                MultiIndex h = g;
                h.e[a] = k;
                next.push_back(h);
            }
        out = std::move(next);
    }
    return out;
}

std::vector<MultiIndex> all_indices(int dim, int order, bool exact) {
    std::vector<MultiIndex> out;
    MultiIndex box(std::vector<int>(dim, order));
    for (auto& a : sub_indices(box)) {
        const int o = a.order();
        if (exact ? o == order : o <= order) out.push_back(a);
    }
    return out;
}

double binomial(const MultiIndex& alpha, const MultiIndex& gamma) {
    double b = 1.0;
    for (int a = 0; a < alpha.dim(); ++a) {
        double c = 1.0;
        for (int k = 1; k <= gamma.e[a]; ++k) c = c * (alpha.e[a] - gamma.e[a] + k) / k;
        b *= c;
    }
    return b;
}

cplx monomial_symbol(const MultiIndex& alpha, std::span<const double> xi) {
    cplx s = 1.0;
    for (int a = 0; a < alpha.dim(); ++a)
        for (int r = 0; r < alpha.e[a]; ++r) s *= cplx(0.0, xi[a]);
    return s;
}

// ---------------------------------------------------------------- PDOperator

PDOperator::PDOperator(GridSpec grid, int order, int in_channels, int out_channels)
    : grid_(grid), order_(order), in_(in_channels), out_(out_channels) {
    if (order < 0) throw InvalidArgument("operator order must be >= 0");
    if (in_channels < 1 || out_channels < 1) throw InvalidArgument("operator channel counts must be positive");
}

PDOperator PDOperator::derivative(GridSpec grid, const MultiIndex& alpha, cplx scale) {
    PDOperator P(grid, alpha.order(), 1, 1);
    P.set(alpha, Field::constant(grid, 1, scale));
    return P;
}

PDOperator PDOperator::laplacian(GridSpec grid, cplx scale) {
    PDOperator P(grid, 2, 1, 1);
    for (int a = 0; a < grid.dim; ++a) P.set(MultiIndex::unit(grid.dim, a, 2), Field::constant(grid, 1, scale));
    return P;
}

PDOperator PDOperator::multiplication(const Field& c) {
    PDOperator P(c.grid(), 0, 1, 1);
    P.set(MultiIndex::zero(c.grid().dim), c);
    return P;
}

PDOperator PDOperator::identity(GridSpec grid, int channels, cplx scale) {
    PDOperator P(grid, 0, channels, channels);
    P.set_constant(MultiIndex::zero(grid.dim), Eigen::MatrixXcd::Identity(channels, channels) * scale);
    return P;
}

void PDOperator::set(const MultiIndex& alpha, Field coeff) {
    if (alpha.dim() != grid_.dim) throw InvalidArgument("multi-index dimension does not match grid");
    if (alpha.order() > order_) throw InvalidArgument("multi-index order exceeds operator order");
    require_same_grid(grid_, coeff.grid(), "PDOperator::set");
    if (coeff.channels() != in_ * out_) throw ChannelMismatch("coefficient field must carry out*in channels");
    coeffs_.insert_or_assign(alpha, std::move(coeff));
}

void PDOperator::set_constant(const MultiIndex& alpha, const Eigen::MatrixXcd& m) {
    if (m.rows() != out_ || m.cols() != in_) throw ChannelMismatch("constant coefficient has wrong shape");
    Field c(grid_, in_ * out_);
    for (std::size_t p = 0; p < c.points(); ++p)
        for (int i = 0; i < out_; ++i)
            for (int j = 0; j < in_; ++j) c.at(p, i * in_ + j) = m(i, j);
    set(alpha, std::move(c));
}

void PDOperator::add(const MultiIndex& alpha, const Field& coeff) {
    if (auto it = coeffs_.find(alpha); it != coeffs_.end()) {
        it->second += coeff;
    } else {
        set(alpha, coeff);
    }
}

Field PDOperator::coefficient(const MultiIndex& alpha) const {
    if (auto it = coeffs_.find(alpha); it != coeffs_.end()) return it->second;
    return Field(grid_, in_ * out_);
}

Eigen::MatrixXcd PDOperator::coefficient_at(const MultiIndex& alpha, std::size_t point) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(out_, in_);
    if (auto it = coeffs_.find(alpha); it != coeffs_.end())
        for (int i = 0; i < out_; ++i)
            for (int j = 0; j < in_; ++j) m(i, j) = it->second.at(point, i * in_ + j);
    return m;
}

bool PDOperator::constant_coefficients() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.is_constant(); });
}

PDOperator PDOperator::principal_part() const {
    PDOperator P(grid_, order_, in_, out_);
    for (const auto& [a, c] : coeffs_)
        if (a.order() == order_) P.coeffs_.emplace(a, c);
    P.degenerate_ = degenerate_;
    return P;
}

PDOperator PDOperator::lower_order_part() const {
    PDOperator P(grid_, std::max(order_ - 1, 0), in_, out_);
    for (const auto& [a, c] : coeffs_)
        if (a.order() < order_) P.coeffs_.emplace(a, c);
    P.degenerate_ = true;
    return P;
}

PDOperator PDOperator::frozen_at(std::size_t point) const {
    PDOperator P(grid_, order_, in_, out_);
    for (const auto& [a, c] : coeffs_) P.set_constant(a, coefficient_at(a, point));
    P.degenerate_ = degenerate_;
    return P;
}

PDOperator& PDOperator::prune(double tol) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        const auto d = it->second.data();
        const bool zero = std::all_of(d.begin(), d.end(), [tol](const cplx& z) { return std::abs(z) <= tol; });
        it = zero ? coeffs_.erase(it) : std::next(it);
    }
    degenerate_ = std::none_of(coeffs_.begin(), coeffs_.end(), [this](const auto& kv) { return kv.first.order() == order_; });
    return *this;
}

void PDOperator::validate() const {
    bool top = false;
    for (const auto& [a, c] : coeffs_) {
        if (a.order() > order_) throw InvalidArgument("coefficient order exceeds operator order");
        if (c.channels() != in_ * out_) throw ChannelMismatch("coefficient channel count mismatch");
        require_same_grid(grid_, c.grid(), "PDOperator::validate");
        if (a.order() == order_) {
            const auto d = c.data();
            top = top || std::any_of(d.begin(), d.end(), [](const cplx& z) { return z != cplx{}; });
        }
    }
    if (!top && !degenerate_)
        throw InvalidArgument("top-order coefficients vanish identically; flag the operator as degenerate-order");
}

PDOperator& PDOperator::operator+=(const PDOperator& o) {
    require_same_grid(grid_, o.grid_, "PDOperator::operator+=");
    if (in_ != o.in_ || out_ != o.out_) throw ChannelMismatch("operator channel counts differ");
    order_ = std::max(order_, o.order_);
    for (const auto& [a, c] : o.coeffs_) add(a, c);
    return *this;
}

PDOperator& PDOperator::operator*=(cplx s) {
    for (auto& [a, c] : coeffs_) c *= s;
    return *this;
}

PDOperator operator+(PDOperator a, const PDOperator& b) { return a += b; }
PDOperator operator-(PDOperator a, const PDOperator& b) {
    PDOperator nb = b;
    nb *= -1.0;
    return a += nb;
}

// ---------------------------------------------------------------- pointwise algebra

Field matrix_apply(const Field& matrix, int rows, int cols, const Field& v) {
    require_same_grid(matrix.grid(), v.grid(), "matrix_apply");
    if (matrix.channels() != rows * cols || v.channels() != cols) throw ChannelMismatch("matrix_apply: shape mismatch");
    Field out(v.grid(), rows);
    const auto n = static_cast<std::ptrdiff_t>(v.points());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
        for (int i = 0; i < rows; ++i) {
            cplx s{};
            for (int j = 0; j < cols; ++j) s += matrix.at(p, i * cols + j) * v.at(p, j);
            out.at(p, i) = s;
        }
    }
    return out;
}

Field matrix_product(const Field& A, int a, int b, const Field& B, int c) {
    require_same_grid(A.grid(), B.grid(), "matrix_product");
    if (A.channels() != a * b || B.channels() != b * c) throw ChannelMismatch("matrix_product: shape mismatch");
    Field out(A.grid(), a * c);
    const auto n = static_cast<std::ptrdiff_t>(A.points());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p)
        for (int i = 0; i < a; ++i)
            for (int k = 0; k < c; ++k) {
                cplx s{};
                for (int j = 0; j < b; ++j) s += A.at(p, i * b + j) * B.at(p, j * c + k);
                out.at(p, i * c + k) = s;
            }
    return out;
}

namespace {

Field conjugate_transpose(const Field& m, int rows, int cols) {
    Field out(m.grid(), rows * cols);
    for (std::size_t p = 0; p < m.points(); ++p)
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) out.at(p, j * rows + i) = std::conj(m.at(p, i * cols + j));
    return out;
}

Field spectral_derivative(const SpectralField& F, const MultiIndex& alpha) {
    const GridSpec& g = F.grid();
    SpectralField D = F;
    std::vector<cplx> sym(g.size());
    std::vector<int> idx(g.dim);
    std::vector<double> xi(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        for (int a = 0; a < g.dim; ++a) xi[a] = g.frequency(idx[a]);
        sym[i] = monomial_symbol(alpha, xi);
    }
    kernels::multiply_symbol(D.data(), F.channels(), sym);
    return idft(D);
}

} // namespace

Field apply(const PDOperator& P, const Field& f) {
    require_same_grid(P.grid(), f.grid(), "apply");
    if (f.channels() != P.in_channels())
        throw ChannelMismatch("apply: field has " + std::to_string(f.channels()) + " channels, operator expects " +
                              std::to_string(P.in_channels()));
    Field out(f.grid(), P.out_channels());
    if (P.coefficients().empty()) return out;
    const SpectralField F = dft(f);
    for (const auto& [alpha, c] : P.coefficients()) {
        const Field d = alpha.order() == 0 ? f : spectral_derivative(F, alpha);
        out += matrix_apply(c, P.out_channels(), P.in_channels(), d);
    }
    return out;
}

Eigen::MatrixXcd principal_symbol(const PDOperator& P, std::size_t point, std::span<const double> xi) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(P.out_channels(), P.in_channels());
    for (const auto& [alpha, c] : P.coefficients())
        if (alpha.order() == P.order()) s += P.coefficient_at(alpha, point) * monomial_symbol(alpha, xi);
    return s;
}

Eigen::MatrixXcd full_symbol(const PDOperator& P, std::size_t point, std::span<const double> xi) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(P.out_channels(), P.in_channels());
    for (const auto& [alpha, c] : P.coefficients()) s += P.coefficient_at(alpha, point) * monomial_symbol(alpha, xi);
    return s;
}

// ---------------------------------------------------------------- symbol sampling

int default_sphere_samples(int dim) { return dim == 1 ? 64 : (dim == 2 ? 512 : 256); }

std::vector<std::vector<double>> unit_directions(int dim, int count) {
    std::vector<std::vector<double>> dirs;
    if (dim == 1) return {{1.0}, {-1.0}};
    if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            const double t = 2.0 * kPi * i / count;
            dirs.push_back({std::cos(t), std::sin(t)});
        }
        return dirs;
    }
    if (dim == 3) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double rho = std::sqrt(1.0 - z * z);
            dirs.push_back({rho * std::cos(golden * i), rho * std::sin(golden * i), z});
        }
        return dirs;
    }
    std::mt19937_64 engine(0x5eedULL);
    auto uniform = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };
    for (int i = 0; i < count; ++i) {
        std::vector<double> v(dim);
        double n2 = 0.0;
        for (auto& x : v) {
            x = std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * kPi * uniform());
            n2 += x * x;
        }
        for (auto& x : v) x /= std::sqrt(n2);
        dirs.push_back(std::move(v));
    }
    return dirs;
}

namespace {

double smallest_singular_value(const Eigen::MatrixXcd& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// Grid points with pairwise-distinct principal coefficients.
std::vector<std::size_t> distinct_principal_points(const PDOperator& P) {
    std::vector<const Field*> top;
    for (const auto& [a, c] : P.coefficients())
        if (a.order() == P.order()) top.push_back(&c);
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::size_t> pts;
    const std::size_t width = static_cast<std::size_t>(P.in_channels() * P.out_channels());
    std::string key;
    for (std::size_t p = 0; p < P.grid().size(); ++p) {
        key.clear();
        for (const Field* c : top) key.append(reinterpret_cast<const char*>(&c->at(p, 0)), width * sizeof(cplx));
        if (seen.emplace(key, p).second) pts.push_back(p);
    }
    return pts;
}

} // namespace

double ellipticity_margin(const PDOperator& P, int sphere_samples) {
    if (P.in_channels() != P.out_channels()) throw ChannelMismatch("ellipticity_margin needs a square system");
    const int dim = P.grid().dim;
    const auto dirs = unit_directions(dim, sphere_samples > 0 ? sphere_samples : default_sphere_samples(dim));
    const auto pts = distinct_principal_points(P);
    double margin = kInf;
    const auto np = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for reduction(min : margin) schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < np; ++i)
        for (const auto& xi : dirs) margin = std::min(margin, smallest_singular_value(principal_symbol(P, pts[i], xi)));
    return margin;
}

ParameterEllipticity parameter_ellipticity_constant(const PDOperator& Q, double theta0, int sphere_samples) {
    if (Q.in_channels() != Q.out_channels()) throw ChannelMismatch("parameter ellipticity needs a square system");
    const int dim = Q.grid().dim;
    const int samples = sphere_samples > 0 ? sphere_samples : default_sphere_samples(dim);
    const auto dirs = unit_directions(dim, samples);
    const auto pts = distinct_principal_points(Q);
    const int n = Q.order();
    const int l = Q.in_channels();
    const cplx rot = std::polar(1.0, theta0);

    // Principal coefficients per distinct point, evaluated once.
    std::vector<MultiIndex> top;
    for (const auto& [a, c] : Q.coefficients())
        if (a.order() == n) top.push_back(a);

    double worst = 0.0;
    int singular = 0;
    const auto total = static_cast<std::ptrdiff_t>(pts.size()) * (samples + 1);
#pragma omp parallel for reduction(max : worst) reduction(+ : singular) schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < total; ++job) {
        const std::size_t point = pts[static_cast<std::size_t>(job / (samples + 1))];
        const int k = static_cast<int>(job % (samples + 1));
        const double phi = 0.5 * kPi * k / samples;
        const double r = std::cos(phi), rho = std::sin(phi);
        std::vector<Eigen::MatrixXcd> coeff;
        for (const auto& a : top) coeff.push_back(Q.coefficient_at(a, point));
        std::vector<double> xi(dim);
        for (const auto& d : dirs) {
            for (int a = 0; a < dim; ++a) xi[a] = rho * d[a];
            Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(l, l) * (std::pow(r, n) * rot);
            for (std::size_t t = 0; t < top.size(); ++t) M -= coeff[t] * monomial_symbol(top[t], xi);
            const double smin = smallest_singular_value(M);
            const double scale = 1.0 + M.cwiseAbs().maxCoeff();
            if (!(smin > 1e-12 * scale)) {
                ++singular;
                continue;
            }
            worst = std::max(worst, std::pow(r + rho, n) / smin);
            if (rho == 0.0) break;  // xi = 0: direction does not matter
        }
    }
    ParameterEllipticity out;
    out.ok = singular == 0 && worst < 1e12;
    out.C = out.ok ? worst : kInf;
    return out;
}

// ---------------------------------------------------------------- operator calculus

PDOperator formal_adjoint(const PDOperator& P) {
    const int out = P.out_channels(), in = P.in_channels();
    PDOperator A(P.grid(), P.order(), out, in);
    for (const auto& [alpha, c] : P.coefficients()) {
        const Field cs = conjugate_transpose(c, out, in);
        const bool constant = cs.is_constant();
        const SpectralField C = dft(cs);
        const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
        for (const auto& gamma : sub_indices(alpha)) {
            const MultiIndex rest = alpha - gamma;
            if (rest.order() > 0 && constant) continue;
            Field term = rest.order() == 0 ? cs : spectral_derivative(C, rest);
            term *= sign * binomial(alpha, gamma);
            A.add(gamma, term);
        }
    }
    A.prune();
    return A;
}

PDOperator compose(const PDOperator& A, const PDOperator& B) {
    require_same_grid(A.grid(), B.grid(), "compose");
    if (A.in_channels() != B.out_channels()) throw ChannelMismatch("compose: inner channel counts differ");
    const int a = A.out_channels(), b = A.in_channels(), c = B.in_channels();
    PDOperator R(A.grid(), A.order() + B.order(), c, a);
    for (const auto& [beta, bc] : B.coefficients()) {
        const bool constant = bc.is_constant();
        const SpectralField BC = dft(bc);
        for (const auto& [alpha, ac] : A.coefficients()) {
            for (const auto& gamma : sub_indices(alpha)) {
                const MultiIndex rest = alpha - gamma;
                if (rest.order() > 0 && constant) continue;
                const Field db = rest.order() == 0 ? bc : spectral_derivative(BC, rest);
                Field term = matrix_product(ac, a, b, db, c);
                term *= binomial(alpha, gamma);
                R.add(gamma + beta, term);
            }
        }
    }
    R.prune();
    return R;
}

PDOperator compose_TPdaggerP(const PDOperator& P) { return compose(formal_adjoint(P), P); }

PDOperator commutator_with_cutoff(const PDOperator& P, const Field& psi) {
    require_same_grid(P.grid(), psi.grid(), "commutator_with_cutoff");
    if (psi.channels() != 1) throw ChannelMismatch("cutoff must be scalar");
    PDOperator R(P.grid(), std::max(P.order() - 1, 0), P.in_channels(), P.out_channels());
    const SpectralField Psi = dft(psi);
    for (const auto& [alpha, c] : P.coefficients()) {
        if (alpha.order() == 0) continue;
        for (const auto& gamma : sub_indices(alpha)) {
            if (gamma == alpha) continue;
            Field term = c.times(spectral_derivative(Psi, alpha - gamma));
            term *= binomial(alpha, gamma);
            R.add(gamma, term);
        }
    }
    R.prune();
    return R;
}

// ---------------------------------------------------------------- clipped extension

namespace {

double periodic_distance(const GridSpec& g, std::size_t p, std::size_t q) {
    const auto x = g.point(p), y = g.point(q);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const double d = std::remainder(x[a] - y[a], 2.0 * g.half_period);
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

double local_oscillation(const PDOperator& T, std::size_t x0, double t) {
    double c = 0.0;
    const int w = T.in_channels() * T.out_channels();
    for (std::size_t y = 0; y < T.grid().size(); ++y) {
        if (periodic_distance(T.grid(), y, x0) > t) continue;
        for (const auto& [a, f] : T.coefficients())
            for (int k = 0; k < w; ++k) c = std::max(c, std::abs(f.at(y, k) - f.at(x0, k)));
    }
    return c;
}

cplx clip_profile(cplx z, double c) {
    if (c <= 0.0) return 0.0;
    const double s = std::abs(z) / c;
    return z * (1.0 - smooth_step(s - 1.0));
}

PDOperator clip_extend(const PDOperator& T, std::size_t x0, const Field& phi, double t) {
    require_same_grid(T.grid(), phi.grid(), "clip_extend");
    if (!(t > 0.0)) throw InvalidArgument("clip radius must be positive");
    const double ct = local_oscillation(T, x0, t);
    const int w = T.in_channels() * T.out_channels();
    PDOperator Q(T.grid(), T.order(), T.in_channels(), T.out_channels());
    for (const auto& [a, f] : T.coefficients()) {
        Field q(T.grid(), w);
        for (std::size_t p = 0; p < q.points(); ++p)
            for (int k = 0; k < w; ++k) {
                const cplx base = f.at(x0, k);
                q.at(p, k) = base + clip_profile(phi.at(p).real() * (f.at(p, k) - base), ct);
            }
        Q.set(a, std::move(q));
    }
    Q.set_degenerate_order(T.degenerate_order());
    return Q;
}

ClipChoice choose_clip_radius(const PDOperator& T, std::size_t x0, const Field& phi, double t_start, double theta0,
                              int sphere_samples, int max_halvings) {
    ClipChoice choice;
    choice.frozen = parameter_ellipticity_constant(T.frozen_at(x0), theta0, sphere_samples);
    if (!choice.frozen.ok) throw NotContracting("frozen-coefficient operator is not parameter-elliptic at x0");
    double t = t_start;
    for (int i = 0; i <= max_halvings; ++i, t *= 0.5) {
        PDOperator Q = clip_extend(T, x0, phi, t);
        const auto pe = parameter_ellipticity_constant(Q, theta0, sphere_samples);
        if (pe.ok && pe.C <= 2.0 * choice.frozen.C) {
            choice.t = t;
            choice.oscillation = local_oscillation(T, x0, t);
            choice.clipped = pe;
            choice.op = std::move(Q);
            return choice;
        }
    }
    throw NotContracting("no clip radius down to t_start/2^max_halvings keeps the extension parameter-elliptic");
}

} // namespace ellreg
