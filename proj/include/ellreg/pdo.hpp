#pragma once

#include <compare>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ellreg/grid.hpp"

namespace ellreg {

struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exps) : e(std::move(exps)) {}
    static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
    static MultiIndex unit(int dim, int axis, int power = 1);

    int dim() const { return static_cast<int>(e.size()); }
    int order() const;
    bool le(const MultiIndex& o) const;  ///< componentwise <=
    MultiIndex operator+(const MultiIndex& o) const;
    MultiIndex operator-(const MultiIndex& o) const;

    auto operator<=>(const MultiIndex&) const = default;
};

/// Every gamma <= alpha componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& alpha);
/// Every alpha in N^m with |alpha| <= order (or == order when exact).
std::vector<MultiIndex> all_indices(int dim, int order, bool exact = false);
/// Product of binomials prod_j C(alpha_j, gamma_j).
double binomial(const MultiIndex& alpha, const MultiIndex& gamma);

/// (i xi)^alpha
cplx monomial_symbol(const MultiIndex& alpha, std::span<const double> xi);

/// Linear differential operator sum_alpha P_alpha(x) d^alpha with matrix-valued
/// coefficient fields. A coefficient field has out*in channels holding the
/// row-major out x in matrix at each grid point.
class PDOperator {
public:
    PDOperator() = default;
    PDOperator(GridSpec grid, int order, int in_channels, int out_channels);

    /// Scalar constant-coefficient helpers.
    static PDOperator derivative(GridSpec grid, const MultiIndex& alpha, cplx scale = 1.0);
    static PDOperator laplacian(GridSpec grid, cplx scale = 1.0);
    static PDOperator multiplication(const Field& c);
    static PDOperator identity(GridSpec grid, int channels, cplx scale = 1.0);

    const GridSpec& grid() const { return grid_; }
    int order() const { return order_; }
    int in_channels() const { return in_; }
    int out_channels() const { return out_; }
    bool degenerate_order() const { return degenerate_; }
    void set_degenerate_order(bool d) { degenerate_ = d; }

    /// Replaces the coefficient of d^alpha.
    void set(const MultiIndex& alpha, Field coeff);
    void set_constant(const MultiIndex& alpha, const Eigen::MatrixXcd& m);
    /// Adds to the coefficient of d^alpha.
    void add(const MultiIndex& alpha, const Field& coeff);

    const std::map<MultiIndex, Field>& coefficients() const { return coeffs_; }
    bool has(const MultiIndex& alpha) const { return coeffs_.contains(alpha); }
    Field coefficient(const MultiIndex& alpha) const;
    Eigen::MatrixXcd coefficient_at(const MultiIndex& alpha, std::size_t point) const;

    bool constant_coefficients() const;
    PDOperator principal_part() const;
    PDOperator lower_order_part() const;
    /// Constant-coefficient operator Q(x0, d).
    PDOperator frozen_at(std::size_t point) const;

    /// Drops identically-zero coefficients and refreshes the degenerate flag.
    PDOperator& prune(double tol = 0.0);
    /// Throws InvalidArgument unless every stored |alpha| <= order and the
    /// top-order part is nonzero (or the operator is flagged degenerate).
    void validate() const;

    PDOperator& operator+=(const PDOperator& o);
    PDOperator& operator*=(cplx s);

private:
    GridSpec grid_;
    int order_ = 0;
    int in_ = 1;
    int out_ = 1;
    bool degenerate_ = false;
    std::map<MultiIndex, Field> coeffs_;
};

PDOperator operator+(PDOperator a, const PDOperator& b);
PDOperator operator-(PDOperator a, const PDOperator& b);

/// Pointwise matrix-field times vector-field product (rows x cols matrix).
Field matrix_apply(const Field& matrix, int rows, int cols, const Field& v);
/// Pointwise product of matrix fields A (a x b) and B (b x c).
Field matrix_product(const Field& A, int a, int b, const Field& B, int c);

/// sum_alpha P_alpha . d^alpha f, derivatives spectral.
Field apply(const PDOperator& P, const Field& f);

Eigen::MatrixXcd principal_symbol(const PDOperator& P, std::size_t point, std::span<const double> xi);
Eigen::MatrixXcd full_symbol(const PDOperator& P, std::size_t point, std::span<const double> xi);

/// Quasi-uniform unit frequencies: +-1 in one dimension, equispaced angles in
/// two, a Fibonacci lattice in three, a fixed pseudo-random set beyond.
std::vector<std::vector<double>> unit_directions(int dim, int count);
int default_sphere_samples(int dim);

/// min over grid points and sampled unit xi of sigma_min(sigma_P(x, i xi)).
double ellipticity_margin(const PDOperator& P, int sphere_samples = 0);

struct ParameterEllipticity {
    double C = 0.0;
    bool ok = false;
};

/// Least C with |(r^n e^{i theta0} - sigma_Q(x, i xi))^{-1}| <= C (r + |xi|)^{-n},
/// sampled on r^2 + |xi|^2 = 1 and over the grid points.
ParameterEllipticity parameter_ellipticity_constant(const PDOperator& Q, double theta0, int sphere_samples = 0);

PDOperator formal_adjoint(const PDOperator& P);
/// A o B
PDOperator compose(const PDOperator& A, const PDOperator& B);
/// P^dagger o P
PDOperator compose_TPdaggerP(const PDOperator& P);
/// [P, psi] = P(psi .) - psi P(.)
PDOperator commutator_with_cutoff(const PDOperator& P, const Field& psi);

/// max over |y - x0| <= t, alpha, entries of |T_alpha(y) - T_alpha(x0)|.
double local_oscillation(const PDOperator& T, std::size_t x0, double t);
/// Smooth radial retraction: identity for |z| <= c, modulus never above 2c.
cplx clip_profile(cplx z, double c);
/// Coefficients T(x0) + chi_t(phi (T - T(x0))).
PDOperator clip_extend(const PDOperator& T, std::size_t x0, const Field& phi, double t);

struct ClipChoice {
    double t = 0.0;
    double oscillation = 0.0;
    ParameterEllipticity clipped;
    ParameterEllipticity frozen;
    PDOperator op;
};

/// Halves t until the clipped operator is parameter-elliptic at theta0 with a
/// constant within 2x of the frozen-coefficient one.
ClipChoice choose_clip_radius(const PDOperator& T, std::size_t x0, const Field& phi, double t_start,
                              double theta0 = kPi, int sphere_samples = 0, int max_halvings = 20);

} // namespace ellreg
