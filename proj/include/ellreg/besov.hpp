#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ellreg/grid.hpp"

namespace ellreg {

/// A point (alpha, p, q) of the Besov scale; p and q may be kInf.
struct BesovParams {
    double alpha = 1.0;
    double p = 2.0;
    double q = kInf;
};

/// Spectral multiplication by (1 + |xi|^2)^{-gamma/2}; gamma > 0 smooths.
Field bessel_lift(double gamma, const Field& f);

/// Largest integer strictly below alpha (so integer alpha = k maps to k - 1).
int integer_part_below(double alpha);

/// Displacements used by the second-difference functional: dyadic radii
/// (L/2) 2^{-j} down to the grid spacing, along a fixed direction set (2 in one
/// dimension, 8 in two, a quasi-uniform set beyond). Because the second
/// difference is even in the displacement, only one of each +-pair is kept.
struct DisplacementSet {
    std::vector<double> radii;
    std::vector<std::vector<double>> directions;
    double sphere_area = 2.0;  ///< |S^{m-1}|

    static DisplacementSet for_grid(const GridSpec& grid);
};

/// || f(. + x) - 2 f + f(. - x) ||_p for each displacement x, computed from
/// the spectrum of f. Entry [j * directions + d] holds radius j, direction d.
std::vector<double> second_difference_norms(const SpectralField& F, const DisplacementSet& set, double p);

namespace serial {
std::vector<double> second_difference_norms(const SpectralField& F, const DisplacementSet& set, double p);
}

/// Second-difference functional of order s in (0, 2): the q-th-power
/// integral over displacements weighted by |x|^{-m - s q}, or the weighted
/// sup when q = kInf.
double second_difference_seminorm(const Field& f, double s, double p, double q);

/// sum over |beta| <= k of ||d^beta f||_p
double sobolev_norm(const Field& f, int k, double p);
double sobolev_norm(const Field& f, int k, double p, const Box& window);

/// Besov norm on the whole scale:
///   0 < alpha <= 1: ||f||_p + seminorm(f, alpha)
///   alpha > 1:      W^{[alpha],p} norm + sum_{|beta|=[alpha]} seminorm(d^beta f, alpha - [alpha])
///   alpha <= 0:     B^1_{p,q} norm of bessel_lift(1 - alpha, f)
double besov_norm(const Field& f, const BesovParams& params);

/// Matrix-valued Fourier multiplier a(xi) of growth degree n.
struct MultiplierSpec {
    std::function<Eigen::MatrixXcd(std::span<const double>)> symbol;
    double degree = 0.0;
    int rows = 1;
    int cols = 1;
};

/// Applies a(xi) to every lattice coefficient. Throws SingularMultiplier when
/// a is not finite at some lattice frequency.
Field fourier_multiplier(const MultiplierSpec& spec, const Field& f);

/// max over lattice xi of |a(xi)| / (1 + |xi|)^degree.
double multiplier_growth_constant(const MultiplierSpec& spec, const GridSpec& grid);

struct ProductEstimate {
    double lhs = 0.0;          ///< ||a f||_{B^beta}
    double leading = 0.0;      ///< ||a||_inf ||f||_{B^beta}
    double correction = 0.0;   ///< ||a||_{W^{N,inf}} ||f||_{B^{beta-1}}
    double ratio = 0.0;        ///< lhs / (leading + correction)
    double constant = 0.0;
    bool holds = false;        ///< ratio <= constant
};

/// Evaluates both sides of the product estimate for a smooth scalar a.
ProductEstimate product_estimate_check(const Field& a, const Field& f, const BesovParams& params,
                                       double constant = 32.0, int derivatives = 4);

} // namespace ellreg
