#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ellreg/grid.hpp"
#include "ellreg/mollify.hpp"
#include "ellreg/pdo.hpp"

namespace ellreg {

/// Value and first three derivatives of the plateau window w at a point.
struct WindowJet {
    double w = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

/// Third-order operator A = -x d^3 + (x - 1) d^2 = (1 - d) o x o d^2 on a
/// one-dimensional grid, with the window phi(x) = x w(x) where w is a smooth
/// plateau equal to 1 on |x| <= a and 0 beyond 2a.
class ExampleAOperator {
public:
    explicit ExampleAOperator(GridSpec grid, double plateau_radius = 0.0);

    const GridSpec& grid() const { return grid_; }
    const PDOperator& op() const { return A_; }
    const Field& phi() const { return phi_; }
    double plateau_radius() const { return a_; }

    /// (1 - d)(x d^2 f), the factorized form of A.
    Field factorized_apply(const Field& f) const;

    WindowJet window(double x) const;

    // Closed forms for u = phi ln|x|. The singular node x = 0 takes the cell
    // average of ln|x| (ln(h/2) - 1) and the principal value of 1/x (zero).
    double u(double x) const;
    double du(double x, double h) const;
    double d2u(double x, double h) const;
    /// v = x d^2 u, continuous with v(0) = 1.
    double v(double x) const;
    double dv(double x, double h) const;

    /// Samples of one of the closed forms above on a grid of the same torus.
    Field sample(const GridSpec& grid, double (ExampleAOperator::*fn)(double) const) const;
    Field sample(const GridSpec& grid, double (ExampleAOperator::*fn)(double, double) const) const;

private:
    GridSpec grid_;
    double a_;
    PDOperator A_;
    Field phi_;
};

struct HardyReport {
    Field h;
    double h_norm = 0.0;
    double dg_norm = 0.0;
    double ratio = 0.0;  ///< ||h||_p / ||dg||_p
};

/// h(x) = (1/x) int_0^x dg, with h(0) = dg(0). The antiderivative is taken
/// spectrally, so it is exact for band-limited g.
HardyReport hardy_average(const Field& g, double p);

struct NondensityReport {
    double p = 2.0;
    double v0 = 0.0;                 ///< v(0), closed form
    std::vector<double> eps;
    std::vector<double> v_eps_at_0;  ///< x d^2 u_eps at x = 0
    std::vector<double> graph_error; ///< ||v_eps - v||_p + ||d v_eps - d v||_p
    std::vector<double> u_error;     ///< ||u_eps - u||_p
    std::vector<double> trace_ratio; ///< |w(0)| / ||w||_{W^{1,p}(0, a)} for w = v_eps - v
    double trace_constant = 0.0;     ///< C in |w(0)| <= C ||w||_{W^{1,p}(0, a)}
    double floor = 0.0;              ///< min graph error over the two finest eps
    double u_decay = 0.0;            ///< first / last u_error
    bool witnessed = false;          ///< floor >= 0.5 and u_decay >= 4
};

NondensityReport nondensity_witness(const ExampleAOperator& ex, double p, const std::vector<double>& eps_seq,
                                    const MollifierKernel& kernel = MollifierKernel());

struct InclusionLevel {
    int points = 0;
    double a0 = 0.0;                 ///< fitted Heaviside coefficient
    double constant = 0.0;           ///< fitted additive constant
    double fit_residual = 0.0;       ///< max misfit on the fit region
    double reconstruction_norm = 0.0;///< ||reconstructed du||_{L^p(window)}
    double w1p_norm = 0.0;           ///< ||du||_{L^p(window)} from the closed form
    double w2p_norm = 0.0;           ///< ||d^2 u||_{L^p(window)} from the closed form
};

struct InclusionReport {
    double p = 2.0;
    double window = 0.0;             ///< half width of the local window
    std::vector<InclusionLevel> levels;
    std::vector<double> w1p_growth;  ///< successive ratios of w1p_norm
    std::vector<double> w2p_growth;
    std::vector<double> reconstruction_growth;
    bool w1p_stable = false;         ///< every growth within 5%
    bool w2p_excluded = false;       ///< every w2p growth >= 1.5
};

/// Rebuilds du = g(0) ln|x| + int_0^x h + a0 H + C for u = phi ln|x| on the
/// refinement ladder grid.points * 2^i, i < levels, fitting (a0, C) by least
/// squares on |x| > L/4.
InclusionReport w1p_inclusion_check(const ExampleAOperator& ex, double p, int levels = 3);

struct ReconstructionFit {
    double a0 = 0.0, constant = 0.0, residual = 0.0;
    Field du;
};
/// Reconstruction for an arbitrary grid function u, using v = x d^2 u from
/// spectral derivatives and du as the fitting target.
ReconstructionFit reconstruct_derivative(const Field& u);

using Sampler = std::function<cplx(std::span<const double>)>;

struct GapTrajectory {
    std::string label;
    std::vector<int> points;
    std::vector<double> wkp, wk1_1, bk_1inf, pf_lp;
    bool wkp_stable = false, wk1_1_stable = false, bk_stable = false;
};

struct GapReport {
    int order = 0;
    double p = 1.0;
    std::vector<GapTrajectory> fields;
    bool verdict = false;
    std::string note;
};

nlohmann::json to_json(const GapReport& r);

/// Refinement trajectories of ||psi f||_{W^{k,p}}, ||psi f||_{W^{k-1,1}} and
/// ||psi f||_{B^k_{1,inf}} on grids with `base.points * 2^i` points. Stable
/// means at most 5% change per doubling over the last two doublings.
GapReport regularity_gap_experiment(const std::function<PDOperator(const GridSpec&)>& make_operator,
                                    const std::vector<std::pair<std::string, Sampler>>& corpus, double p,
                                    const GridSpec& base, int levels, const Sampler& cutoff);

/// |c_{i+1}/c_i - 1| <= tol for the last `count` steps.
bool refinement_stable(const std::vector<double>& values, double tol = 0.05, int count = 2);

} // namespace ellreg
