#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ellreg/besov.hpp"
#include "ellreg/pdo.hpp"

namespace ellreg {

/// r^n e^{i theta0} u - Q u = g with Q of order n on square channels.
struct ResolventProblem {
    PDOperator Q;
    double theta0 = kPi;
    double r = 1.0;
    Field g;

    /// r^n e^{i theta0}
    cplx spectral_parameter() const;
    void validate() const;
};

struct SolveReport {
    Field u;
    double residual_linf = 0.0;
    std::optional<double> apriori_ratio;
    int iterations = 0;
    std::optional<double> contraction_estimate;
    std::string method;
    std::vector<double> step_distances;  ///< L2 distance between successive iterates
};

nlohmann::json to_json(const SolveReport& s);

/// r^n e^{i theta0} u - Q u - g
Field resolvent_residual(const ResolventProblem& problem, const Field& u);

/// Inverts the full symbol mode by mode. When the full symbol is singular at
/// some lattice frequency but the principal one is not, the lower-order part
/// is handled by the Neumann iteration instead; otherwise throws
/// SingularSymbol naming the frequency.
SolveReport solve_constant(const ResolventProblem& problem);

/// h <- g + (Q - Q_n)(r^n e^{i theta0} - Q_n)^{-1} h, then u = (.. - Q_n)^{-1} h.
/// Needs constant principal coefficients. Throws NotContracting when the
/// contraction estimate is >= 1 after three steps.
SolveReport solve_neumann_lower_order(const ResolventProblem& problem, int max_iter = 500, double tol = 1e-11);

/// u <- (r^n e^{i theta0} - Q(x0, d))^{-1} (g + phi (Q - Q(x0, d)) u) with phi a
/// cutoff equal to 1 on the cube of radius delta about x0 and 0 beyond 2 delta.
/// The residual is reported on that cube. Throws SupportViolation when g is
/// not supported in the cube, NotContracting when the iteration does not contract.
SolveReport solve_frozen_localized(const ResolventProblem& problem, std::size_t x0, double delta, int max_iter = 500,
                                   double tol = 1e-11);

/// Cutoff used by solve_frozen_localized.
Field localization_cutoff(const GridSpec& grid, std::size_t x0, double delta);

/// Dispatches to the constant or Neumann solver.
SolveReport solve(const ResolventProblem& problem, int max_iter = 500, double tol = 1e-11);

struct AutoRadius {
    double r = 0.0;
    std::vector<double> tried;
    SolveReport report;
};

/// Doubles r from r_start until the solve no longer throws NotContracting
/// or SingularSymbol.
AutoRadius solve_auto_r(ResolventProblem problem, double r_start = 1.0, int max_doublings = 30, int max_iter = 500,
                        double tol = 1e-11);

/// (r^n ||u||_{B^beta} + ||u||_{B^{beta+n}}) / ||g||_{B^beta}
double apriori_ratio(const Field& u, const Field& g, const PDOperator& Q, double r, double theta0,
                     const BesovParams& base);
/// ||u||_{B^{beta + theta n}} r^{(1 - theta) n} / ||g||_{B^beta}
double apriori_ratio_interpolated(const Field& u, const Field& g, const PDOperator& Q, double r, double theta0,
                                  const BesovParams& base, double theta);

} // namespace ellreg
