#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ellreg/grid.hpp"
#include "ellreg/pdo.hpp"

namespace ellreg {

/// Radial unit-mass bump supported in the closed unit ball.
class MollifierKernel {
public:
    enum class Profile {
        Bump,        ///< exp(-1 / (1 - |x|^2))
        Polynomial,  ///< (1 - |x|^2)^5, C^4 at the boundary
    };

    explicit MollifierKernel(Profile profile = Profile::Bump) : profile_(profile) {}
    static MollifierKernel from_name(const std::string& name);

    Profile profile() const { return profile_; }
    std::string name() const;
    /// Unnormalized profile value at radius r.
    double shape(double r) const;

    /// h_eps sampled at periodic distances from the origin, scaled to unit
    /// quadrature mass. Throws EpsilonOutOfRange unless 2h <= eps < L/4.
    Field dilate(const GridSpec& grid, double eps) const;

private:
    Profile profile_;
};

void require_resolvable(const GridSpec& grid, double eps);

/// f_eps = h_eps * f, computed spectrally.
Field mollify(const Field& f, double eps, const MollifierKernel& kernel = MollifierKernel());

/// eps0 = L/8 halved `terms - 1` times, truncated at the resolvability floor 2h.
std::vector<double> default_eps_sequence(const GridSpec& grid, int terms = 5);

struct ConvergenceTable {
    std::string norm_kind;  ///< "L1", "L2", ..., "Linf"
    double p = 2.0;
    Box window;
    std::vector<double> eps;
    std::vector<double> error;

    double first() const { return error.front(); }
    double last() const { return error.back(); }
    /// first error / last error
    double decay_factor() const;
    /// Fitted order log(e[n-3]/e[n-1]) / log(eps[n-3]/eps[n-1]) over the last two halvings.
    double observed_order() const;
    /// "converges" when the last error is at most a quarter of the first;
    /// "no-decay" when both finest errors stay at or above half the first;
    /// "inconclusive" otherwise.
    std::string verdict() const;
};

nlohmann::json to_json(const ConvergenceTable& t);

/// ||P(f_eps) - Pf||_{L^p(window)} for each eps. Pf is taken from
/// `reference` when given (a.e. values of a rough Pf), else apply(P, f).
ConvergenceTable mollifier_convergence_experiment(const PDOperator& P, const Field& f, double p,
                                                  const std::vector<double>& eps_seq, const Box& window,
                                                  const std::optional<Field>& reference = std::nullopt,
                                                  const MollifierKernel& kernel = MollifierKernel());

/// Same with the sup norm over the window.
ConvergenceTable uniform_convergence_experiment(const PDOperator& P, const Field& f, const std::vector<double>& eps_seq,
                                                const Box& window, const std::optional<Field>& reference = std::nullopt,
                                                const MollifierKernel& kernel = MollifierKernel());

} // namespace ellreg
