#include "ellreg/resolvent.hpp"

#include <cmath>
#include <sstream>

#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"

namespace ellreg {

cplx ResolventProblem::spectral_parameter() const { return std::pow(r, Q.order()) * std::polar(1.0, theta0); }

void ResolventProblem::validate() const {
    if (Q.in_channels() != Q.out_channels()) throw ChannelMismatch("resolvent problems need a square system");
    if (g.channels() != Q.in_channels()) throw ChannelMismatch("right-hand side channel count does not match Q");
    require_same_grid(Q.grid(), g.grid(), "ResolventProblem");
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("r must be a finite nonnegative number");
    if (!std::isfinite(theta0)) throw InvalidArgument("theta0 must be finite");
}

nlohmann::json to_json(const SolveReport& s) {
    nlohmann::json j = {{"method", s.method},
                        {"residual_linf", s.residual_linf},
                        {"iterations", s.iterations},
                        {"u_l2", lp_norm(s.u, 2.0)},
                        {"u_linf", lp_norm(s.u, kInf)},
                        {"step_distances", s.step_distances}};
    j["apriori_ratio"] = s.apriori_ratio ? nlohmann::json(*s.apriori_ratio) : nlohmann::json(nullptr);
    j["contraction_estimate"] = s.contraction_estimate ? nlohmann::json(*s.contraction_estimate) : nlohmann::json(nullptr);
    return j;
}

Field resolvent_residual(const ResolventProblem& problem, const Field& u) {
    Field res = problem.spectral_parameter() * u;
    res -= apply(problem.Q, u);
    res -= problem.g;
    return res;
}

namespace {

struct ConstantSymbol {
    std::vector<MultiIndex> alphas;
    std::vector<Eigen::MatrixXcd> coeffs;
    int channels = 1;

    explicit ConstantSymbol(const PDOperator& S) : channels(S.in_channels()) {
        for (const auto& [a, c] : S.coefficients()) {
            if (!c.is_constant()) throw InvalidArgument("symbol inversion needs constant coefficients");
            alphas.push_back(a);
            coeffs.push_back(S.coefficient_at(a, 0));
        }
    }

    Eigen::MatrixXcd at(std::span<const double> xi) const {
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(channels, channels);
        for (std::size_t t = 0; t < alphas.size(); ++t) s += coeffs[t] * monomial_symbol(alphas[t], xi);
        return s;
    }
};

std::string describe_frequency(std::span<const double> xi) {
    std::ostringstream os;
    os << "(";
    for (std::size_t a = 0; a < xi.size(); ++a) os << (a ? ", " : "") << xi[a];
    os << ")";
    return os.str();
}

bool invertible(const Eigen::MatrixXcd& M) {
    const double scale = 1.0 + M.cwiseAbs().maxCoeff();
    if (M.size() == 1) return std::abs(M(0, 0)) > 1e-12 * scale;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(M.rows() - 1) > 1e-12 * scale;
}

/// (z - S(xi))^{-1} applied mode by mode. Returns the flat index of the first
/// singular mode, or size() when every mode inverted.
std::size_t invert_modes(const ConstantSymbol& S, cplx z, const SpectralField& G, SpectralField& out) {
    const GridSpec& grid = G.grid();
    const int l = S.channels;
    out = SpectralField(grid, l);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    std::ptrdiff_t bad = n;
#pragma omp parallel for schedule(static) reduction(min : bad)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto xi = grid.frequency_vector(static_cast<std::size_t>(i));
        const Eigen::MatrixXcd M = z * Eigen::MatrixXcd::Identity(l, l) - S.at(xi);
        if (!invertible(M)) {
            bad = std::min(bad, i);
            continue;
        }
        if (l == 1) {
            out.at(i) = G.at(i) / M(0, 0);
            continue;
        }
        Eigen::VectorXcd v(l);
        for (int c = 0; c < l; ++c) v(c) = G.at(i, c);
        const Eigen::VectorXcd w = M.fullPivLu().solve(v);
        for (int c = 0; c < l; ++c) out.at(i, c) = w(c);
    }
    return static_cast<std::size_t>(bad);
}

Field apply_resolvent(const ConstantSymbol& S, cplx z, const Field& g, std::size_t* bad_mode = nullptr) {
    SpectralField U;
    const std::size_t bad = invert_modes(S, z, dft(g), U);
    if (bad != g.grid().size()) {
        if (bad_mode) {
            *bad_mode = bad;
            return Field();
        }
        throw SingularSymbol("resolvent symbol is singular at lattice frequency " +
                             describe_frequency(g.grid().frequency_vector(bad)));
    }
    return idft(U);
}

/// max over lattice xi of the operator norm of L(xi) (z - P(xi))^{-1}.
double multiplier_norm(const ConstantSymbol& lower, const ConstantSymbol& principal, cplx z, const GridSpec& grid) {
    const int l = principal.channels;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto xi = grid.frequency_vector(i);
        const Eigen::MatrixXcd M = z * Eigen::MatrixXcd::Identity(l, l) - principal.at(xi);
        const Eigen::MatrixXcd K = lower.at(xi) * M.inverse();
        const double nrm = l == 1 ? std::abs(K(0, 0)) : Eigen::JacobiSVD<Eigen::MatrixXcd>(K).singularValues()(0);
        worst = std::max(worst, nrm);
    }
    return worst;
}

double ratio_estimate(const std::vector<double>& d) {
    double worst = 0.0;
    for (std::size_t j = 1; j < d.size(); ++j)
        if (d[j - 1] > 0.0) worst = std::max(worst, d[j] / d[j - 1]);
    return worst;
}

} // namespace

SolveReport solve_constant(const ResolventProblem& problem) {
    problem.validate();
    if (!problem.Q.constant_coefficients()) throw InvalidArgument("solve_constant needs constant coefficients");
    const ConstantSymbol full(problem.Q);
    std::size_t bad = problem.g.grid().size();
    Field u = apply_resolvent(full, problem.spectral_parameter(), problem.g, &bad);
    if (bad != problem.g.grid().size()) {
        // Full symbol singular somewhere: fall back on the principal part if that inverts.
        SpectralField scratch;
        const std::size_t pbad =
            invert_modes(ConstantSymbol(problem.Q.principal_part()), problem.spectral_parameter(), dft(problem.g), scratch);
        if (pbad != problem.g.grid().size())
            throw SingularSymbol("resolvent symbol is singular at lattice frequency " +
                                 describe_frequency(problem.g.grid().frequency_vector(bad)));
        return solve_neumann_lower_order(problem);
    }
    SolveReport rep;
    rep.method = "constant";
    rep.residual_linf = lp_norm(resolvent_residual(problem, u), kInf);
    rep.u = std::move(u);
    return rep;
}

SolveReport solve_neumann_lower_order(const ResolventProblem& problem, int max_iter, double tol) {
    problem.validate();
    const PDOperator principal = problem.Q.principal_part();
    if (!principal.constant_coefficients())
        throw InvalidArgument("Neumann iteration needs a constant-coefficient principal part");
    const PDOperator lower = problem.Q.lower_order_part();
    const ConstantSymbol Sn(principal);
    const cplx z = problem.spectral_parameter();

    std::optional<double> exact;
    if (lower.constant_coefficients()) exact = multiplier_norm(ConstantSymbol(lower), Sn, z, problem.g.grid());

    SolveReport rep;
    rep.method = "neumann";
    Field h = problem.g;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        Field next = problem.g;
        if (!lower.coefficients().empty()) next += apply(lower, apply_resolvent(Sn, z, h));
        Field diff = next - h;
        rep.step_distances.push_back(lp_norm(diff, 2.0));
        h = std::move(next);
        rep.iterations = it;
        const double c = std::max(ratio_estimate(rep.step_distances), exact.value_or(0.0));
        rep.contraction_estimate = c;
        if (rep.step_distances.back() <= tol) {
            converged = true;
            break;
        }
        if (it >= 3 && c >= 1.0) {
            std::ostringstream os;
            os << "Neumann iteration does not contract at r = " << problem.r << " (estimate " << c << ")";
            throw NotContracting(os.str());
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "Neumann iteration did not reach tol " << tol << " in " << max_iter << " steps";
        throw NotContracting(os.str());
    }
    rep.u = apply_resolvent(Sn, z, h);
    rep.residual_linf = lp_norm(resolvent_residual(problem, rep.u), kInf);
    return rep;
}

Field localization_cutoff(const GridSpec& grid, std::size_t x0, double delta) {
    const auto c = grid.point(x0);
    return Field::sample(grid, [&](std::span<const double> x) {
        double v = 1.0;
        for (int a = 0; a < grid.dim; ++a) v *= plateau(std::remainder(x[a] - c[a], 2.0 * grid.half_period), delta, 2.0 * delta);
        return cplx(v);
    });
}

SolveReport solve_frozen_localized(const ResolventProblem& problem, std::size_t x0, double delta, int max_iter,
                                   double tol) {
    problem.validate();
    const GridSpec& grid = problem.g.grid();
    if (!(delta > 0.0) || 2.0 * delta >= grid.half_period) throw InvalidArgument("delta must lie in (0, L/2)");
    const auto centre = grid.point(x0);
    const Box cube = Box::cube_around(centre, delta);

    double inside = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double m = 0.0;
        for (int c = 0; c < problem.g.channels(); ++c) m = std::max(m, std::abs(problem.g.at(i, c)));
        double& slot = cube.contains_periodic(grid.point(i), grid.half_period) ? inside : outside;
        slot = std::max(slot, m);
    }
    if (outside > 1e-10 * inside)
        throw SupportViolation("right-hand side is not supported in the cube of radius delta about x0");

    const PDOperator frozen = problem.Q.frozen_at(x0);
    const PDOperator variation = problem.Q - frozen;
    const Field phi = localization_cutoff(grid, x0, delta);
    const ConstantSymbol S0(frozen);
    const cplx z = problem.spectral_parameter();

    SolveReport rep;
    rep.method = "frozen-localized";
    Field u = apply_resolvent(S0, z, problem.g);
    bool converged = variation.coefficients().empty();
    for (int it = 1; it <= max_iter && !converged; ++it) {
        Field rhs = problem.g + apply(variation, u).times(phi);
        Field next = apply_resolvent(S0, z, rhs);
        rep.step_distances.push_back(lp_norm(next - u, 2.0));
        u = std::move(next);
        rep.iterations = it;
        const double c = ratio_estimate(rep.step_distances);
        rep.contraction_estimate = c;
        if (rep.step_distances.back() <= tol) {
            converged = true;
            break;
        }
        if (it >= 3 && c >= 1.0) {
            std::ostringstream os;
            os << "frozen-coefficient iteration does not contract (delta = " << delta << ", r = " << problem.r
               << ", estimate " << c << ")";
            throw NotContracting(os.str());
        }
    }
    if (!converged) throw NotContracting("frozen-coefficient iteration did not reach the tolerance");

    const Field res = resolvent_residual(problem, u);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!cube.contains_periodic(grid.point(i), grid.half_period)) continue;
        double m = 0.0;
        for (int c = 0; c < res.channels(); ++c) m += std::norm(res.at(i, c));
        worst = std::max(worst, std::sqrt(m));
    }
    rep.residual_linf = worst;
    rep.u = std::move(u);
    return rep;
}

SolveReport solve(const ResolventProblem& problem, int max_iter, double tol) {
    if (problem.Q.constant_coefficients()) return solve_constant(problem);
    return solve_neumann_lower_order(problem, max_iter, tol);
}

AutoRadius solve_auto_r(ResolventProblem problem, double r_start, int max_doublings, int max_iter, double tol) {
    if (!(r_start > 0.0)) throw InvalidArgument("r_start must be positive");
    AutoRadius out;
    problem.r = r_start;
    for (int k = 0; k <= max_doublings; ++k, problem.r *= 2.0) {
        out.tried.push_back(problem.r);
        try {
            out.report = solve(problem, max_iter, tol);
            out.r = problem.r;
            return out;
        } catch (const NotContracting&) {
        } catch (const SingularSymbol&) {
        }
    }
    throw NotContracting("no r up to r_start * 2^max_doublings makes the solve contract");
}

double apriori_ratio(const Field& u, const Field& g, const PDOperator& Q, double r, double /*theta0*/,
                     const BesovParams& base) {
    const double gn = besov_norm(g, base);
    if (!(gn > 0.0)) throw ZeroRHS("a-priori ratio undefined for a zero right-hand side");
    const int n = Q.order();
    BesovParams top = base;
    top.alpha += n;
    return (std::pow(r, n) * besov_norm(u, base) + besov_norm(u, top)) / gn;
}

double apriori_ratio_interpolated(const Field& u, const Field& g, const PDOperator& Q, double r, double /*theta0*/,
                                  const BesovParams& base, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
    const double gn = besov_norm(g, base);
    if (!(gn > 0.0)) throw ZeroRHS("a-priori ratio undefined for a zero right-hand side");
    const int n = Q.order();
    BesovParams mid = base;
    mid.alpha += theta * n;
    return besov_norm(u, mid) * std::pow(r, (1.0 - theta) * n) / gn;
}

} // namespace ellreg
