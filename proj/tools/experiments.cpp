#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ellreg/besov.hpp"
#include "ellreg/cases.hpp"
#include "ellreg/casework.hpp"
#include "ellreg/field_io.hpp"
#include "ellreg/fixtures.hpp"
#include "ellreg/localize.hpp"
#include "ellreg/mollify.hpp"
#include "ellreg/operator_io.hpp"
#include "ellreg/resolvent.hpp"
#include "ellreg/rng.hpp"

namespace ellreg::cli {

using nlohmann::json;

namespace {

std::string p_label(double p) { return std::isinf(p) ? "inf" : format_number(p); }

void require_dim(const ExperimentConfig& c, int lo, int hi) {
    if (c.grid.dim < lo || c.grid.dim > hi)
        throw ConfigError(c.kind + ": grid.dim must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

ParamReader reader(const ExperimentConfig& c) {
    return ParamReader(c.parameters, find_experiment(c.kind).default_parameters, "parameters");
}

double relative_change(double a, double b) { return std::abs(b / a - 1.0); }

std::pair<double, double> extend(std::pair<double, double> range, double v) {
    return {std::min(range.first, v), std::max(range.second, v)};
}

constexpr std::pair<double, double> kEmptyRange{kInf, -kInf};

json range_json(std::pair<double, double> r) { return {{"min", number(r.first)}, {"max", number(r.second)}}; }

// ---------------------------------------------------------------- operators

const std::vector<std::string> kBuiltinOperators{"minus-laplacian", "minus-laplacian-plus-one", "minus-d2-plus-d"};

/// A builtin name, an inline operator description or a path to one.
std::function<PDOperator(const GridSpec&)> operator_source(const json& j, const ExperimentConfig& c) {
    if (j.is_object()) {
        const json doc = j;
        const auto base = c.base_dir;
        try {
            io::operator_from_json(doc, c.grid, base);
        } catch (const ellreg::Error& e) {
            throw ConfigError(std::string("parameters.operator: ") + e.what());
        }
        return [doc, base](const GridSpec& g) { return io::operator_from_json(doc, g, base); };
    }
    if (!j.is_string()) throw ConfigError("parameters.operator: expected a name, a description or a file path");
    const std::string name = j.get<std::string>();
    if (name == "minus-laplacian") return [](const GridSpec& g) { return PDOperator::laplacian(g, -1.0); };
    if (name == "minus-laplacian-plus-one")
        return [](const GridSpec& g) {
            return PDOperator::laplacian(g, -1.0) + PDOperator::identity(g, 1);
        };
    if (name == "minus-d2-plus-d") {
        if (c.grid.dim != 1) throw ConfigError("parameters.operator: minus-d2-plus-d is one-dimensional");
        return [](const GridSpec& g) {
            return PDOperator::derivative(g, MultiIndex({2}), -1.0) + PDOperator::derivative(g, MultiIndex({1}));
        };
    }
    const auto path = c.base_dir / name;
    try {
        io::load_operator(path, c.grid);
    } catch (const ellreg::Error& e) {
        throw ConfigError("parameters.operator: " + std::string(e.what()));
    }
    return [path](const GridSpec& g) { return io::load_operator(path, g); };
}

// ---------------------------------------------------------------- mollify-convergence

Runner prepare_mollify(const ExperimentConfig& c) {
    require_dim(c, 1, 1);
    const auto P = reader(c);
    const auto fixtures = P.choices("fixtures", convergence_case_names());
    const auto ps = P.exponents("p");
    const int terms = P.integer("eps_terms", 3, 12);
    const auto kernel = P.choice("kernel", {"bump", "polynomial"});
    const double fraction = P.number("window_fraction", 1e-3, 0.25);
    const GridSpec grid = c.grid;
    return [=] {
        Artifacts a;
        const auto eps = guarded("default_eps_sequence", [&] { return default_eps_sequence(grid, terms); });
        if (eps.size() < 3) throw ExperimentError("default_eps_sequence", "EpsilonOutOfRange", "fewer than three resolvable eps on this grid");
        const Box window = Box::cube(1, fraction * grid.half_period);
        const MollifierKernel k = MollifierKernel::from_name(kernel);
        Table rows("convergence", {"fixture", "p", "eps", "error"});
        Table summary("summary", {"fixture", "p", "first", "last", "decay_factor", "observed_order", "verdict", "expected", "pass"});
        json cases = json::array();
        bool all_pass = true;
        for (const auto& name : fixtures) {
            const auto fx = guarded("convergence_case", [&] { return convergence_case(name, grid); });
            for (double p : ps) {
                const auto t = guarded("mollifier_convergence_experiment", [&] {
                    return mollifier_convergence_experiment(fx.P, fx.f, p, eps, window, fx.reference, k);
                });
                const bool rough = name == "order-2-rough";
                const bool pass = rough ? t.last() >= 0.5 * t.first() : t.last() <= 0.25 * t.first();
                all_pass = all_pass && pass;
                Series s{name + "-p" + p_label(p), "eps", "error", {}};
                for (std::size_t i = 0; i < eps.size(); ++i) {
                    rows.add({name, p_label(p), eps[i], t.error[i]});
                    s.points.emplace_back(eps[i], t.error[i]);
                }
                a.series.push_back(std::move(s));
                const std::string expected = rough ? "no-decay" : "converges";
                summary.add({name, p_label(p), t.first(), t.last(), t.decay_factor(), t.observed_order(), t.verdict(),
                             expected, pass});
                cases.push_back({{"fixture", name},
                                 {"label", fx.label},
                                 {"p", exponent_to_json(p)},
                                 {"error", numbers(t.error)},
                                 {"decay_factor", number(t.decay_factor())},
                                 {"observed_order", number(t.observed_order())},
                                 {"verdict", t.verdict()},
                                 {"expected", expected},
                                 {"pass", pass}});
            }
        }
        a.results = {{"eps", numbers(eps)},
                     {"window_radius", number(fraction * grid.half_period)},
                     {"kernel", kernel},
                     {"cases", cases},
                     {"all_pass", all_pass}};
        a.tables.push_back(std::move(rows));
        a.tables.push_back(std::move(summary));
        return a;
    };
}

// ---------------------------------------------------------------- uniform-convergence

Runner prepare_uniform(const ExperimentConfig& c) {
    require_dim(c, 1, 2);
    const auto P = reader(c);
    const auto ops = P.choices("operators", {"identity", "laplacian"});
    const int terms = P.integer("eps_terms", 3, 12);
    const auto kernel = P.choice("kernel", {"bump", "polynomial"});
    const double fraction = P.number("window_fraction", 1e-3, 0.25);
    const double min_order = P.number("min_order", 0.0, 10.0);
    const GridSpec grid = c.grid;
    return [=] {
        Artifacts a;
        const auto eps = guarded("default_eps_sequence", [&] { return default_eps_sequence(grid, terms); });
        if (eps.size() < 3) throw ExperimentError("default_eps_sequence", "EpsilonOutOfRange", "fewer than three resolvable eps on this grid");
        const Field f = guarded("windowed_quartic", [&] { return windowed_quartic(grid); });
        const Box window = Box::cube(grid.dim, fraction * grid.half_period);
        const MollifierKernel k = MollifierKernel::from_name(kernel);
        Table rows("convergence", {"operator", "eps", "sup_error"});
        json cases = json::array();
        bool all_pass = true;
        for (const auto& name : ops) {
            const PDOperator op = name == "identity" ? PDOperator::identity(grid, 1) : PDOperator::laplacian(grid);
            const auto t = guarded("uniform_convergence_experiment",
                                   [&] { return uniform_convergence_experiment(op, f, eps, window, std::nullopt, k); });
            const bool pass = t.observed_order() >= min_order;
            all_pass = all_pass && pass;
            Series s{name, "eps", "sup_error", {}};
            for (std::size_t i = 0; i < eps.size(); ++i) {
                rows.add({name, eps[i], t.error[i]});
                s.points.emplace_back(eps[i], t.error[i]);
            }
            a.series.push_back(std::move(s));
            cases.push_back({{"operator", name},
                             {"error", numbers(t.error)},
                             {"observed_order", number(t.observed_order())},
                             {"pass", pass}});
        }
        a.results = {{"eps", numbers(eps)}, {"fixture", "windowed quartic"}, {"min_order", min_order},
                     {"cases", cases}, {"all_pass", all_pass}};
        a.tables.push_back(std::move(rows));
        return a;
    };
}

// ---------------------------------------------------------------- resolvent-solve

BesovParams besov_from(const json& j) {
    ParamReader b(j, {{"beta", 0.0}, {"p", 2.0}, {"q", 2.0}}, "parameters.besov");
    return {b.number("beta", -10.0, 10.0), exponent(b.raw("p"), "parameters.besov.p"),
            exponent(b.raw("q"), "parameters.besov.q")};
}

Runner prepare_resolvent(const ExperimentConfig& c) {
    const auto P = reader(c);
    const auto make_op = operator_source(P.raw("operator"), c);
    const double theta0 = P.number("theta0", -kPi, kPi);
    const json& rj = P.raw("r");
    const bool auto_r = rj.is_string() && rj.get<std::string>() == "auto";
    const double r = auto_r ? 1.0 : P.number("r", 1e-12, 1e12);
    const auto method = P.choice("method", {"auto", "constant", "neumann", "frozen-localized"});
    if (auto_r && method != "auto") throw ConfigError("parameters.r: \"auto\" requires method \"auto\"");
    const double delta = P.number("delta", 1e-6, c.grid.half_period / 2.0);
    const int modes = P.integer("g_modes", 0, c.grid.points / 2 - 1);
    const BesovParams besov = besov_from(P.raw("besov"));
    const int max_iter = P.integer("max_iter", 1, 100000);
    const double tol = P.number("tol", 0.0, 1.0);
    const std::string g_source = P.text("g");
    std::optional<Field> g_file;
    if (g_source != "random") {
        try {
            g_file = io::load(c.base_dir / g_source);
        } catch (const ellreg::Error& e) {
            throw ConfigError("parameters.g: " + std::string(e.what()));
        }
        if (!(g_file->grid() == c.grid)) throw ConfigError("parameters.g: field grid differs from the config grid");
    }
    const GridSpec grid = c.grid;
    const std::uint64_t seed = c.seed;
    return [=] {
        Artifacts a;
        ResolventProblem problem;
        problem.Q = guarded("operator", [&] { return make_op(grid); });
        problem.theta0 = theta0;
        problem.r = r;
        if (g_file) {
            problem.g = *g_file;
        } else {
            Rng rng(seed);
            problem.g = guarded("random_low_modes",
                                [&] { return random_low_modes(grid, problem.Q.in_channels(), modes, rng); });
            if (method == "frozen-localized") problem.g = problem.g.times(radial_window(grid, delta / 2.0, delta));
        }
        SolveReport report;
        json auto_info = nullptr;
        double r_used = r;
        if (auto_r) {
            const auto found = guarded("solve_auto_r", [&] { return solve_auto_r(problem, 1.0, 30, max_iter, tol); });
            report = found.report;
            r_used = found.r;
            auto_info = {{"r", found.r}, {"tried", numbers(found.tried)}};
            problem.r = found.r;
        } else if (method == "auto") {
            report = guarded("solve", [&] { return solve(problem, max_iter, tol); });
        } else if (method == "constant") {
            report = guarded("solve_constant", [&] { return solve_constant(problem); });
        } else if (method == "neumann") {
            report = guarded("solve_neumann_lower_order",
                             [&] { return solve_neumann_lower_order(problem, max_iter, tol); });
        } else {
            report = guarded("solve_frozen_localized", [&] {
                return solve_frozen_localized(problem, grid.origin_index(), delta, max_iter, tol);
            });
        }
        const double ratio = guarded("apriori_ratio", [&] {
            return apriori_ratio(report.u, problem.g, problem.Q, r_used, theta0, besov);
        });
        const double g_sup = lp_norm(problem.g, kInf);
        const double bound = 1e-9 * (1.0 + g_sup);
        Table steps("iterations", {"iteration", "step_distance"});
        Series s{"step-distances", "iteration", "step_distance", {}};
        for (std::size_t i = 0; i < report.step_distances.size(); ++i) {
            steps.add({static_cast<long long>(i + 1), report.step_distances[i]});
            s.points.emplace_back(double(i + 1), report.step_distances[i]);
        }
        a.results = {{"report", to_json(report)},
                     {"r", r_used},
                     {"auto_r", auto_info},
                     {"g_linf", g_sup},
                     {"besov", {{"beta", besov.alpha}, {"p", exponent_to_json(besov.p)}, {"q", exponent_to_json(besov.q)}}},
                     {"apriori_ratio", number(ratio)},
                     {"residual_bound", bound},
                     {"residual_ok", report.residual_linf <= bound}};
        a.tables.push_back(std::move(steps));
        a.series.push_back(std::move(s));
        return a;
    };
}

// ---------------------------------------------------------------- apriori-sweep

struct PQ {
    double p, q;
};

std::vector<PQ> pq_pairs(const ParamReader& P) {
    const json& j = P.raw("pq");
    if (!j.is_array() || j.empty()) throw ConfigError("parameters.pq: expected a nonempty array of [p, q] pairs");
    std::vector<PQ> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "parameters.pq[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2) throw ConfigError(where + ": expected [p, q]");
        out.push_back({exponent(j[i][0], where), exponent(j[i][1], where)});
    }
    return out;
}

Runner prepare_apriori(const ExperimentConfig& c) {
    require_dim(c, 1, 2);
    const auto P = reader(c);
    const int problems = P.integer("problems", 1, 10000);
    const auto radii = P.numbers("radii");
    for (double r : radii)
        if (!(r > 0)) throw ConfigError("parameters.radii: radii must be positive");
    const auto betas = P.numbers("betas");
    const auto pairs = pq_pairs(P);
    const int modes = P.integer("g_modes", 0, c.grid.points / 2 - 1);
    const bool refine = P.flag("refine");
    const double max_change = P.number("max_change", 0.0, 10.0);
    const GridSpec grid = c.grid;
    const std::uint64_t seed = c.seed;
    return [=] {
        Artifacts a;
        std::vector<GridSpec> grids{grid};
        if (refine) grids.push_back(grid.refined());
        // constants[grid][beta][pair]
        std::vector<std::vector<std::vector<double>>> C0(
            grids.size(), std::vector<std::vector<double>>(betas.size(), std::vector<double>(pairs.size(), 0.0)));
        Table per_problem("problems", {"points", "problem", "r", "residual_linf", "residual_bound"});
        double worst_residual_margin = 0.0;
        const Rng root(seed);
        for (std::size_t gi = 0; gi < grids.size(); ++gi) {
            const GridSpec& g = grids[gi];
            const PDOperator Q = PDOperator::laplacian(g, -1.0);
            for (int i = 0; i < problems; ++i) {
                Rng rng = root.split(static_cast<std::uint64_t>(i));
                ResolventProblem pr{Q, kPi, radii[i % radii.size()],
                                    guarded("random_low_modes", [&] { return random_low_modes(g, 1, modes, rng); })};
                const auto rep = guarded("solve_constant", [&] { return solve_constant(pr); });
                const double bound = 1e-9 * (1.0 + lp_norm(pr.g, kInf));
                worst_residual_margin = std::max(worst_residual_margin, rep.residual_linf / bound);
                per_problem.add({static_cast<long long>(g.points), static_cast<long long>(i), pr.r, rep.residual_linf, bound});
                for (std::size_t b = 0; b < betas.size(); ++b)
                    for (std::size_t k = 0; k < pairs.size(); ++k) {
                        const double ratio = guarded("apriori_ratio", [&] {
                            return apriori_ratio(rep.u, pr.g, Q, pr.r, kPi, {betas[b], pairs[k].p, pairs[k].q});
                        });
                        C0[gi][b][k] = std::max(C0[gi][b][k], ratio);
                    }
            }
        }
        Table constants("constants", {"beta", "p", "q", "C0", "C0_refined", "relative_change", "stable"});
        json rows = json::array();
        double overall = 0.0, overall_refined = 0.0;
        bool stable = true;
        for (std::size_t b = 0; b < betas.size(); ++b)
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const double c0 = C0[0][b][k];
                const double c1 = refine ? C0[1][b][k] : c0;
                const double change = relative_change(c0, c1);
                const bool ok = change <= max_change;
                stable = stable && ok;
                overall = std::max(overall, c0);
                overall_refined = std::max(overall_refined, c1);
                constants.add({betas[b], p_label(pairs[k].p), p_label(pairs[k].q), c0, c1, change, ok});
                rows.push_back({{"beta", betas[b]},
                                {"p", exponent_to_json(pairs[k].p)},
                                {"q", exponent_to_json(pairs[k].q)},
                                {"C0", number(c0)},
                                {"C0_refined", number(c1)},
                                {"relative_change", number(change)},
                                {"stable", ok}});
            }
        a.results = {{"operator", "minus-laplacian"},
                     {"theta0", kPi},
                     {"problems", problems},
                     {"points", refine ? json{grid.points, 2 * grid.points} : json{grid.points}},
                     {"C0", number(overall)},
                     {"C0_refined", number(overall_refined)},
                     {"C0_relative_change", number(relative_change(overall, overall_refined))},
                     {"constants", rows},
                     {"stable", stable},
                     {"worst_residual_over_bound", number(worst_residual_margin)},
                     {"residuals_ok", worst_residual_margin <= 1.0}};
        a.tables.push_back(std::move(per_problem));
        a.tables.push_back(std::move(constants));
        return a;
    };
}

// ---------------------------------------------------------------- besov-norm

const std::vector<std::string> kBuiltinFields{"mode", "triangle", "random"};

Runner prepare_besov(const ExperimentConfig& c) {
    const auto P = reader(c);
    const std::string source = P.text("field");
    const int wavenumber = P.integer("wavenumber", -c.grid.points / 2 + 1, c.grid.points / 2 - 1);
    const int modes = P.integer("g_modes", 0, c.grid.points / 2 - 1);
    const auto alphas = P.numbers("alphas");
    const auto ps = P.exponents("p");
    const auto qs = P.exponents("q");
    const bool refine = P.flag("refine");
    const bool builtin = std::find(kBuiltinFields.begin(), kBuiltinFields.end(), source) != kBuiltinFields.end();
    std::optional<Field> loaded;
    if (!builtin) {
        if (refine) throw ConfigError("parameters.refine: a stored field cannot be refined; set refine to false");
        try {
            loaded = io::load(c.base_dir / source);
        } catch (const ellreg::Error& e) {
            throw ConfigError("parameters.field: " + std::string(e.what()));
        }
    }
    const GridSpec grid = c.grid;
    const std::uint64_t seed = c.seed;
    return [=] {
        Artifacts a;
        auto make = [&](const GridSpec& g) -> Field {
            if (loaded) return *loaded;
            if (source == "mode")
                return Field::sample(g, [&](std::span<const double> x) {
                    return std::exp(cplx(0.0, kPi / g.half_period * wavenumber * x[0]));
                });
            if (source == "triangle")
                return Field::sample(g, [](std::span<const double> x) { return cplx(std::abs(x[0])); });
            Rng rng(seed);
            return random_low_modes(g, 1, modes, rng);
        };
        const Field f = guarded("field", [&] { return make(grid); });
        std::optional<Field> fine;
        if (refine) fine = guarded("field", [&] { return make(grid.refined()); });
        Table norms("norms", {"alpha", "p", "q", "norm", "norm_refined", "ratio"});
        json rows = json::array();
        bool finite = true;
        for (double alpha : alphas)
            for (double p : ps)
                for (double q : qs) {
                    const double n = guarded("besov_norm", [&] { return besov_norm(f, {alpha, p, q}); });
                    const double nf = fine ? guarded("besov_norm", [&] { return besov_norm(*fine, {alpha, p, q}); })
                                           : std::nan("");
                    finite = finite && std::isfinite(n) && (!fine || std::isfinite(nf));
                    norms.add({alpha, p_label(p), p_label(q), n, nf, nf / n});
                    json row = {{"alpha", alpha}, {"p", exponent_to_json(p)}, {"q", exponent_to_json(q)}, {"norm", number(n)}};
                    if (fine) {
                        row["norm_refined"] = number(nf);
                        row["ratio"] = number(nf / n);
                    }
                    rows.push_back(row);
                }
        a.results = {{"field", source}, {"norms", rows}, {"all_finite", finite}};
        if (source == "mode") a.results["wavenumber"] = wavenumber;
        a.tables.push_back(std::move(norms));
        return a;
    };
}

// ---------------------------------------------------------------- patch-equivalence

Runner prepare_patch(const ExperimentConfig& c) {
    require_dim(c, 1, 2);
    const auto P = reader(c);
    const double delta = P.number("delta", 1e-6, c.grid.half_period);
    const double beta = P.number("beta", -10.0, 10.0);
    const auto ps = P.exponents("p");
    const int corpus = P.integer("corpus", 1, 10000);
    const int modes = P.integer("g_modes", 0, c.grid.points / 2 - 1);
    const bool refine = P.flag("refine");
    const double tolerance = P.number("tolerance", 0.0, 10.0);
    const GridSpec grid = c.grid;
    const std::uint64_t seed = c.seed;
    return [=] {
        Artifacts a;
        const auto part = guarded("build_partition", [&] { return build_partition(grid, delta); });
        double sum_error = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cplx s{};
            for (const auto& psi : part.psi) s += psi.at(i);
            sum_error = std::max(sum_error, std::abs(s - 1.0));
        }
        const int bound = static_cast<int>(std::lround(std::pow(7.0, grid.dim)));
        const int overlap = part.max_overlap();
        Table partition("partition", {"patches", "max_overlap", "overlap_bound", "sum_error"});
        partition.add({static_cast<long long>(part.patches()), static_cast<long long>(overlap),
                       static_cast<long long>(bound), sum_error});

        std::vector<GridSpec> grids{grid};
        if (refine) grids.push_back(grid.refined());
        Table constants("constants", {"p", "points", "C1", "C2"});
        json rows = json::array();
        bool stable = true;
        const Rng root(seed);
        for (double p : ps) {
            std::vector<std::pair<double, double>> ranges;
            for (const auto& g : grids) {
                const auto pt = guarded("build_partition", [&] { return build_partition(g, delta); });
                auto range = kEmptyRange;
                for (int i = 0; i < corpus; ++i) {
                    Rng rng = root.split(static_cast<std::uint64_t>(i));
                    const Field f = guarded("random_low_modes", [&] { return random_low_modes(g, 1, modes, rng); });
                    const double ratio = guarded("patch_norm", [&] { return patch_norm(f, pt, beta, p); }) /
                                         guarded("besov_norm", [&] { return besov_norm(f, {beta, p, p}); });
                    range = extend(range, ratio);
                }
                constants.add({p_label(p), static_cast<long long>(g.points), range.first, range.second});
                ranges.push_back(range);
            }
            json row = {{"p", exponent_to_json(p)}, {"C1", number(ranges[0].first)}, {"C2", number(ranges[0].second)}};
            if (refine) {
                const double c1 = relative_change(ranges[0].first, ranges[1].first);
                const double c2 = relative_change(ranges[0].second, ranges[1].second);
                const bool ok = c1 <= tolerance && c2 <= tolerance;
                stable = stable && ok;
                row["C1_refined"] = number(ranges[1].first);
                row["C2_refined"] = number(ranges[1].second);
                row["C1_change"] = number(c1);
                row["C2_change"] = number(c2);
                row["stable"] = ok;
            }
            rows.push_back(row);
        }
        a.results = {{"delta", delta},
                     {"beta", beta},
                     {"patches", part.patches()},
                     {"max_overlap", overlap},
                     {"overlap_bound", bound},
                     {"sum_error", sum_error},
                     {"partition_ok", sum_error <= 1e-9 && overlap <= bound},
                     {"constants", rows},
                     {"stable", stable}};
        a.tables.push_back(std::move(partition));
        a.tables.push_back(std::move(constants));
        return a;
    };
}

// ---------------------------------------------------------------- example-a

Runner prepare_example_a(const ExperimentConfig& c) {
    require_dim(c, 1, 1);
    const auto P = reader(c);
    const auto ps = P.exponents("p");
    for (double p : ps)
        if (!(p > 1.0) || std::isinf(p)) throw ConfigError("parameters.p: exponents must lie in (1, inf)");
    const int terms = P.integer("eps_terms", 3, 12);
    const int levels = P.integer("levels", 2, 6);
    const auto kernel = P.choice("kernel", {"bump", "polynomial"});
    const int hardy_corpus = P.integer("hardy_corpus", 0, 10000);
    const int modes = P.integer("g_modes", 0, c.grid.points / 2 - 1);
    const GridSpec grid = c.grid;
    const std::uint64_t seed = c.seed;
    return [=] {
        Artifacts a;
        const ExampleAOperator ex = guarded("ExampleAOperator", [&] { return ExampleAOperator(grid); });
        const auto eps = guarded("default_eps_sequence", [&] { return default_eps_sequence(grid, terms); });
        const MollifierKernel k = MollifierKernel::from_name(kernel);
        Table nd("nondensity", {"p", "eps", "v_eps_at_0", "graph_error", "u_error", "trace_ratio"});
        Table inc("inclusion", {"p", "points", "a0", "constant", "fit_residual", "w1p_norm", "w2p_norm", "reconstruction_norm"});
        Table hardy("hardy", {"p", "sample", "ratio", "bound"});
        json per_p = json::array();
        json v_eps_at_0 = nullptr;
        bool all_pass = true;
        const Field W = soft_window(grid, 1.6, 0.17);
        for (double p : ps) {
            const auto w = guarded("nondensity_witness", [&] { return nondensity_witness(ex, p, eps, k); });
            if (v_eps_at_0.is_null()) v_eps_at_0 = numbers(w.v_eps_at_0);
            for (std::size_t i = 0; i < w.eps.size(); ++i)
                nd.add({p_label(p), w.eps[i], w.v_eps_at_0[i], w.graph_error[i], w.u_error[i], w.trace_ratio[i]});
            a.series.push_back({"graph-error-p" + p_label(p), "eps", "graph_error", {}});
            a.series.push_back({"u-error-p" + p_label(p), "eps", "u_error", {}});
            for (std::size_t i = 0; i < w.eps.size(); ++i) {
                a.series[a.series.size() - 2].points.emplace_back(w.eps[i], w.graph_error[i]);
                a.series.back().points.emplace_back(w.eps[i], w.u_error[i]);
            }

            const auto r = guarded("w1p_inclusion_check", [&] { return w1p_inclusion_check(ex, p, levels); });
            json lv = json::array();
            for (const auto& l : r.levels) {
                inc.add({p_label(p), static_cast<long long>(l.points), l.a0, l.constant, l.fit_residual, l.w1p_norm,
                         l.w2p_norm, l.reconstruction_norm});
                lv.push_back({{"points", l.points}, {"a0", number(l.a0)}, {"constant", number(l.constant)},
                              {"fit_residual", number(l.fit_residual)}, {"w1p_norm", number(l.w1p_norm)},
                              {"w2p_norm", number(l.w2p_norm)}});
            }

            const double bound = p / (p - 1.0) * 1.03;
            double worst = 0.0;
            for (int i = 0; i < hardy_corpus; ++i) {
                Rng rng = Rng(seed).split(static_cast<std::uint64_t>(i));
                const Field g = random_low_modes(grid, 1, modes, rng).real_part().times(W);
                const auto h = guarded("hardy_average", [&] { return hardy_average(g, p); });
                worst = std::max(worst, h.ratio);
                hardy.add({p_label(p), static_cast<long long>(i), h.ratio, bound});
            }
            const bool pass = w.witnessed && r.w1p_stable && worst <= bound;
            all_pass = all_pass && pass;
            per_p.push_back({{"p", p},
                             {"nondensity",
                              {{"floor", number(w.floor)},
                               {"u_decay", number(w.u_decay)},
                               {"trace_constant", number(w.trace_constant)},
                               {"graph_error", numbers(w.graph_error)},
                               {"u_error", numbers(w.u_error)},
                               {"witnessed", w.witnessed}}},
                             {"inclusion",
                              {{"window", r.window},
                               {"levels", lv},
                               {"w1p_growth", numbers(r.w1p_growth)},
                               {"w2p_growth", numbers(r.w2p_growth)},
                               {"w1p_stable", r.w1p_stable},
                               {"w2p_excluded", r.w2p_excluded}}},
                             {"hardy", {{"max_ratio", number(worst)}, {"bound", bound}, {"holds", worst <= bound}}},
                             {"pass", pass}});
        }
        a.results = {{"operator", "-x d^3 + (x - 1) d^2"},
                     {"plateau_radius", ex.plateau_radius()},
                     {"v0", ex.v(0.0)},
                     {"eps", numbers(eps)},
                     {"v_eps_at_0", v_eps_at_0},
                     {"exponents", per_p},
                     {"all_pass", all_pass}};
        a.tables.push_back(std::move(nd));
        a.tables.push_back(std::move(inc));
        a.tables.push_back(std::move(hardy));
        return a;
    };
}

// ---------------------------------------------------------------- regularity-gap

const std::map<std::string, Sampler>& gap_fields() {
    static const std::map<std::string, Sampler> fields{
        {"r2log",
         [](std::span<const double> x) {
             double r2 = 0.0;
             for (double v : x) r2 += v * v;
             return cplx(r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0);
         }},
        {"gaussian",
         [](std::span<const double> x) {
             double r2 = 0.0;
             for (double v : x) r2 += v * v;
             return cplx(std::exp(-r2));
         }},
        {"cos", [](std::span<const double> x) { return cplx(std::cos(3.0 * x[0])); }}};
    return fields;
}

Runner prepare_gap(const ExperimentConfig& c) {
    require_dim(c, 1, 3);
    const auto P = reader(c);
    const auto make_op = operator_source(P.raw("operator"), c);
    std::vector<std::string> names;
    for (const auto& [n, _] : gap_fields()) names.push_back(n);
    const auto fields = P.choices("fields", names);
    const auto ps = P.exponents("p");
    const int levels = P.integer("levels", 3, 6);
    const double radius = P.number("cutoff_radius", 0.0, c.grid.half_period);
    const double softness = P.number("cutoff_softness", 1e-3, c.grid.half_period);
    const GridSpec grid = c.grid;
    return [=] {
        Artifacts a;
        std::vector<std::pair<std::string, Sampler>> corpus;
        for (const auto& n : fields) corpus.emplace_back(n, gap_fields().at(n));
        const Sampler cutoff = [radius, softness](std::span<const double> x) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return cplx(soft_plateau(std::sqrt(r2), radius, softness));
        };
        Table traj("trajectories", {"p", "field", "points", "wkp", "wk1_1", "bk_1inf", "pf_lp"});
        json reports = json::array();
        bool verdict = true;
        for (double p : ps) {
            const auto r = guarded("regularity_gap_experiment",
                                   [&] { return regularity_gap_experiment(make_op, corpus, p, grid, levels, cutoff); });
            verdict = verdict && r.verdict;
            for (const auto& t : r.fields)
                for (std::size_t i = 0; i < t.points.size(); ++i)
                    traj.add({p_label(p), t.label, static_cast<long long>(t.points[i]), t.wkp[i], t.wk1_1[i],
                              t.bk_1inf[i], t.pf_lp[i]});
            reports.push_back(to_json(r));
        }
        a.results = {{"fields", fields}, {"reports", reports}, {"verdict", verdict}};
        a.tables.push_back(std::move(traj));
        return a;
    };
}

// ---------------------------------------------------------------- calibrate

Runner prepare_calibrate(const ExperimentConfig& c) {
    const auto P = reader(c);
    const auto alphas = P.numbers("alphas");
    const auto ps = P.exponents("p");
    const auto qs = P.exponents("q");
    const int corpus = P.integer("corpus", 1, 10000);
    const int modes = P.integer("g_modes", 0, c.grid.points / 2 - 1);
    const GridSpec grid = c.grid;
    const std::uint64_t seed = c.seed;
    return [=] {
        Artifacts a;
        const GridSpec fine = grid.refined();
        std::vector<Field> coarse_fields, fine_fields, lift_up, lift_down;
        const Rng root(seed);
        for (int i = 0; i < corpus; ++i) {
            Rng r1 = root.split(static_cast<std::uint64_t>(i)), r2 = r1;
            coarse_fields.push_back(guarded("random_low_modes", [&] { return random_low_modes(grid, 1, modes, r1); }));
            fine_fields.push_back(guarded("random_low_modes", [&] { return random_low_modes(fine, 1, modes, r2); }));
            lift_up.push_back(bessel_lift(1.0, coarse_fields.back()));
            lift_down.push_back(bessel_lift(-1.0, coarse_fields.back()));
        }
        Table table("calibration", {"dim", "points", "half_period", "alpha", "p", "q", "refine_min", "refine_max",
                                    "lift_plus_min", "lift_plus_max", "lift_minus_min", "lift_minus_max"});
        json entries = json::array();
        for (double alpha : alphas)
            for (double p : ps)
                for (double q : qs) {
                    auto refine = kEmptyRange, plus = kEmptyRange, minus = kEmptyRange;
                    for (int i = 0; i < corpus; ++i) {
                        const double n = guarded("besov_norm", [&] { return besov_norm(coarse_fields[i], {alpha, p, q}); });
                        refine = extend(refine, besov_norm(fine_fields[i], {alpha, p, q}) / n);
                        plus = extend(plus, n / besov_norm(lift_up[i], {alpha + 1.0, p, q}));
                        minus = extend(minus, n / besov_norm(lift_down[i], {alpha - 1.0, p, q}));
                    }
                    table.add({static_cast<long long>(grid.dim), static_cast<long long>(grid.points), grid.half_period,
                               alpha, p_label(p), p_label(q), refine.first, refine.second, plus.first, plus.second,
                               minus.first, minus.second});
                    entries.push_back({{"dim", grid.dim},
                                       {"points", grid.points},
                                       {"half_period", grid.half_period},
                                       {"alpha", alpha},
                                       {"p", exponent_to_json(p)},
                                       {"q", exponent_to_json(q)},
                                       {"refine", range_json(refine)},
                                       {"lift_plus", range_json(plus)},
                                       {"lift_minus", range_json(minus)}});
                }
        const json doc = {{"schema", kCalibrationSchema},
                          {"rng", Rng::kAlgorithm},
                          {"seed", seed},
                          {"corpus", {{"size", corpus}, {"max_wavenumber", modes}}},
                          {"entries", entries}};
        a.results = {{"entries", entries.size()}, {"table", "calibration.json"}};
        a.documents.emplace_back("calibration.json", doc);
        a.tables.push_back(std::move(table));
        return a;
    };
}

} // namespace

// ---------------------------------------------------------------- catalog

const std::vector<Experiment>& catalog() {
    static const std::vector<Experiment> experiments{
        {"mollify-convergence",
         "L^p errors of P(f_eps) - Pf on a window for order 0, 1 and 2 fixtures",
         {"Friedrichs mollification: P f_eps -> P f in L^p_loc when the datum has the regularity of the operator",
          "Failure of graph-norm convergence for an order-2 operator on data outside W^{1,p}"},
         GridSpec(1, 256, kPi),
         {{"fixtures", convergence_case_names()}, {"p", {1, 2}}, {"eps_terms", 5}, {"kernel", "bump"},
          {"window_fraction", 0.25}},
         prepare_mollify},
        {"uniform-convergence",
         "Sup-norm errors of P(f_eps) - Pf for smooth data",
         {"Friedrichs mollification: P f_eps -> P f locally uniformly for C^k data"},
         GridSpec(2, 128, kPi),
         {{"operators", {"identity", "laplacian"}}, {"eps_terms", 3}, {"kernel", "bump"}, {"window_fraction", 0.25},
          {"min_order", 1.7}},
         prepare_uniform},
        {"resolvent-solve",
         "One parameter-elliptic resolvent problem r^n e^{i theta0} u - Q u = g",
         {"Constant-coefficient resolvent by symbol inversion",
          "Lower-order perturbation by a Neumann series for large r",
          "Frozen-coefficient localized solve"},
         GridSpec(1, 128, kPi),
         {{"operator", "minus-laplacian"}, {"theta0", "pi"}, {"r", 8}, {"g", "random"}, {"g_modes", 8},
          {"method", "auto"}, {"delta", 0.4}, {"besov", {{"beta", 0}, {"p", 2}, {"q", 2}}}, {"max_iter", 500},
          {"tol", 1e-11}},
         prepare_resolvent},
        {"apriori-sweep",
         "A-priori ratio (r^n |u|_beta + |u|_{beta+n}) / |g|_beta over a random corpus",
         {"Uniform a-priori resolvent estimate in Besov norms with a single constant C0"},
         GridSpec(1, 128, kPi),
         {{"problems", 50}, {"radii", {4, 8, 16, 32}}, {"betas", {-2, 0, 1}},
          {"pq", {{2, 2}, {1, "inf"}, {"inf", "inf"}}}, {"g_modes", 8}, {"refine", true}, {"max_change", 0.2}},
         prepare_apriori},
        {"besov-norm",
         "Besov norms across (alpha, p, q) for a chosen field",
         {"Besov spaces on the full smoothness scale via second differences and Bessel potentials"},
         GridSpec(1, 128, kPi),
         {{"field", "mode"}, {"wavenumber", 3}, {"g_modes", 8}, {"alphas", {-1, 0, 0.5, 1, 2}},
          {"p", {1, 2, "inf"}}, {"q", {1, 2, "inf"}}, {"refine", true}},
         prepare_besov},
        {"patch-equivalence",
         "Partition of unity checks and patch-norm versus global-norm constants",
         {"Localization by a lattice partition of unity with bounded overlap",
          "Equivalence of the patchwise and global Besov norms"},
         GridSpec(1, 128, kPi),
         {{"delta", "pi/2"}, {"beta", 0.5}, {"p", {2}}, {"corpus", 20}, {"g_modes", 8}, {"refine", true},
          {"tolerance", 0.2}},
         prepare_patch},
        {"example-a",
         "Third-order degenerate operator with u = phi ln|x|: non-density, W^{1,p} inclusion and Hardy averaging",
         {"Counterexample to density of smooth functions in the operator graph norm",
          "Membership of the counterexample in W^{1,p} but not W^{2,p}",
          "Hardy inequality for the averaging operator"},
         GridSpec(1, 256, kPi),
         {{"p", {1.5, 2, 4}}, {"eps_terms", 5}, {"levels", 3}, {"kernel", "bump"}, {"hardy_corpus", 10},
          {"g_modes", 10}},
         prepare_example_a},
        {"regularity-gap",
         "Refinement trajectories of W^{k,p}, W^{k-1,1} and B^k_{1,inf} norms of windowed data",
         {"Elliptic regularity in L^1: the gain lands in B^k_{1,inf}, not W^{k,1}"},
         GridSpec(2, 64, kPi),
         {{"operator", "minus-laplacian"}, {"fields", {"r2log"}}, {"p", {1, 2}}, {"levels", 3},
          {"cutoff_radius", 1.6}, {"cutoff_softness", 0.17}},
         prepare_gap},
        {"calibrate",
         "Empirical equivalence constants of the discrete Besov norm under refinement and Bessel lifts",
         {"Lift property of Bessel potentials between Besov spaces",
          "Equivalence of Besov norms under grid refinement"},
         GridSpec(1, 64, kPi),
         {{"alphas", {-1, 0, 0.5, 1, 1.5, 2}}, {"p", {1, 2, "inf"}}, {"q", {1, 2, "inf"}}, {"corpus", 6},
          {"g_modes", 6}},
         prepare_calibrate},
    };
    return experiments;
}

const Experiment& find_experiment(const std::string& kind) {
    for (const auto& e : catalog())
        if (e.kind == kind) return e;
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

json default_config(const Experiment& e) {
    return {{"schema", kConfigSchema},   {"kind", e.kind},       {"grid", grid_to_json(e.default_grid)},
            {"seed", 1},                  {"output_dir", e.kind}, {"parameters", e.default_parameters}};
}

json catalog_json() {
    json kinds = json::array();
    for (const auto& e : catalog())
        kinds.push_back({{"kind", e.kind}, {"summary", e.summary}, {"anchors", e.anchors}, {"default_config", default_config(e)}});
    return {{"schema", kCatalogSchema}, {"experiments", kinds}};
}

} // namespace ellreg::cli
