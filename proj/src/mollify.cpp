#include "ellreg/mollify.hpp"

#include <cmath>
#include <sstream>

#include "ellreg/error.hpp"
#include "ellreg/kernels.hpp"

namespace ellreg {

MollifierKernel MollifierKernel::from_name(const std::string& name) {
    if (name == "bump") return MollifierKernel(Profile::Bump);
    if (name == "polynomial") return MollifierKernel(Profile::Polynomial);
    throw InvalidArgument("unknown mollifier profile '" + name + "' (expected bump or polynomial)");
}

std::string MollifierKernel::name() const { return profile_ == Profile::Bump ? "bump" : "polynomial"; }

double MollifierKernel::shape(double r) const {
    if (r >= 1.0) return 0.0;
    const double s = 1.0 - r * r;
    return profile_ == Profile::Bump ? std::exp(-1.0 / s) : std::pow(s, 5);
}

void require_resolvable(const GridSpec& grid, double eps) {
    const double floor = 2.0 * grid.spacing(), ceiling = 0.25 * grid.half_period;
    if (!(eps >= floor * (1.0 - 1e-12) && eps < ceiling)) {
        std::ostringstream os;
        os << "eps = " << eps << " outside the resolvable range [" << floor << ", " << ceiling << ")";
        throw EpsilonOutOfRange(os.str());
    }
}

Field MollifierKernel::dilate(const GridSpec& grid, double eps) const {
    require_resolvable(grid, eps);
    Field h = Field::sample(grid, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) {
            const double d = std::remainder(v, 2.0 * grid.half_period);
            r2 += d * d;
        }
        return cplx(shape(std::sqrt(r2) / eps));
    });
    double mass = 0.0;
    for (const auto& z : h.data()) mass += z.real();
    mass *= grid.cell_volume();
    h *= 1.0 / mass;
    return h;
}

Field mollify(const Field& f, double eps, const MollifierKernel& kernel) {
    const GridSpec& g = f.grid();
    const SpectralField H = dft(kernel.dilate(g, eps));
    SpectralField F = dft(f);
    std::vector<cplx> sym(H.data().begin(), H.data().end());
    const double vol = g.volume();
    for (auto& z : sym) z *= vol;
    kernels::multiply_symbol(F.data(), f.channels(), sym);
    return idft(F);
}

std::vector<double> default_eps_sequence(const GridSpec& grid, int terms) {
    std::vector<double> out;
    double eps = grid.half_period / 8.0;
    for (int i = 0; i < terms; ++i, eps *= 0.5) {
        if (eps < 2.0 * grid.spacing() * (1.0 - 1e-12)) break;
        out.push_back(eps);
    }
    return out;
}

double ConvergenceTable::decay_factor() const { return last() > 0.0 ? first() / last() : kInf; }

double ConvergenceTable::observed_order() const {
    const std::size_t n = error.size();
    if (n < 3) return std::nan("");
    return std::log(error[n - 3] / error[n - 1]) / std::log(eps[n - 3] / eps[n - 1]);
}

std::string ConvergenceTable::verdict() const {
    if (error.size() < 2) return "inconclusive";
    if (last() <= 0.25 * first()) return "converges";
    const std::size_t n = error.size();
    if (std::min(error[n - 1], error[n - 2]) >= 0.5 * first()) return "no-decay";
    return "inconclusive";
}

nlohmann::json to_json(const ConvergenceTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < t.eps.size(); ++i) rows.push_back({{"eps", t.eps[i]}, {"error", t.error[i]}});
    nlohmann::json j = {{"norm_kind", t.norm_kind}, {"window", {{"lo", t.window.lo}, {"hi", t.window.hi}}},
                        {"rows", rows},          {"verdict", t.verdict()}};
    if (!t.error.empty()) {
        j["first_error"] = t.first();
        j["last_error"] = t.last();
        j["decay_factor"] = t.decay_factor();
    }
    const double order = t.error.size() >= 3 ? t.observed_order() : std::nan("");
    j["observed_order"] = std::isfinite(order) ? nlohmann::json(order) : nlohmann::json(nullptr);
    return j;
}

namespace {

std::string norm_label(double p) {
    if (std::isinf(p)) return "Linf";
    std::ostringstream os;
    os << "L" << p;
    return os.str();
}

ConvergenceTable run_sweep(const PDOperator& P, const Field& f, double p, const std::vector<double>& eps_seq,
                           const Box& window, const std::optional<Field>& reference, const MollifierKernel& kernel) {
    if (eps_seq.empty()) throw InvalidArgument("empty eps sequence");
    for (std::size_t i = 1; i < eps_seq.size(); ++i)
        if (!(eps_seq[i] < eps_seq[i - 1])) throw InvalidArgument("eps sequence must be strictly decreasing");
    for (double e : eps_seq) require_resolvable(f.grid(), e);
    const Field Pf = reference ? *reference : apply(P, f);
    require_same_grid(Pf.grid(), f.grid(), "convergence reference");
    ConvergenceTable t;
    t.norm_kind = norm_label(p);
    t.p = p;
    t.window = window;
    t.eps = eps_seq;
    t.error.resize(eps_seq.size());
    for (std::size_t i = 0; i < eps_seq.size(); ++i) {
        Field d = apply(P, mollify(f, eps_seq[i], kernel));
        d -= Pf;
        t.error[i] = lp_norm(d, p, window);
    }
    return t;
}

} // namespace

ConvergenceTable mollifier_convergence_experiment(const PDOperator& P, const Field& f, double p,
                                                  const std::vector<double>& eps_seq, const Box& window,
                                                  const std::optional<Field>& reference, const MollifierKernel& kernel) {
    if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("mollifier convergence needs finite p >= 1");
    return run_sweep(P, f, p, eps_seq, window, reference, kernel);
}

ConvergenceTable uniform_convergence_experiment(const PDOperator& P, const Field& f, const std::vector<double>& eps_seq,
                                                const Box& window, const std::optional<Field>& reference,
                                                const MollifierKernel& kernel) {
    return run_sweep(P, f, kInf, eps_seq, window, reference, kernel);
}

} // namespace ellreg
