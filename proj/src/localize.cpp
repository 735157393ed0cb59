#include "ellreg/localize.hpp"

#include <cmath>
#include <sstream>

#include "ellreg/besov.hpp"
#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"

namespace ellreg {

double partition_profile(double s, double delta) { return plateau(s, 0.5 * delta, delta); }

std::vector<double> PartitionSpec::centre(std::size_t patch) const {
    std::vector<double> c(grid.dim);
    for (int a = 0; a < grid.dim; ++a) c[a] = 0.5 * delta * lattice[patch][a];
    return c;
}

int PartitionSpec::max_overlap() const {
    int worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        int n = 0;
        for (const auto& p : psi) n += p.at(i).real() > 0.0 ? 1 : 0;
        worst = std::max(worst, n);
    }
    return worst;
}

std::vector<std::vector<std::size_t>> PartitionSpec::neighbours() const {
    std::vector<std::vector<std::size_t>> out(patches());
    for (std::size_t j = 0; j < patches(); ++j)
        for (std::size_t i = 0; i < patches(); ++i) {
            bool meet = false;
            for (std::size_t x = 0; x < grid.size() && !meet; ++x) meet = psi[j].at(x).real() > 0.0 && psi[i].at(x).real() > 0.0;
            if (meet) out[j].push_back(i);
        }
    return out;
}

PartitionSpec build_partition(const GridSpec& grid, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    const double ratio = 2.0 * grid.half_period / delta;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 2.0) {
        std::ostringstream os;
        os << "delta = " << delta << " does not divide the period " << 2.0 * grid.half_period;
        throw IncommensurableDelta(os.str());
    }
    PartitionSpec part;
    part.grid = grid;
    part.delta = delta;
    part.per_axis = 2 * static_cast<int>(std::lround(ratio));

    const double period = 2.0 * grid.half_period;
    auto chi_at = [&](std::span<const double> x, std::span<const double> c) {
        double v = 1.0;
        for (int a = 0; a < grid.dim; ++a) v *= partition_profile(std::remainder(x[a] - c[a], period), delta);
        return v;
    };

    std::size_t count = 1;
    for (int a = 0; a < grid.dim; ++a) count *= static_cast<std::size_t>(part.per_axis);
    const int lo = -part.per_axis / 2;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<int> j(grid.dim);
        std::size_t rest = k;
        for (int a = grid.dim - 1; a >= 0; --a) {
            j[a] = lo + static_cast<int>(rest % part.per_axis);
            rest /= part.per_axis;
        }
        part.lattice.push_back(j);
    }

    const std::vector<double> origin(grid.dim, 0.0);
    part.chi0 = Field::sample(grid, [&](std::span<const double> x) { return cplx(chi_at(x, origin)); });
    std::vector<Field> chi;
    part.chi_sum = Field(grid, 1);
    for (std::size_t p = 0; p < part.lattice.size(); ++p) {
        const auto c = part.centre(p);
        chi.push_back(Field::sample(grid, [&](std::span<const double> x) { return cplx(chi_at(x, c)); }));
        part.chi_sum += chi.back();
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (part.chi_sum.at(i).real() < 1.0 - 1e-9) throw InvalidArgument("translates do not cover the torus");
    for (auto& c : chi) {
        Field psi(grid, 1);
        for (std::size_t i = 0; i < grid.size(); ++i) psi.at(i) = c.at(i) / part.chi_sum.at(i);
        part.psi.push_back(std::move(psi));
    }
    return part;
}

namespace {

double patch_term(const Field& f, const Field& psi, double beta, double p) {
    return besov_norm(f.times(psi), {beta, p, p});
}

double aggregate(const std::vector<double>& terms, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double s = 0.0;
    for (double t : terms) s += std::pow(t, p);
    return std::pow(s, 1.0 / p);
}

} // namespace

double patch_norm(const Field& f, const PartitionSpec& part, double beta, double p) {
    require_same_grid(f.grid(), part.grid, "patch_norm");
    const auto n = static_cast<std::ptrdiff_t>(part.patches());
    std::vector<double> terms(part.patches());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < n; ++j) terms[j] = patch_term(f, part.psi[j], beta, p);
    return aggregate(terms, p);
}

namespace serial {
double patch_norm(const Field& f, const PartitionSpec& part, double beta, double p) {
    require_same_grid(f.grid(), part.grid, "patch_norm");
    std::vector<double> terms;
    for (const auto& psi : part.psi) terms.push_back(patch_term(f, psi, beta, p));
    return aggregate(terms, p);
}
} // namespace serial

std::vector<PDOperator> patch_commutators(const PDOperator& Q, const PartitionSpec& part) {
    std::vector<PDOperator> out;
    out.reserve(part.patches());
    for (const auto& psi : part.psi) out.push_back(commutator_with_cutoff(Q, psi));
    return out;
}

} // namespace ellreg
