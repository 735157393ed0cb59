#include <doctest.h>

#include <cmath>

#include "convergence_fixtures.hpp"
#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"
#include "ellreg/mollify.hpp"
#include "ellreg/rng.hpp"
#include "support.hpp"

using namespace ellreg;

namespace {

double integral(const Field& f) {
    cplx s{};
    for (const auto& z : f.data()) s += z;
    return s.real() * f.grid().cell_volume();
}

Field gaussian(const GridSpec& g) {
    return Field::sample(g, [](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return cplx(std::exp(-2.0 * r2));
    });
}

} // namespace

TEST_CASE("kernel profiles") {
    const MollifierKernel bump, poly(MollifierKernel::Profile::Polynomial);
    CHECK(bump.shape(0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(bump.shape(1.0) == 0.0);
    CHECK(poly.shape(0.5) == doctest::Approx(std::pow(0.75, 5)));
    CHECK(MollifierKernel::from_name("polynomial").profile() == MollifierKernel::Profile::Polynomial);
    CHECK(MollifierKernel::from_name("bump").name() == "bump");
    CHECK_THROWS_AS(MollifierKernel::from_name("gauss"), InvalidArgument);
}

TEST_CASE("dilated kernels are nonnegative, supported in the eps ball and of unit mass") {
    for (int dim : {1, 2}) {
        const GridSpec g(dim, dim == 1 ? 256 : 64, kPi);
        for (const auto& k : {MollifierKernel(), MollifierKernel(MollifierKernel::Profile::Polynomial)})
            for (double eps : {2.0 * g.spacing(), 0.3, 0.7}) {
                const Field h = k.dilate(g, eps);
                CHECK(integral(h) == doctest::Approx(1.0).epsilon(1e-10));
                for (std::size_t i = 0; i < g.size(); ++i) {
                    CHECK(h.at(i).real() >= 0.0);
                    const auto x = g.point(i);
                    double r2 = 0.0;
                    for (double v : x) r2 += v * v;
                    if (std::sqrt(r2) >= eps) CHECK(h.at(i).real() == 0.0);
                }
            }
    }
}

TEST_CASE("resolvability range") {
    const GridSpec g(1, 128, kPi);
    CHECK_NOTHROW(require_resolvable(g, 2.0 * g.spacing()));
    CHECK_THROWS_AS(require_resolvable(g, 1.9 * g.spacing()), EpsilonOutOfRange);
    CHECK_THROWS_AS(require_resolvable(g, kPi / 4), EpsilonOutOfRange);
    CHECK_THROWS_AS(mollify(Field(g, 1), 0.01), EpsilonOutOfRange);
}

TEST_CASE("default eps sequence stops at the resolvability floor") {
    CHECK(default_eps_sequence(GridSpec(1, 512, kPi)).size() == 5);
    const auto s = default_eps_sequence(GridSpec(1, 256, kPi));
    REQUIRE(s.size() == 4);
    CHECK(s.front() == doctest::Approx(kPi / 8));
    CHECK(s.back() == doctest::Approx(kPi / 64));
    CHECK(default_eps_sequence(GridSpec(1, 2048, kPi), 6).back() == doctest::Approx(kPi / 256));
}

TEST_CASE("constants and means are preserved") {
    const GridSpec g(2, 64, kPi);
    Rng rng(7);
    const Field c = Field::constant(g, 2, cplx(1.5, -0.5));
    const Field f = random_low_modes(g, 1, 12, rng);
    for (double eps : {0.2, 0.5}) {
        CHECK(oracle::max_abs_diff(mollify(c, eps), c) < 1e-12);
        CHECK(integral(mollify(f, eps)) == doctest::Approx(integral(f)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("mollification commutes with translation and with derivatives") {
    const GridSpec g(2, 64, kPi);
    Rng rng(9);
    const Field f = random_low_modes(g, 1, 14, rng);
    const std::vector<double> shift{0.37, -1.21};
    CHECK(oracle::max_abs_diff(translate(mollify(f, 0.3), shift), mollify(translate(f, shift), 0.3)) < 1e-10);
    for (const auto& alpha : {MultiIndex({1, 0}), MultiIndex({1, 2}), MultiIndex({0, 3})}) {
        const Field a = derivative(mollify(f, 0.25), alpha.e);
        const Field b = mollify(derivative(f, alpha.e), 0.25);
        CHECK(oracle::max_abs_diff(a, b) < 1e-9);
    }
}

TEST_CASE("mollification contracts every L^p norm") {
    const GridSpec g(1, 256, kPi);
    Rng rng(13);
    for (int i = 0; i < 20; ++i) {
        const Field f = random_low_modes(g, 1, 60, rng);
        for (double p : {1.0, 1.5, 2.0, 4.0, kInf})
            for (double eps : {0.05, 0.2, 0.7}) CHECK(lp_norm(mollify(f, eps), p) <= (1.0 + 1e-6) * lp_norm(f, p));
    }
}

TEST_CASE("smooth data: sup error is second order in eps") {
    const GridSpec g(1, 1024, kPi);
    const Field f = gaussian(g);
    std::vector<double> err;
    for (double eps = kPi / 8; eps >= kPi / 64; eps *= 0.5) err.push_back(lp_norm(mollify(f, eps) - f, kInf));
    // Richardson: successive ratios approach 4
    for (std::size_t i = 1; i < err.size(); ++i) CHECK(err[i - 1] / err[i] == doctest::Approx(4.0).epsilon(0.15));
    // leading term (1/2) f''(0) * second moment of h_eps along one axis
    const MollifierKernel k;
    const double moment = oracle::midpoint([&](double r) { return r * r * k.shape(r); }, -1.0, 1.0, 20000) /
                          oracle::midpoint([&](double r) { return k.shape(r); }, -1.0, 1.0, 20000);
    const double eps = kPi / 64;
    CHECK(err.back() == doctest::Approx(0.5 * 4.0 * moment * eps * eps).epsilon(0.05));
}

TEST_CASE("convergence experiments on the order 0, 1 and 2 fixtures") {
    const GridSpec g(1, 1024, kPi);
    const auto eps = default_eps_sequence(g, 5);
    const Box w = fixture::measurement_window(g);
    for (auto make : {fixture::order_zero, fixture::order_one, fixture::order_two_regular}) {
        const auto c = make(g);
        const auto t = mollifier_convergence_experiment(c.P, c.f, 1.0, eps, w, c.reference);
        CHECK_MESSAGE(t.verdict() == "converges", c.label);
        CHECK(t.last() <= 0.25 * t.first());
    }
    const auto rough = fixture::order_two_rough(g);
    const auto t = mollifier_convergence_experiment(rough.P, rough.f, 1.0, eps, w, rough.reference);
    CHECK(t.verdict() == "no-decay");
    CHECK(t.last() >= 0.5 * t.first());

    const auto j = to_json(t);
    CHECK(j["norm_kind"] == "L1");
    CHECK(j["rows"].size() == eps.size());
}

TEST_CASE("the conclusion does not depend on the kernel profile") {
    const GridSpec g(1, 1024, kPi);
    const auto eps = default_eps_sequence(g, 5);
    const auto c = fixture::order_one(g);
    const MollifierKernel poly(MollifierKernel::Profile::Polynomial);
    const auto a = mollifier_convergence_experiment(c.P, c.f, 1.0, eps, fixture::measurement_window(g), c.reference);
    const auto b =
        mollifier_convergence_experiment(c.P, c.f, 1.0, eps, fixture::measurement_window(g), c.reference, poly);
    CHECK(a.verdict() == b.verdict());
    CHECK(a.observed_order() == doctest::Approx(b.observed_order()).epsilon(0.1));
}

TEST_CASE("uniform convergence: identity and a windowed polynomial under the Laplacian") {
    const GridSpec g(2, 128, kPi);
    const Field f = Field::sample(g, [](std::span<const double> x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return cplx((x[0] * x[0] * x[0] * x[0] + x[0] * x[1] * x[1] * x[1]) * soft_plateau(std::sqrt(r2), 1.6, 0.17));
    });
    const std::vector<double> eps{kPi / 8, kPi / 16, kPi / 32};
    const Box w = Box::cube(2, kPi / 4);
    const auto id = uniform_convergence_experiment(PDOperator::identity(g, 1), f, eps, w);
    CHECK(id.last() < id.first());
    const auto lap = uniform_convergence_experiment(PDOperator::laplacian(g), f, eps, w);
    CHECK(lap.norm_kind == "Linf");
    CHECK(lap.observed_order() >= 1.7);
}

TEST_CASE("experiment input validation") {
    const GridSpec g(1, 256, kPi);
    const auto P = PDOperator::identity(g, 1);
    const Field f(g, 1);
    const Box w = Box::cube(1, 1.0);
    CHECK_THROWS_AS(mollifier_convergence_experiment(P, f, 1.0, {0.1, 0.2}, w), InvalidArgument);
    CHECK_THROWS_AS(mollifier_convergence_experiment(P, f, kInf, {0.2, 0.1}, w), InvalidArgument);
    CHECK_THROWS_AS(mollifier_convergence_experiment(P, f, 2.0, {0.2, 0.01}, w), EpsilonOutOfRange);
}
