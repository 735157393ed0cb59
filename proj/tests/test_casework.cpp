#include <doctest.h>

#include <cmath>

#include "ellreg/casework.hpp"
#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"
#include "ellreg/rng.hpp"
#include "support.hpp"

using namespace ellreg;

namespace {

Field windowed_low_modes(const GridSpec& g, Rng& rng, int kmax) {
    return random_low_modes(g, 1, kmax, rng).real_part().times(soft_window(g, 1.6, 0.17));
}

Field on_grid(const GridSpec& g, const std::function<double(double)>& fn) {
    return Field::sample(g, [&](std::span<const double> x) { return cplx(fn(x[0])); });
}

double max_on(const Field& f, double radius) {
    double m = 0.0;
    for (int i = 0; i < f.grid().points; ++i)
        if (std::abs(f.grid().coordinate(i)) <= radius) m = std::max(m, std::abs(f.at(i)));
    return m;
}

} // namespace

TEST_CASE("the third-order example factorizes") {
    const GridSpec g(1, 256, kPi);
    const ExampleAOperator ex(g);
    CHECK(ex.op().order() == 3);
    CHECK(ex.plateau_radius() == doctest::Approx(kPi / 4));
    const Field x = on_grid(g, [](double t) { return t; });
    CHECK(oracle::max_abs_diff(ex.op().coefficient(MultiIndex({3})), -1.0 * x) == 0.0);
    CHECK(oracle::max_abs_diff(ex.op().coefficient(MultiIndex({2})), x - Field::constant(g, 1, 1.0)) == 0.0);
    Rng rng(61);
    for (int i = 0; i < 10; ++i) {
        const Field f = windowed_low_modes(g, rng, 8);
        CHECK(oracle::max_abs_diff(apply(ex.op(), f), ex.factorized_apply(f)) <= 1e-8);
    }
    CHECK_THROWS_AS(ExampleAOperator(GridSpec(2, 16, kPi)), InvalidArgument);
}

TEST_CASE("window jets agree with finite differences") {
    const ExampleAOperator ex(GridSpec(1, 64, kPi));
    // fourth-order central differences
    const double eta = 1e-3;
    auto fd = [eta](auto&& fn) {
        return (-fn(2 * eta) + 8 * fn(eta) - 8 * fn(-eta) + fn(-2 * eta)) / (12 * eta);
    };
    for (double x : {-1.4, -1.0, -0.9, 0.3, 0.85, 1.1, 1.3, 1.6}) {
        const auto j = ex.window(x);
        CHECK(j.d1 == doctest::Approx(fd([&](double t) { return ex.window(x + t).w; })).epsilon(1e-6).scale(1.0));
        CHECK(j.d2 == doctest::Approx(fd([&](double t) { return ex.window(x + t).d1; })).epsilon(1e-6).scale(1.0));
        CHECK(j.d3 == doctest::Approx(fd([&](double t) { return ex.window(x + t).d2; })).epsilon(1e-6).scale(1.0));
    }
    CHECK(ex.window(0.5).w == 1.0);
    CHECK(ex.window(1.7).w == 0.0);
    const std::size_t i = ex.grid().nearest_index(std::vector<double>{0.5});
    CHECK(ex.phi().at(i).real() == ex.grid().point(i)[0]);
}

TEST_CASE("closed forms of u = phi ln|x| are mutually consistent") {
    const ExampleAOperator ex(GridSpec(1, 64, kPi));
    const double eta = 1e-5, h = 0.01;
    for (double x : {-1.3, -0.6, -0.2, 0.05, 0.4, 0.9, 1.2}) {
        CHECK(ex.du(x, h) == doctest::Approx((ex.u(x + eta) - ex.u(x - eta)) / (2 * eta)).epsilon(1e-6));
        CHECK(ex.d2u(x, h) == doctest::Approx((ex.du(x + eta, h) - ex.du(x - eta, h)) / (2 * eta)).epsilon(1e-5));
        CHECK(ex.v(x) == doctest::Approx(x * ex.d2u(x, h)).epsilon(1e-12));
        CHECK(ex.dv(x, h) == doctest::Approx((ex.v(x + eta) - ex.v(x - eta)) / (2 * eta)).epsilon(1e-5).scale(1.0));
    }
    // analytic values at the singular point
    CHECK(ex.v(0.0) == 1.0);
    CHECK(ex.u(0.0) == 0.0);
    CHECK(ex.dv(0.0, h) == 0.0);
    CHECK(ex.d2u(0.0, h) == 0.0);
    CHECK(ex.du(0.0, h) == doctest::Approx(std::log(h / 2)));
    // v = 1 on the plateau
    for (double x : {-0.7, -0.1, 0.2, 0.78}) CHECK(ex.v(x) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hardy averaging") {
    const GridSpec g(1, 512, kPi);
    const Field W = soft_window(g, 1.6, 0.17);

    const auto lin = hardy_average(on_grid(g, [](double x) { return x; }).times(W), 2.0);
    CHECK(max_on(lin.h - Field::constant(g, 1, 1.0), 0.5) < 1e-10);
    const auto quad = hardy_average(on_grid(g, [](double x) { return x * x; }).times(W), 2.0);
    CHECK(max_on(quad.h - on_grid(g, [](double x) { return x; }), 0.5) < 1e-10);

    Rng rng(67);
    for (double p : {1.5, 2.0, 4.0}) {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Field gg = windowed_low_modes(g, rng, 10);
            const auto r = hardy_average(gg, p);
            CHECK(r.ratio <= p / (p - 1.0) * 1.03);
            worst = std::max(worst, r.ratio);
            // dense oracle: (g(x) - g(0)) / x at 8x resolution, g resampled spectrally
            if (i < 3) {
                const GridSpec fine = g.refined(8);
                SpectralField G = dft(gg), Gf(fine, 1);
                std::vector<int> k(1);
                for (int m = 0; m < g.points; ++m) {
                    k[0] = g.wavenumber(m);
                    if (2 * std::abs(k[0]) < g.points) Gf.coefficient(k) = G.at(m);
                }
                const Field ff = idft(Gf);
                const Field dff = derivative(ff, std::vector<int>{1});
                const std::size_t o = fine.origin_index();
                Field h(fine, 1);
                for (int m = 0; m < fine.points; ++m) {
                    const double x = fine.coordinate(m);
                    h.at(m) = x == 0.0 ? dff.at(o) : (ff.at(m) - ff.at(o)) / x;
                }
                CHECK(r.ratio == doctest::Approx(lp_norm(h, p) / lp_norm(dff, p)).epsilon(1e-3));
            }
        }
        MESSAGE("largest Hardy ratio at p = " << p << ": " << worst << " (bound " << p / (p - 1) << ")");
    }
}

TEST_CASE("non-density of smooth elements in the graph space") {
    const GridSpec g(1, 1024, kPi);
    const ExampleAOperator ex(g);
    const auto eps = default_eps_sequence(g, 5);
    for (double p : {1.5, 2.0, 4.0}) {
        const auto r = nondensity_witness(ex, p, eps);
        CHECK(r.v0 == 1.0);
        for (double v : r.v_eps_at_0) CHECK(v == 0.0);
        CHECK(r.floor >= 0.5);
        CHECK(r.u_decay >= 4.0);
        CHECK(r.witnessed);
        for (double t : r.trace_ratio) CHECK(t <= r.trace_constant);
        MESSAGE("p = " << p << ": floor " << r.floor << ", u decay " << r.u_decay);
    }
    CHECK_THROWS_AS(nondensity_witness(ex, 1.0, eps), InvalidArgument);
}

TEST_CASE("W^{1,p} inclusion and W^{2,p} exclusion") {
    const ExampleAOperator ex(GridSpec(1, 1024, kPi));
    for (double p : {1.5, 2.0, 4.0}) {
        const auto r = w1p_inclusion_check(ex, p, 3);
        CHECK(r.w1p_stable);
        for (double gr : r.reconstruction_growth) CHECK(std::abs(gr - 1.0) <= 0.05);
        // shell quadrature of |1/x|^p: the discrete norm grows like h^{1/p - 1}
        for (double gr : r.w2p_growth) CHECK(gr == doctest::Approx(std::pow(2.0, 1.0 - 1.0 / p)).epsilon(0.05));
        CHECK(r.w2p_excluded == (p >= 4.0));
        for (const auto& lvl : r.levels) {
            CHECK(std::abs(lvl.a0) < 1e-8);  // u is odd, so du is even
            CHECK(lvl.fit_residual < 1e-4);
            CHECK(std::abs(lvl.reconstruction_norm / lvl.w1p_norm - 1.0) < 1e-2);
        }
    }
}

TEST_CASE("the antiderivative term is the averaged one, not the raw derivative") {
    // du - ln|x| - (v - 1) is not piecewise constant on |x| > L/4, while the
    // reconstruction with the averaged term is.
    const GridSpec g(1, 1024, kPi);
    const ExampleAOperator ex(g);
    double spread_pos_lo = kInf, spread_pos_hi = -kInf;
    for (int i = 0; i < g.points; ++i) {
        const double x = g.coordinate(i);
        if (x <= kPi / 4) continue;
        const double t = ex.du(x, g.spacing()) - std::log(x) - (ex.v(x) - 1.0);
        spread_pos_lo = std::min(spread_pos_lo, t);
        spread_pos_hi = std::max(spread_pos_hi, t);
    }
    CHECK(spread_pos_hi - spread_pos_lo > 0.1);
    CHECK(w1p_inclusion_check(ex, 2.0, 2).levels[0].fit_residual < 1e-4);
}

TEST_CASE("reconstruction of a smooth function reduces to its derivative") {
    const GridSpec g(1, 256, kPi);
    Rng rng(71);
    const Field u = windowed_low_modes(g, rng, 6);
    const auto fit = reconstruct_derivative(u);
    const Field du = derivative(u, std::vector<int>{1});
    CHECK(std::abs(fit.a0) < 1e-6);
    CHECK(fit.constant == doctest::Approx(du.at(g.origin_index()).real()).epsilon(1e-6));
    CHECK(oracle::max_abs_diff(fit.du, du) < 1e-4);
}

TEST_CASE("regularity gap: smooth data under -d^2") {
    const GridSpec base(1, 64, kPi);
    auto make = [](const GridSpec& g) { return PDOperator::derivative(g, MultiIndex({2}), -1.0); };
    const Sampler cutoff = [](std::span<const double> x) { return cplx(soft_plateau(std::abs(x[0]), 1.6, 0.17)); };
    const std::vector<std::pair<std::string, Sampler>> corpus{
        {"gaussian", [](std::span<const double> x) { return cplx(std::exp(-x[0] * x[0])); }},
        {"cos", [](std::span<const double> x) { return cplx(std::cos(3.0 * x[0])); }}};
    for (double p : {1.0, 2.0}) {
        const auto r = regularity_gap_experiment(make, corpus, p, base, 3, cutoff);
        CHECK(r.order == 2);
        CHECK(r.verdict);
        for (const auto& t : r.fields) {
            CHECK(t.wkp_stable);
            CHECK(t.wk1_1_stable);
            CHECK(t.bk_stable);
            CHECK(t.points == std::vector<int>{64, 128, 256});
        }
        const auto j = to_json(r);
        CHECK(j["fields"].size() == 2);
        if (p == 1.0) CHECK(r.note.find("not certified") != std::string::npos);
    }
    CHECK_THROWS_AS(regularity_gap_experiment(make, corpus, 2.0, base, 2, cutoff), InvalidArgument);
}

TEST_CASE("refinement stability rule") {
    CHECK(refinement_stable({1.0, 1.2, 1.23, 1.25}));
    CHECK_FALSE(refinement_stable({1.0, 1.0, 1.1}));
    CHECK_FALSE(refinement_stable({1.0, 1.01}));
    CHECK(refinement_stable({2.0, 2.0, 2.0}, 0.0));
}
