#include <doctest.h>

#include <cmath>

#include "ellreg/besov.hpp"
#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"
#include "ellreg/pdo.hpp"
#include "ellreg/rng.hpp"
#include "support.hpp"

using namespace ellreg;

namespace {

Field mode(const GridSpec& g, std::vector<int> k) {
    return Field::sample(g, [&, s = kPi / g.half_period](std::span<const double> x) {
        double ph = 0.0;
        for (int a = 0; a < g.dim; ++a) ph += s * k[a] * x[a];
        return std::polar(1.0, ph);
    });
}

Field triangle_wave(const GridSpec& g) {
    return Field::sample(g, [](std::span<const double> x) { return cplx(std::abs(x[0])); });
}

// sup over grid shifts rho = j h of max_x |f(x+rho) - 2 f(x) + f(x-rho)| / rho^s,
// by direct index arithmetic on the samples.
double brute_force_zygmund(const Field& f, double s) {
    const GridSpec& g = f.grid();
    const int n = g.points;
    double best = 0.0;
    for (int j = 1; j <= n / 4; ++j) {
        const double rho = j * g.spacing();
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx d = f.at((i + j) % n) - 2.0 * f.at(i) + f.at((i - j + n) % n);
            m = std::max(m, std::abs(d));
        }
        best = std::max(best, m / std::pow(rho, s));
    }
    return best;
}

} // namespace

TEST_CASE("bessel lift: identity, eigenfunctions and group law") {
    const GridSpec g(2, 32, kPi);
    Rng rng(11);
    const Field f = random_low_modes(g, 1, 6, rng);
    CHECK(oracle::max_abs_diff(bessel_lift(0.0, f), f) == 0.0);

    const Field e = mode(g, {3, -2});
    const Field lifted = bessel_lift(-2.0, e);
    CHECK(oracle::max_abs_diff(lifted, (1.0 + 13.0) * e) < 1e-11);

    for (auto [a, b] : {std::pair{0.7, -1.3}, std::pair{-2.0, 2.0}, std::pair{1.5, 0.25}}) {
        const Field two = bessel_lift(a, bessel_lift(b, f));
        const Field one = bessel_lift(a + b, f);
        CHECK(oracle::max_abs_diff(two, one) <= 1e-11 * (1.0 + oracle::max_abs(f)));
    }
}

TEST_CASE("integer part strictly below") {
    CHECK(integer_part_below(0.3) == 0);
    CHECK(integer_part_below(1.0) == 0);
    CHECK(integer_part_below(1.5) == 1);
    CHECK(integer_part_below(2.0) == 1);
    CHECK(integer_part_below(2.0001) == 2);
}

TEST_CASE("displacement set spans dyadic radii down to the grid spacing") {
    const GridSpec g(1, 128, kPi);
    const auto s = DisplacementSet::for_grid(g);
    REQUIRE(s.radii.size() == 6);  // L/2 ... L/64 = h
    CHECK(s.radii.front() == doctest::Approx(kPi / 2));
    CHECK(s.radii.back() == doctest::Approx(g.spacing()));
    CHECK(DisplacementSet::for_grid(GridSpec(2, 32, 1.0)).directions.size() == 4);
}

TEST_CASE("second-difference kernel matches its serial twin") {
    const GridSpec g(2, 32, kPi);
    Rng rng(5);
    const SpectralField F = dft(random_low_modes(g, 2, 8, rng));
    const auto set = DisplacementSet::for_grid(g);
    for (double p : {1.0, 2.0, kInf}) {
        const auto a = second_difference_norms(F, set, p);
        const auto b = serial::second_difference_norms(F, set, p);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("triangle wave: Zygmund seminorm equals 2, refinement stable at order 1") {
    for (int n : {64, 128, 256}) {
        const GridSpec g(1, n, kPi);
        const Field f = triangle_wave(g);
        const double semi = second_difference_seminorm(f, 1.0, kInf, kInf);
        CHECK(semi == doctest::Approx(2.0).epsilon(1e-9));
        // brute force over every grid shift at this resolution
        CHECK(brute_force_zygmund(f, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
    }
    // 4x resolution brute force agrees with the dyadic displacement set
    const GridSpec coarse(1, 64, kPi);
    CHECK(brute_force_zygmund(triangle_wave(coarse.refined(4)), 1.0) ==
          doctest::Approx(second_difference_seminorm(triangle_wave(coarse), 1.0, kInf, kInf)).epsilon(1e-9));
}

TEST_CASE("triangle wave at order 1.25 grows like h^-1/4") {
    // sup_rho 2 rho / rho^1.25 is attained at rho = h, giving 2 h^-0.25.
    std::vector<double> v;
    for (int n : {64, 128, 256, 512}) {
        const GridSpec g(1, n, kPi);
        const double semi = second_difference_seminorm(triangle_wave(g), 1.25, kInf, kInf);
        CHECK(semi == doctest::Approx(2.0 * std::pow(g.spacing(), -0.25)).epsilon(1e-9));
        v.push_back(semi);
    }
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] / v[i - 1] == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-9));
}

TEST_CASE("besov norm of a single mode is finite and increases with alpha") {
    const GridSpec g(1, 64, kPi);
    const Field e = mode(g, {3});
    for (double p : {1.0, 2.0, kInf})
        for (double q : {1.0, 2.0, kInf}) {
            double prev = 0.0;
            for (double alpha : {-1.0, 0.0, 0.5, 1.0, 2.0, 2.5}) {
                const double b = besov_norm(e, {alpha, p, q});
                CHECK(std::isfinite(b));
                CHECK(b > prev);
                prev = b;
            }
        }
}

TEST_CASE("q-th power form: a single mode has a closed-form seminorm") {
    // |Delta^2_rho e^{ikx}| = 2 - 2 cos(k rho) = 4 sin^2(k rho / 2) pointwise, so in
    // L^2 on [-pi, pi) the norm is 4 sin^2(k rho/2) sqrt(2 pi).
    const GridSpec g(1, 64, kPi);
    const int k = 3;
    const double s = 0.5, q = 2.0;
    double total = 0.0;
    for (double rho : DisplacementSet::for_grid(g).radii) {
        const double d = 4.0 * std::pow(std::sin(0.5 * k * rho), 2) * std::sqrt(2.0 * kPi);
        total += std::log(2.0) * 2.0 * std::pow(d, q) * std::pow(rho, -s * q);
    }
    CHECK(second_difference_seminorm(mode(g, {k}), s, 2.0, q) == doctest::Approx(std::pow(total, 1.0 / q)).epsilon(1e-10));
}

TEST_CASE("sobolev norms of sin") {
    const GridSpec g(1, 64, kPi);
    const Field f = Field::sample(g, [](std::span<const double> x) { return cplx(std::sin(x[0])); });
    CHECK(sobolev_norm(f, 0, 2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    CHECK(sobolev_norm(f, 1, 2.0) == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-12));
    CHECK(sobolev_norm(f, 2, kInf) == doctest::Approx(3.0).epsilon(1e-12));
    // |sin| and |cos| both integrate to 2 over [0, pi]
    CHECK(sobolev_norm(f, 1, 1.0, Box{{0.0}, {kPi}}) == doctest::Approx(4.0).epsilon(2e-2));
}

TEST_CASE("smooth fields: besov norms are refinement stable within 10%") {
    for (int dim : {1, 2}) {
        const GridSpec g(dim, dim == 1 ? 64 : 32, kPi);
        Rng rng(17 + dim);
        const Field coarse = random_low_modes(g, 1, 5, rng);
        Rng again(17 + dim);
        const Field fine = random_low_modes(g.refined(), 1, 5, again);
        for (BesovParams b : {BesovParams{0.5, 2.0, 2.0}, BesovParams{1.0, kInf, kInf}, BesovParams{1.5, 1.0, kInf},
                              BesovParams{-1.0, 2.0, 2.0}}) {
            const double c = besov_norm(coarse, b), f = besov_norm(fine, b);
            CHECK(std::abs(f / c - 1.0) <= 0.10);
        }
    }
}

TEST_CASE("lift identity holds up to an equivalence factor in [1/4, 4]") {
    const GridSpec g(1, 64, kPi);
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Field f = random_low_modes(g, 1, 8, rng);
        for (double gamma : {-1.0, 1.0})
            for (BesovParams b : {BesovParams{0.5, 2.0, 2.0}, BesovParams{1.0, kInf, kInf}, BesovParams{0.0, 1.0, kInf}}) {
                const double lhs = besov_norm(f, b);
                const double rhs = besov_norm(bessel_lift(gamma, f), {b.alpha + gamma, b.p, b.q});
                CHECK(lhs / rhs >= 0.25);
                CHECK(lhs / rhs <= 4.0);
            }
    }
}

TEST_CASE("embeddings hold with refinement-stable constants") {
    auto worst = [&](int n, auto&& ratio) {
        Rng local(31);
        const GridSpec g(1, n, kPi);
        double w = 0.0;
        for (int i = 0; i < 100; ++i) w = std::max(w, ratio(random_low_modes(g, 1, 10, local)));
        return w;
    };
    for (double p : {1.0, 2.0, kInf}) {
        // L^p into B^0_{p,inf}
        auto l_to_b = [p](const Field& f) { return besov_norm(f, {0.0, p, kInf}) / lp_norm(f, p); };
        const double c1 = worst(64, l_to_b), c2 = worst(128, l_to_b);
        MESSAGE("B^0_{p,inf} <= C L^p, p = " << p << ": C = " << c1 << " -> " << c2);
        CHECK(std::abs(c2 / c1 - 1.0) <= 0.2);
        // B^0_{p,1} dominates L^p
        auto b1_to_l = [p](const Field& f) { return lp_norm(f, p) / besov_norm(f, {0.0, p, 1.0}); };
        const double d1 = worst(64, b1_to_l), d2 = worst(128, b1_to_l);
        CHECK(std::abs(d2 / d1 - 1.0) <= 0.2);
        // W^{1,p} between B^1_{p,1} and B^1_{p,inf}
        auto w_to_b1 = [p](const Field& f) { return sobolev_norm(f, 1, p) / besov_norm(f, {1.0, p, 1.0}); };
        auto binf_to_w = [p](const Field& f) { return besov_norm(f, {1.0, p, kInf}) / sobolev_norm(f, 1, p); };
        CHECK(std::abs(worst(128, w_to_b1) / worst(64, w_to_b1) - 1.0) <= 0.2);
        CHECK(std::abs(worst(128, binf_to_w) / worst(64, binf_to_w) - 1.0) <= 0.2);
    }
    // Sobolev embedding B^{beta - m/p}_{inf,inf} <= C B^beta_{p,p}, m = 1, p = 2, beta = 1
    auto sob = [](const Field& f) { return besov_norm(f, {0.5, kInf, kInf}) / besov_norm(f, {1.0, 2.0, 2.0}); };
    const double s1 = worst(64, sob), s2 = worst(128, sob);
    MESSAGE("Sobolev embedding constant " << s1 << " -> " << s2);
    CHECK(std::abs(s2 / s1 - 1.0) <= 0.2);
}

TEST_CASE("fourier multipliers agree with lifts, derivatives and the identity") {
    const GridSpec g(2, 32, kPi);
    Rng rng(3);
    const Field f = random_low_modes(g, 2, 7, rng);

    MultiplierSpec id{[](std::span<const double>) { return Eigen::MatrixXcd::Identity(2, 2).eval(); }, 0.0, 2, 2};
    CHECK(oracle::max_abs_diff(fourier_multiplier(id, f), f) < 1e-13);

    const MultiIndex alpha({2, 1});
    MultiplierSpec d{[&](std::span<const double> xi) {
                         Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2) * monomial_symbol(alpha, xi);
                         return m;
                     },
                     3.0, 2, 2};
    const Field via_apply = apply(PDOperator::derivative(g, alpha), f.channel(0));
    CHECK(oracle::max_abs_diff(fourier_multiplier(d, f).channel(0), via_apply) < 1e-10);
    CHECK(multiplier_growth_constant(d, g) <= 1.0);

    const Field f0 = f.channel(0);
    MultiplierSpec lift{[](std::span<const double> xi) {
                            Eigen::MatrixXcd m(1, 1);
                            m(0, 0) = std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], -0.75);
                            return m;
                        },
                        -1.5, 1, 1};
    CHECK(oracle::max_abs_diff(fourier_multiplier(lift, f0), bessel_lift(1.5, f0)) < 1e-13);
    CHECK(multiplier_growth_constant(lift, g) <= 2.0);

    MultiplierSpec singular{[](std::span<const double> xi) {
                                Eigen::MatrixXcd m(1, 1);
                                m(0, 0) = 1.0 / std::hypot(xi[0], xi[1]);
                                return m;
                            },
                            -1.0, 1, 1};
    CHECK_THROWS_AS(fourier_multiplier(singular, f0), SingularMultiplier);
}

TEST_CASE("product estimate") {
    const GridSpec g(1, 64, kPi);
    Rng rng(41);
    const Field one = Field::constant(g, 1, 1.0);
    const Field f0 = random_low_modes(g, 1, 8, rng);
    const auto trivial = product_estimate_check(one, f0, {0.5, 2.0, 2.0});
    CHECK(trivial.lhs == doctest::Approx(trivial.leading).epsilon(1e-12));

    const Field bump = soft_window(g, 1.2, 0.35);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Field f = random_low_modes(g, 1, 10, rng);
        for (BesovParams b : {BesovParams{0.5, 2.0, 2.0}, BesovParams{1.5, kInf, kInf}, BesovParams{-1.0, 1.0, 1.0}}) {
            const auto r = product_estimate_check(bump, f, b);
            CHECK(r.holds);
            worst = std::max(worst, r.ratio);
            const auto doubled = product_estimate_check(2.0 * bump, f, b);
            CHECK(doubled.lhs <= 2.0 * (r.leading + r.correction) * r.constant);
            CHECK(doubled.lhs == doctest::Approx(2.0 * r.lhs).epsilon(1e-10));
        }
    }
    MESSAGE("largest product-estimate ratio over the corpus: " << worst);
}
