#include <doctest.h>

#include "oracles/simpson.hpp"

#include <aloof/errors.hpp>
#include <aloof/math/quadrature.hpp>
#include <aloof/math/special.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace aloof;
using namespace aloof::math;
using std::numbers::pi;

TEST_CASE("1D quadrature on known integrals") {
    const auto r = integrate_adaptive_1d([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-10);
    CHECK(r.error_estimate >= 0.0);
    CHECK(r.evaluations >= 1);

    QuadratureConfig cfg{.relative_tolerance = 1e-9, .absolute_tolerance = 1e-14};
    const auto e = integrate_adaptive_1d([](double x) { return std::exp(-x); }, 0.0, infinity, cfg);
    CHECK(std::abs(e.value - 1.0) <= 1e-9);
}

TEST_CASE("Lorentzian over the whole line against a truncated Simpson oracle") {
    QuadratureConfig cfg{.relative_tolerance = 1e-10, .absolute_tolerance = 1e-14};
    const auto f = [](double u) { return 1.0 / (1.0 + u * u); };
    const auto r = integrate_adaptive_1d(f, -infinity, infinity, cfg);
    // Oracle: Simpson on [-1e4, 1e4] in blocks plus the exact tail 2 atan(1e-4).
    double o = 0.0;
    const double blocks[] = {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0};
    for (int i = 0; i < 5; ++i)
        o += 2.0 * oracle::simpson(f, blocks[i], blocks[i + 1], 20000);
    o += 2.0 * std::atan(1e-4);
    CHECK(std::abs(o - pi) < 1e-9);
    CHECK(std::abs(r.value - o) <= 1e-9 * pi);
}

TEST_CASE("quadrature errors") {
    QuadratureConfig tight{.relative_tolerance = 1e-15, .absolute_tolerance = 1e-300,
                           .max_subdivisions = 3};
    try {
        integrate_adaptive_1d([](double x) { return std::sin(100.0 * x) / std::sqrt(x); }, 0.0,
                              10.0, tight);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.error_estimate() > 0.0);
    }
    CHECK_THROWS_AS(integrate_adaptive_1d([](double) { return std::nan(""); }, 0.0, 1.0),
                    EvaluationError);
    CHECK_THROWS_AS(QuadratureConfig{.relative_tolerance = 0.0}.validate(), DomainError);
    CHECK_THROWS_AS((QuadratureConfig{.relative_tolerance = 1e-6, .absolute_tolerance = 1e-6,
                                      .max_subdivisions = 0}
                         .validate()),
                    DomainError);
}

TEST_CASE("linearity on random polynomials") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    QuadratureConfig cfg{.relative_tolerance = 1e-12, .absolute_tolerance = 1e-14};
    for (int trial = 0; trial < 20; ++trial) {
        double p[6], q[6];
        for (int i = 0; i < 6; ++i) {
            p[i] = coef(rng);
            q[i] = coef(rng);
        }
        const double alpha = coef(rng);
        const double beta = coef(rng);
        const auto poly = [](const double* c) {
            return [c](double x) {
                double s = 0.0;
                for (int i = 5; i >= 0; --i)
                    s = s * x + c[i];
                return s;
            };
        };
        const auto f = poly(p);
        const auto g = poly(q);
        const auto lhs =
            integrate_adaptive_1d([&](double x) { return alpha * f(x) + beta * g(x); }, -1.0, 2.0, cfg);
        const auto a = integrate_adaptive_1d(f, -1.0, 2.0, cfg);
        const auto b = integrate_adaptive_1d(g, -1.0, 2.0, cfg);
        const double rhs = alpha * a.value + beta * b.value;
        const double tol = std::abs(alpha) * a.error_estimate + std::abs(beta) * b.error_estimate
                         + lhs.error_estimate + 1e-12 * (std::abs(rhs) + 1.0);
        CHECK(std::abs(lhs.value - rhs) <= tol);
    }
}

TEST_CASE("2D quadrature") {
    QuadratureConfig cfg{.relative_tolerance = 1e-10, .absolute_tolerance = 1e-14};
    const auto unit = integrate_adaptive_2d([](double, double) { return 1.0; },
                                            {{0.0, 1.0}, {0.0, 1.0}}, cfg);
    CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-12));

    const auto radial = integrate_adaptive_2d(
        [](double k, double) { return k * std::exp(-2.0 * k); }, {{0.0, infinity}, {0.0, 2 * pi}},
        cfg);
    CHECK(radial.value == doctest::Approx(pi / 2).epsilon(1e-9));

    // Markov-shaped integrand at zero separation vanishes identically.
    const double dx = 0.0;
    const auto zero = integrate_adaptive_2d(
        [dx](double k, double phi) {
            return (1.0 - std::cos(k * dx * std::sin(phi))) * std::exp(-2.0 * k);
        },
        {{0.0, infinity}, {0.0, pi / 2}}, QuadratureConfig{.relative_tolerance = 1e-6,
                                                           .absolute_tolerance = 1e-10},
        64);
    CHECK(std::abs(zero.value) <= 1e-10);
}

TEST_CASE("2D agrees with iterated 1D on a separable integrand") {
    QuadratureConfig cfg{.relative_tolerance = 1e-11, .absolute_tolerance = 1e-15};
    const auto fx = [](double x) { return std::exp(-x) * (1.0 + x * x); };
    const auto fy = [](double y) { return std::cos(y) * std::cos(y) + 0.1; };
    const auto two = integrate_adaptive_2d([&](double x, double y) { return fx(x) * fy(y); },
                                           {{0.0, infinity}, {0.0, pi / 2}}, cfg, 8);
    const double iterated =
        integrate_adaptive_1d(fx, 0.0, infinity, cfg).value * integrate_adaptive_1d(fy, 0.0, pi / 2, cfg).value;
    CHECK(two.value == doctest::Approx(iterated).epsilon(1e-8));
}

TEST_CASE("E1 against the adaptive-Simpson oracle") {
    CHECK(exp_integral_e1(1.0) == doctest::Approx(0.2193839344).epsilon(1e-10));
    CHECK(oracle::e1(1.0) == doctest::Approx(0.2193839344).epsilon(1e-9));
    for (int i = 0; i < 20; ++i) {
        const double x = 0.1 * std::pow(100.0, i / 19.0);
        CHECK(exp_integral_e1(x) == doctest::Approx(oracle::e1(x)).epsilon(1e-8));
    }
}

TEST_CASE("E1 branches agree and asymptotics hold") {
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        const double s = detail::e1_series(x);
        const double c = detail::e1_continued_fraction(x);
        CHECK(std::abs(s - c) <= 1e-9 * std::abs(c));
    }
    for (double x : {50.0, 200.0, 700.0}) {
        const double scaled = exp_integral_e1(x) * x * std::exp(x);
        CHECK(std::abs(scaled - 1.0) < 1.5 / x);
    }
    // Up to 700, where E1 is still a normal double.
    double prev = exp_integral_e1(1e-6);
    for (int i = 1; i < 200; ++i) {
        const double x = 1e-6 * std::pow(7e8, i / 199.0);
        const double v = exp_integral_e1(x);
        CHECK(v >= 0.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(exp_integral_e1(0.0), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(-1.0), DomainError);
}

TEST_CASE("sinc") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(pi)) < 1e-15);
    const double x = 1e-8;
    CHECK(sinc(x) == doctest::Approx(1.0 - x * x / 6.0).epsilon(1e-16));
    CHECK(sinc(-2.0) == sinc(2.0));
    CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-15));
    const double h = 1e-6;
    for (double t : {0.0, 0.3, 2.0, -4.0})
        CHECK(sinc_derivative(t) == doctest::Approx((sinc(t + h) - sinc(t - h)) / (2 * h)).epsilon(1e-8));
}
