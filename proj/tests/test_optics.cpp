#include <doctest.h>

#include <aloof/errors.hpp>
#include <aloof/optics/beamline.hpp>
#include <aloof/optics/wien.hpp>
#include <aloof/physics.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace aloof;
using namespace aloof::optics;

namespace {

const Biprism reference_biprism{0.5, 2e-3, 200e-9};

double det(const Matrix2& m) { return m.determinant(); }

Beamline parse(const std::string& text) {
    std::istringstream in(text);
    return parse_beamline(in, "test.ini");
}

} // namespace

TEST_CASE("element matrices") {
    const double U = 1000.0;
    const Matrix2 d = element_matrix(Drift{0.3}, U);
    CHECK(d(0, 0) == 1.0);
    CHECK(d(0, 1) == 0.3);
    CHECK(d(1, 0) == 0.0);
    CHECK(d(1, 1) == 1.0);
    // Composition of drifts is exact for dyadic lengths.
    CHECK(element_matrix(Drift{0.25}, U) * element_matrix(Drift{0.5}, U)
          == element_matrix(Drift{0.75}, U));

    const QuadrupoleFocus qf{10.0, 3e-3, 0.02};
    const QuadrupoleDefocus qd{10.0, 3e-3, 0.02};
    const double k = quadrupole_strength(10.0, 3e-3, U);
    CHECK(k == doctest::Approx(std::sqrt(10.0 / (9e-6 * U))).epsilon(1e-15));
    const Matrix2 f = element_matrix(qf, U);
    CHECK(f(0, 0) == doctest::Approx(std::cosh(k * 0.02)).epsilon(1e-15));
    CHECK(f(1, 0) == doctest::Approx(k * std::sinh(k * 0.02)).epsilon(1e-15));
    const Matrix2 g = element_matrix(qd, U);
    CHECK(g(0, 1) == doctest::Approx(std::sin(k * 0.02) / k).epsilon(1e-15));
    CHECK(g(1, 0) == doctest::Approx(-k * std::sin(k * 0.02)).epsilon(1e-15));
    CHECK(std::abs(det(f) - 1.0) < 1e-12);
    CHECK(std::abs(det(g) - 1.0) < 1e-12);

    // U_q -> 0 gives a drift of the element length.
    for (const Matrix2& m : {element_matrix(QuadrupoleFocus{0.0, 3e-3, 0.02}, U),
                             element_matrix(QuadrupoleDefocus{0.0, 3e-3, 0.02}, U)})
        CHECK((m - element_matrix(Drift{0.02}, U)).norm() == 0.0);
    const Matrix2 tiny = element_matrix(QuadrupoleFocus{1e-20, 3e-3, 0.02}, U);
    CHECK((tiny - element_matrix(Drift{0.02}, U)).norm() < 1e-12);
}

TEST_CASE("element validation") {
    CHECK_THROWS_AS(validate(Drift{-1.0}), ConfigError);
    CHECK_THROWS_AS(validate(Biprism{1.0, 1e-6, 1e-6}), ConfigError);
    CHECK_THROWS_AS(validate(Biprism{1.0, 1e-3, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate(Biprism{1.0, 1e-3, 1e-6, 0}), ConfigError);
    CHECK_THROWS_AS(validate(QuadrupoleFocus{-1.0, 1e-3, 0.01}), ConfigError);
    CHECK_THROWS_AS(validate(QuadrupoleDefocus{1.0, 0.0, 0.01}), ConfigError);
    CHECK_THROWS_AS(validate(QuadrupoleDefocus{1.0, 1e-3, 0.0}), ConfigError);
    CHECK_NOTHROW(validate(reference_biprism));
}

TEST_CASE("biprism deflection and kick") {
    const double U = 1000.0;
    const double gamma = biprism_deflection(reference_biprism, U);
    CHECK(gamma == doctest::Approx(3.14159265358979 / (2 * std::log(1e4)) * 0.5 / U).epsilon(1e-14));
    Biprism decimal = reference_biprism;
    decimal.log_base = LogBase::decimal;
    CHECK(biprism_deflection(decimal, U) == doctest::Approx(gamma * std::log(1e4) / 4.0).epsilon(1e-14));
    Biprism doubled = reference_biprism;
    doubled.voltage *= 3.0;
    CHECK(biprism_deflection(doubled, U) == doctest::Approx(3 * gamma).epsilon(1e-14));

    CHECK_THROWS_AS(element_matrix(reference_biprism, U, 0.0), DomainError);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> slope(-1e-2, 1e-2);
    for (int i = 0; i < 100; ++i) {
        double s = slope(rng);
        if (s == 0.0)
            s = 1e-5;
        const RayState in{1e-6 * i, s};
        for (int side : {+1, -1}) {
            Biprism b = reference_biprism;
            b.side = side;
            const RayState kicked = apply(b, U, in);
            const Eigen::Vector2d m = element_matrix(b, U, s) * Eigen::Vector2d(in.x, in.slope);
            CHECK(std::abs(kicked.x - m(0)) <= 1e-12 * std::abs(m(0)) + 1e-30);
            CHECK(std::abs(kicked.slope - m(1)) <= 1e-12 * std::abs(m(1)));
        }
    }
}

TEST_CASE("random beamline compositions keep unit determinant") {
    std::mt19937_64 rng(5);
    // Instrument-sized elements: drifts up to 15 cm, quadrupoles up to 10 V
    // over 1-3 cm at a 3 mm aperture.
    std::uniform_real_distribution<double> len(0.0, 0.15);
    std::uniform_real_distribution<double> volt(0.0, 10.0);
    std::uniform_real_distribution<double> qlen(0.01, 0.03);
    std::uniform_int_distribution<int> kind(0, 2);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<NamedElement> elements;
        const int n = 1 + trial % 8;
        for (int i = 0; i < n; ++i) {
            OpticalElement e;
            switch (kind(rng)) {
            case 0: e = Drift{len(rng)}; break;
            case 1: e = QuadrupoleFocus{volt(rng), 3e-3, qlen(rng)}; break;
            default: e = QuadrupoleDefocus{volt(rng), 3e-3, qlen(rng)}; break;
            }
            elements.push_back({"e" + std::to_string(i), e});
        }
        const Beamline bl(1000.0, elements);
        CHECK(std::abs(system_matrix(bl).determinant() - 1.0) < 1e-12);
    }
}

TEST_CASE("tracing") {
    const double U = 1000.0;
    const Beamline drifts(U, {{"a", Drift{0.1}}, {"b", Drift{0.2}}});
    const auto tr = trace(drifts, {1e-6, 2e-4});
    REQUIRE(tr.points.size() == 3);
    CHECK(tr.points[0].label == "start");
    CHECK(tr.points[2].ray.x == doctest::Approx(1e-6 + 0.3 * 2e-4).epsilon(1e-15));
    CHECK(tr.points[2].ray.slope == 2e-4);
    CHECK(tr.points[2].position == doctest::Approx(0.3));

    const Beamline empty(U, {{"nothing", Drift{0.0}}});
    const auto e = trace(empty, {3e-6, 1e-4});
    CHECK(e.points.back().ray.x == 3e-6);
    CHECK(e.points.back().ray.slope == 1e-4);

    // On-axis pair through a symmetric biprism, then a drift d.
    const double d = 0.4;
    const Beamline bp(U, {{"bp", reference_biprism}, {"d", Drift{d}}}, {{"end", 2}});
    const double gamma = biprism_deflection(reference_biprism, U);
    CHECK(path_separation(bp, "end") == doctest::Approx(2 * d * std::tan(gamma)).epsilon(1e-14));
    const auto plus = trace(bp, {}, +1).points.back().ray.x;
    const auto minus = trace(bp, {}, -1).points.back().ray.x;
    CHECK(plus == -minus);
    CHECK_THROWS_AS(path_separation(bp, "nowhere"), ConfigError);
    CHECK_THROWS_AS(system_matrix(bp), DomainError);
}

TEST_CASE("thin doublet focuses weakly") {
    const double U = 1000.0;
    const double l = 0.01;
    const double voltage = 0.5;
    const double k = quadrupole_strength(voltage, 3e-3, U);
    const Beamline doublet(U, {{"f", QuadrupoleFocus{voltage, 3e-3, l}},
                               {"d", QuadrupoleDefocus{voltage, 3e-3, l}}});
    const Matrix2 m = system_matrix(doublet);
    // Second-order expansion: M21 = -k^4 l^3 (to leading order), net focusing.
    const double expected = -std::pow(k, 4) * std::pow(l, 3);
    CHECK(m(1, 0) < 0.0);
    CHECK(m(1, 0) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("linearity of biprism-free tracing") {
    const Beamline bl(1000.0, {{"a", Drift{0.1}}, {"q", QuadrupoleFocus{5.0, 3e-3, 0.02}},
                               {"b", Drift{0.05}}, {"r", QuadrupoleDefocus{7.0, 3e-3, 0.02}}});
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 1e-5);
    for (int i = 0; i < 20; ++i) {
        const RayState a{n(rng), n(rng)};
        const RayState b{n(rng), n(rng)};
        const double alpha = 2.5, beta = -0.7;
        const auto ta = trace(bl, a).points.back().ray;
        const auto tb = trace(bl, b).points.back().ray;
        const auto tc = trace(bl, {alpha * a.x + beta * b.x, alpha * a.slope + beta * b.slope})
                            .points.back()
                            .ray;
        CHECK(tc.x == doctest::Approx(alpha * ta.x + beta * tb.x).epsilon(1e-12));
        CHECK(tc.slope == doctest::Approx(alpha * ta.slope + beta * tb.slope).epsilon(1e-12));
    }
}

TEST_CASE("strong defocusing quadrupole warns") {
    const Beamline bl(1000.0, {{"q", QuadrupoleDefocus{5000.0, 1e-3, 0.05}}});
    CHECK_FALSE(trace(bl, {1e-6, 0.0}).warnings.empty());
}

TEST_CASE("reference beamline file") {
    const auto bl = load_beamline(ALOOF_DATA_DIR "/reference_beamline.ini");
    const double wien = path_separation(bl, "wien");
    CHECK(wien > 1e-6);
    CHECK(wien < 10e-6);
    CHECK(path_separation(bl, "plate") > 1e-6);
    // Doubling the biprism voltage roughly doubles the separation.
    const double doubled = path_separation(bl.with_biprism_scaled(2.0), "wien");
    CHECK(doubled / wien == doctest::Approx(2.0).epsilon(1e-3));
    // Finite difference on gamma confirms small-angle linearity.
    const double h = 1e-3;
    const double up = path_separation(bl.with_biprism_scaled(1 + h), "wien");
    const double down = path_separation(bl.with_biprism_scaled(1 - h), "wien");
    CHECK((up - down) / (2 * h) == doctest::Approx(wien).epsilon(1e-6));
}

TEST_CASE("beamline parse errors carry line numbers") {
    const auto bad_type = R"([beamline]
voltage = 1000 V
[d1]
type = drift
length = 10 cm
[x]
type = mirror
)";
    try {
        parse(bad_type);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 7);
        CHECK(std::string(e.what()).find("test.ini:7") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("[beamline]\nvoltage = 1000 V\n[d]\ntype = drift\nlength = 3 parsecs\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse("[beamline]\nvoltage = 1000 V\n"), ConfigError);
    CHECK_THROWS_AS(parse("[beamline]\nvoltage = -1 V\n[d]\ntype = drift\nlength = 1 m\n"),
                    ConfigError);
    const auto ok = parse("[beamline]\nvoltage = 1 kV\n[d]\ntype = drift\nlength = 5 cm\n"
                          "[m]\ntype = marker\n");
    CHECK(ok.beam_voltage() == 1000.0);
    CHECK(ok.marker("m").after_elements == 1);
}

TEST_CASE("Wien shift and contrast model") {
    const WienFilter wf{0.10, 5e-3, 1.0};
    CHECK(wien_shift(wf, 1000.0, 2.9e-6) == doctest::Approx(29e-9).epsilon(1e-12));
    CHECK(wien_shift(WienFilter{0.10, 5e-3, 0.0}, 1000.0, 2.9e-6) == 0.0);
    CHECK(wien_shift(wf, 1000.0, 5.8e-6) == doctest::Approx(2 * wien_shift(wf, 1000.0, 2.9e-6)));
    const double lc = 66e-9;
    CHECK(wien_contrast_model(0.0, lc) == 1.0);
    CHECK(wien_contrast_model(lc, lc) == doctest::Approx(std::exp(-3.14159265358979 / 2)));
    CHECK(wien_contrast_model(-20e-9, lc) == wien_contrast_model(20e-9, lc));
    double prev = 1.0;
    for (int i = 1; i < 50; ++i) {
        const double c = wien_contrast_model(i * 5e-9, lc);
        CHECK(c < prev);
        prev = c;
    }
    CHECK_THROWS_AS((WienFilter{0.0, 5e-3}.validate()), ConfigError);
}

TEST_CASE("Wien extraction") {
    const WienFilter wf{0.10, 5e-3};
    const double lc = physics::coherence_length(1000.0, 0.377);
    const auto volts = physics::linear_grid(-6, 6, 41);
    const auto clean = wien_synthetic_scan(wf, 1000.0, 2.9e-6, lc, volts, 0.0, 1);
    const auto r = wien_extract_separation(clean, wf, 1000.0, lc);
    CHECK(r.separation == doctest::Approx(2.9e-6).epsilon(1e-6));

    // Identity across separations; the scan range follows the decay.
    for (double dx : {1e-6, 3e-6, 7e-6, 12e-6, 20e-6}) {
        const double span = 6.0 * 2.9e-6 / dx;
        const auto scan = wien_synthetic_scan(wf, 1000.0, dx, lc,
                                              physics::linear_grid(-span, span, 41), 0.0, 1);
        CHECK(wien_extract_separation(scan, wf, 1000.0, lc).separation
              == doctest::Approx(dx).epsilon(1e-6));
    }

    const auto noisy = wien_synthetic_scan(wf, 1000.0, 2.9e-6, lc, volts, 0.01, 17);
    const auto n = wien_extract_separation(noisy, wf, 1000.0, lc, lc * 40.0 / 377.0);
    CHECK(n.separation == doctest::Approx(2.9e-6).epsilon(0.02));
    CHECK(n.relative_uncertainty >= 7.0 / 66.0);
    CHECK(n.uncertainty == doctest::Approx(n.relative_uncertainty * n.separation));

    CHECK(wien_synthetic_scan(wf, 1000.0, 2.9e-6, lc, volts, 0.01, 4).front().contrast
          == wien_synthetic_scan(wf, 1000.0, 2.9e-6, lc, volts, 0.01, 4).front().contrast);

    const std::vector<WienScanPoint> few(clean.begin(), clean.begin() + 4);
    CHECK_THROWS_AS(wien_extract_separation(few, wf, 1000.0, lc), AnalysisError);
    const auto flat = wien_synthetic_scan(wf, 1000.0, 2.9e-6, lc,
                                          physics::linear_grid(-0.1, 0.1, 21), 0.0, 1);
    CHECK_THROWS_AS(wien_extract_separation(flat, wf, 1000.0, lc), AnalysisError);
}
