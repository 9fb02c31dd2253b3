#include <doctest.h>

#include <aloof/decoherence/curve.hpp>
#include <aloof/errors.hpp>
#include <aloof/fringe/analysis.hpp>
#include <aloof/fringe/image.hpp>
#include <aloof/fringe/model.hpp>
#include <aloof/math/special.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

using namespace aloof;
using namespace aloof::fringe;

namespace {

constexpr double two_pi = 6.283185307179586;

FringeModelParams base_params(double contrast = 0.6) {
    return {1.0, contrast, 1e-6, 0.3, 50e-6, 0.1};
}

decoherence::VisibilityCurve flat_curve(double v, double z_max = 100e-6) {
    decoherence::VisibilityCurve c;
    c.model = decoherence::Model::anglin;
    c.z_values = {-10e-6, z_max};
    c.gamma_values = {-std::log(v), -std::log(v)};
    c.visibility_values = {v, v};
    c.quadrature_errors = {0.0, 0.0};
    c.converged = {true, true};
    return c;
}

std::vector<double> model_histogram(const FringeModelParams& p, std::size_t n, double pitch) {
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        h[i] = fringe_intensity(p, (static_cast<double>(i) - (n - 1) / 2.0) * pitch);
    return h;
}

} // namespace

TEST_CASE("fringe model function") {
    auto p = base_params(0.0);
    for (double x : {-3e-6, 0.0, 2.2e-6})
        CHECK(fringe_intensity(p, x)
              == doctest::Approx(math::sinc(two_pi * x / p.envelope_width + p.envelope_phase)
                                 * math::sinc(two_pi * x / p.envelope_width + p.envelope_phase)));
    p = {2.0, 0.7, 1e-6, 0.0, 50e-6, 0.0};
    CHECK(fringe_intensity(p, 0.0) == doctest::Approx(2.0 * 1.7));
    p.envelope_width = 1e30;
    for (double x : {0.1e-6, 0.37e-6, -2.5e-6})
        CHECK(fringe_intensity(p, x + p.spacing) == doctest::Approx(fringe_intensity(p, x)).epsilon(1e-9));
    CHECK_THROWS_AS((FringeModelParams{1, 1.2, 1e-6, 0, 1e-5, 0}.validate()), DomainError);
    CHECK_THROWS_AS((FringeModelParams{0, 0.5, 1e-6, 0, 1e-5, 0}.validate()), DomainError);
    CHECK_THROWS_AS((FringeModelParams{1, 0.5, -1e-6, 0, 1e-5, 0}.validate()), DomainError);
}

TEST_CASE("fit recovers exact model data") {
    const double pitch = 0.125e-6;
    auto p = base_params(0.6);
    p.intensity = 500.0;
    const auto h = model_histogram(p, 200, pitch);
    const auto fit = fit_fringe_model(h, pitch);
    CHECK(fit.converged);
    CHECK(fit.periodic);
    CHECK(fit.params.contrast == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(fit.params.spacing == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(fit.params.envelope_width == doctest::Approx(50e-6).epsilon(1e-5));
    double worst = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        worst = std::max(worst, std::abs(fringe_intensity(fit.params, (i - 99.5) * pitch) - h[i]));
    CHECK(worst < 1e-9 * p.intensity);

    // From a deliberately poor explicit start.
    FringeFitOptions opts;
    opts.initial = FringeModelParams{400.0, 0.3, 1.03e-6, 0.0, 40e-6, 0.0};
    const auto fit2 = fit_fringe_model(h, pitch, opts);
    CHECK(fit2.params.contrast == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("fit with 1% Gaussian noise stays within 3 sigma") {
    const double pitch = 0.125e-6;
    auto truth = base_params(0.6);
    truth.intensity = 1000.0;
    const auto clean = model_histogram(truth, 200, pitch);
    int within = 0;
    const int trials = 50;
    for (int seed = 0; seed < trials; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, 1.0);
        auto h = clean;
        for (double& v : h)
            v *= 1.0 + 0.01 * n(rng);
        FringeFitOptions opts;
        opts.weighting = FitWeighting::counts;
        const auto fit = fit_fringe_model(h, pitch, opts);
        const double sc = std::sqrt(fit.covariance(p_contrast, p_contrast));
        const double ss = std::sqrt(fit.covariance(p_spacing, p_spacing));
        within += std::abs(fit.params.contrast - 0.6) <= 3 * sc
               && std::abs(fit.params.spacing - 1e-6) <= 3 * ss;
    }
    // 3 sigma on two parameters: expect ~99%; allow two misses in fifty.
    CHECK(within >= trials - 2);
}

TEST_CASE("constant histogram has no periodicity") {
    const std::vector<double> h(128, 50.0);
    const auto fit = fit_fringe_model(h, 0.125e-6);
    CHECK_FALSE(fit.periodic);
    CHECK(fit.params.contrast == 0.0);
    CHECK_THROWS_AS(fit_fringe_model(std::vector<double>(7, 3.0), 1e-7), AnalysisError);
    CHECK_THROWS_AS(fit_fringe_model(std::vector<double>(64, 0.0), 1e-7), AnalysisError);
}

TEST_CASE("image synthesis") {
    const ImageGeometry g{200, 160, 0.125e-6, 0.5e-6, 0.0};
    const auto a = synthesize_image(flat_curve(1.0), base_params(), g, 5e5, 42);
    const auto b = synthesize_image(flat_curve(1.0), base_params(), g, 5e5, 42);
    const auto c = synthesize_image(flat_curve(1.0), base_params(), g, 5e5, 43);
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);
    const double mean = static_cast<double>(a.sum()) / (200.0 * 160.0);
    CHECK(mean == doctest::Approx(15.625).epsilon(0.01));
    CHECK(std::abs(static_cast<double>(a.sum()) - 5e5) < 5 * std::sqrt(5e5));
    CHECK(a.row_z(0) == doctest::Approx(0.25e-6));
    CHECK(a.top_z() == doctest::Approx(80e-6));
    CHECK(a.column_x(0) == doctest::Approx(-99.5 * 0.125e-6));
    CHECK(*a.seed == 42);

    // Curve too short for the image.
    CHECK_THROWS_AS(synthesize_image(flat_curve(1.0, 50e-6), base_params(), g, 5e5, 1), DomainError);
}

TEST_CASE("flat visibility gives a flat profile") {
    const ImageGeometry g{200, 160, 0.125e-6, 0.5e-6, 0.0};
    const auto img = synthesize_image(flat_curve(1.0), base_params(0.6), g, 5e7, 5);
    const auto prof = slice_and_fit(img);
    CHECK(prof.size() == 40);
    for (std::size_t i = 0; i < prof.size(); ++i) {
        CHECK(prof.usable(i));
        CHECK(prof.contrast[i] == doctest::Approx(0.6).epsilon(0.05));
    }
}

TEST_CASE("noise-free slab recovers the contrast exactly") {
    // A slab whose counts are the exact expectation (scaled up and rounded
    // with negligible error) reproduces C.
    FringeImage img;
    img.columns = 200;
    img.rows = 4;
    img.pixel_pitch_x = 0.125e-6;
    img.pixel_pitch_z = 0.5e-6;
    auto p = base_params(0.6);
    p.intensity = 1e9;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t col = 0; col < 200; ++col)
            img.counts.push_back(static_cast<std::uint32_t>(
                std::llround(fringe_intensity(p, img.column_x(col)))));
    const auto h = slab_histogram(img, 0, 4);
    const auto fit = fit_fringe_model(h, img.pixel_pitch_x);
    CHECK(fit.params.contrast == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("Poisson slabs at 5e5-count image statistics") {
    const ImageGeometry g{200, 160, 0.125e-6, 0.5e-6, 0.0};
    int within = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto img = synthesize_image(flat_curve(1.0), base_params(0.6), g, 5e5, seed);
        const auto fit = fit_fringe_model(slab_histogram(img, 76, 80), g.pixel_pitch_x);
        within += std::abs(fit.params.contrast - 0.6) <= 0.03;
    }
    CHECK(within >= 95);
}

TEST_CASE("null-contrast slabs are consistent with zero") {
    // Lower half of the image carries no fringes; the upper half pins the
    // shared geometry. Profiles report max(C, 0), so a null slab passes
    // when that value sits within two sigma of zero.
    decoherence::VisibilityCurve c = flat_curve(1.0);
    c.z_values = {-10e-6, 40.1e-6, 40.4e-6, 100e-6};
    c.visibility_values = {0.0, 0.0, 1.0, 1.0};
    c.gamma_values = {1e3, 1e3, 0.0, 0.0};
    c.quadrature_errors = {0.0, 0.0, 0.0, 0.0};
    c.converged = {true, true, true, true};
    const ImageGeometry g{200, 160, 0.125e-6, 0.5e-6, 0.0};
    int null_slabs = 0, consistent = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto img = synthesize_image(c, base_params(0.6), g, 5e5, seed);
        const auto prof = slice_and_fit(img);
        for (std::size_t k = 0; k < prof.size(); ++k) {
            if (prof.z_upper[k] > 40e-6)
                continue;
            ++null_slabs;
            consistent += prof.status[k] == SlabStatus::ok && prof.contrast[k] <= 2.0 * prof.sigma[k];
        }
    }
    REQUIRE(null_slabs == 200);
    // A Gaussian estimator lands below +2 sigma 97.7% of the time.
    CHECK(consistent >= 190);
}

TEST_CASE("contrast estimator is unbiased at ten times the image statistics") {
    const ImageGeometry g{200, 160, 0.125e-6, 0.5e-6, 0.0};
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto img = synthesize_image(flat_curve(1.0), base_params(0.6), g, 5e6, seed);
        sum += fit_fringe_model(slab_histogram(img, 76, 80), g.pixel_pitch_x).params.contrast;
    }
    CHECK(sum / 100.0 == doctest::Approx(0.6).epsilon(0.005 / 0.6));
}

TEST_CASE("slice_and_fit is invariant under intensity rescaling") {
    const ImageGeometry g{200, 40, 0.125e-6, 0.5e-6, 0.0};
    const auto img = synthesize_image(flat_curve(0.8), base_params(0.6), g, 2e7, 3);
    auto scaled = img;
    for (auto& c : scaled.counts)
        c *= 3;
    const auto a = slice_and_fit(img);
    const auto b = slice_and_fit(scaled);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(b.contrast[i] == doctest::Approx(a.contrast[i]).epsilon(1e-6));
}

TEST_CASE("independent slab mode matches shared mode where contrast is high") {
    const ImageGeometry g{200, 40, 0.125e-6, 0.5e-6, 0.0};
    const auto img = synthesize_image(flat_curve(1.0), base_params(0.6), g, 5e6, 8);
    SliceOptions opts;
    opts.mode = SlabMode::independent;
    const auto ind = slice_and_fit(img, opts);
    const auto shared = slice_and_fit(img);
    for (std::size_t i = 0; i < ind.size(); ++i)
        CHECK(ind.contrast[i] == doctest::Approx(shared.contrast[i]).epsilon(0.05));
}

TEST_CASE("partial top slab is dropped and slabs never vanish") {
    const ImageGeometry g{200, 41, 0.125e-6, 0.5e-6, 0.0};
    const auto img = synthesize_image(flat_curve(1.0), base_params(0.6), g, 5e5, 2);
    const auto prof = slice_and_fit(img);
    CHECK(prof.size() == 10);
    CHECK(prof.z_top == doctest::Approx(20e-6));
}

TEST_CASE("image without fringes flags every slab") {
    const ImageGeometry g{200, 40, 0.125e-6, 0.5e-6, 0.0};
    const auto img = synthesize_image(flat_curve(1.0), base_params(0.0), g, 5e5, 2);
    const auto prof = slice_and_fit(img);
    REQUIRE(prof.size() == 10);
    for (std::size_t i = 0; i < prof.size(); ++i)
        CHECK(prof.status[i] == SlabStatus::no_periodicity);
    CHECK(prof.degraded());
    CHECK_THROWS_AS(normalize_profile(prof), AnalysisError);
}

TEST_CASE("shear correction straightens tilted fringes") {
    // Fringes drift by 0.2 columns per row, most of a period over the
    // image. Uncorrected, the shared-geometry fit blurs them; the shear
    // polynomial undoes the drift up to linear-interpolation smoothing.
    FringeImage img;
    img.columns = 200;
    img.rows = 40;
    img.pixel_pitch_x = 0.125e-6;
    img.pixel_pitch_z = 0.5e-6;
    auto p = base_params(0.6);
    p.intensity = 1e6;
    for (std::size_t r = 0; r < img.rows; ++r)
        for (std::size_t col = 0; col < img.columns; ++col)
            img.counts.push_back(static_cast<std::uint32_t>(std::llround(
                fringe_intensity(p, img.column_x(col) - 0.125e-6 * 0.2 * static_cast<double>(r)))));
    SliceOptions opts;
    opts.shear = {0.0, 0.2};
    const auto fixed = slice_and_fit(img, opts);
    const auto raw = slice_and_fit(img);
    double worst_fixed = 0.0, worst_raw = 0.0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        worst_fixed = std::max(worst_fixed, std::abs(fixed.contrast[i] - 0.6));
        worst_raw = std::max(worst_raw, std::abs(raw.contrast[i] - 0.6));
    }
    CHECK(worst_fixed < 0.05);
    CHECK(worst_raw > 4 * worst_fixed);
}

TEST_CASE("normalization") {
    ContrastProfile p;
    for (int i = 0; i < 10; ++i) {
        p.z_lower.push_back(2e-6 * i);
        p.z_upper.push_back(2e-6 * (i + 1));
        p.z_centers.push_back(2e-6 * i + 1e-6);
        p.contrast.push_back(0.5);
        p.sigma.push_back(0.01);
        p.status.push_back(SlabStatus::ok);
    }
    p.z_top = 20e-6;
    const auto n = normalize_profile(p, 5e-6);
    CHECK(n.normalized);
    CHECK(n.normalization_constant == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 0; i < n.size(); ++i) {
        CHECK(n.contrast[i] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(n.sigma[i] == doctest::Approx(0.02).epsilon(1e-12));
    }
    const auto twice = normalize_profile(n, 5e-6);
    for (std::size_t i = 0; i < n.size(); ++i)
        CHECK(twice.contrast[i] == doctest::Approx(n.contrast[i]).epsilon(1e-14));
    CHECK(twice.normalization_constant == doctest::Approx(n.normalization_constant).epsilon(1e-14));

    // Already at one in the band: unchanged.
    auto q = p;
    q.contrast = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 1.0, 1.0};
    const auto nq = normalize_profile(q, 5e-6);
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(nq.contrast[i] == doctest::Approx(q.contrast[i]).epsilon(1e-14));

    // Band mean uses only the slabs inside the top 5 um (the top two).
    q.contrast[8] = 0.6;
    q.contrast[9] = 0.8;
    q.contrast[7] = 0.1;
    CHECK(normalize_profile(q, 5e-6).normalization_constant == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_profile(q, 1e-6), AnalysisError);
}

TEST_CASE("PGM round trip and sidecar") {
    const ImageGeometry g{50, 20, 0.125e-6, 0.5e-6, -1e-6};
    const auto img = synthesize_image(flat_curve(1.0), base_params(), g, 1e5, 9);
    const auto dir = std::filesystem::temp_directory_path() / "aloof_pgm_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "img.pgm";
    save_image(path, img, {{"origin", "unit-test"}});
    const auto back = load_image(path);
    CHECK(back.counts == img.counts);
    CHECK(back.columns == 50);
    CHECK(back.rows == 20);
    CHECK(back.pixel_pitch_x == img.pixel_pitch_x);
    CHECK(back.z_of_bottom_row == img.z_of_bottom_row);
    CHECK(back.seed == img.seed);

    std::ostringstream raw;
    write_pgm(raw, img);
    const auto bytes = raw.str();
    CHECK(bytes.rfind("P5", 0) == 0);
    // Truncated data.
    std::istringstream cut(bytes.substr(0, bytes.size() - 7));
    CHECK_THROWS_AS(read_pgm(cut), FormatError);
    std::istringstream junk("P2\n3 3\n255\n");
    CHECK_THROWS_AS(read_pgm(junk), FormatError);

    // 8-bit input is accepted too.
    std::istringstream eight(std::string("P5\n# comment\n2 1\n255\n") + '\x05' + '\x07');
    const auto small = read_pgm(eight);
    CHECK(small.counts == std::vector<std::uint32_t>{5, 7});

    std::filesystem::remove(fringe::sidecar_path(path));
    CHECK_THROWS_AS(load_image(path), FormatError);
    std::filesystem::remove_all(dir);

    auto big = img;
    big.counts[0] = 70000;
    std::ostringstream sink;
    CHECK_THROWS_AS(write_pgm(sink, big), FormatError);
}

TEST_CASE("profile CSV") {
    const ImageGeometry g{200, 40, 0.125e-6, 0.5e-6, 0.0};
    const auto img = synthesize_image(flat_curve(1.0), base_params(), g, 5e5, 2);
    const auto prof = normalize_profile(slice_and_fit(img), 5e-6);
    std::ostringstream out;
    write_profile_csv(out, prof, {{"seed", "2"}});
    const auto text = out.str();
    CHECK(text.find("# seed=2") != std::string::npos);
    CHECK(text.find("z_m,contrast,sigma,normalized,status\n") != std::string::npos);
    CHECK(text.find("# normalization_constant=") != std::string::npos);
}
