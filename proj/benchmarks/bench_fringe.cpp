#include <benchmark/benchmark.h>

#include <aloof/fringe/analysis.hpp>
#include <aloof/fringe/image.hpp>
#include <aloof/fringe/model.hpp>

#include <cmath>
#include <random>

namespace {

using namespace aloof;

const fringe::FringeModelParams base{1.0, 0.6, 1e-6, 0.3, 50e-6, 0.1};

decoherence::VisibilityCurve flat_curve() {
    decoherence::VisibilityCurve c;
    c.model = decoherence::Model::anglin;
    c.z_values = {-10e-6, 100e-6};
    c.gamma_values = {0.0, 0.0};
    c.visibility_values = {1.0, 1.0};
    c.quadrature_errors = {0.0, 0.0};
    c.converged = {true, true};
    return c;
}

void BM_SynthesizeImage(benchmark::State& state) {
    const auto curve = flat_curve();
    const fringe::ImageGeometry g{};
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(fringe::synthesize_image(curve, base, g, 5e5, seed++));
}
BENCHMARK(BM_SynthesizeImage)->Unit(benchmark::kMillisecond);

void BM_FitSlab(benchmark::State& state) {
    // One 4-row slab of a 500k-count 200 x 160 image: 62.5 counts per bin.
    std::mt19937_64 rng(7);
    std::vector<double> h(200);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = (static_cast<double>(i) - 99.5) * 0.125e-6;
        std::poisson_distribution<int> pois(62.5 * fringe::fringe_intensity(base, x));
        h[i] = pois(rng);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(fringe::fit_fringe_model(h, 0.125e-6));
}
BENCHMARK(BM_FitSlab)->Unit(benchmark::kMicrosecond);

void BM_SliceAndFit(benchmark::State& state) {
    const auto img = fringe::synthesize_image(flat_curve(), base, fringe::ImageGeometry{}, 5e5, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(fringe::slice_and_fit(img));
}
BENCHMARK(BM_SliceAndFit)->Unit(benchmark::kMillisecond);

} // namespace
