#include <benchmark/benchmark.h>

#include <aloof/decoherence/curve.hpp>
#include <aloof/decoherence/models.hpp>
#include <aloof/math/special.hpp>

namespace {

using namespace aloof;

decoherence::DecoherenceInput silicon_input(double dx) {
    physics::InteractionGeometry g;
    g.path_separation = dx;
    g.z_grid = physics::linear_grid(1e-6, 40e-6, 40);
    return {physics::silicon_n_doped(), physics::BeamParams(1000.0, 0.377), g};
}

void BM_ExpIntegralE1(benchmark::State& state) {
    double x = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(math::exp_integral_e1(x));
        x = x < 50.0 ? x * 1.01 : 1e-3;
    }
}
BENCHMARK(BM_ExpIntegralE1);

void BM_MarkovPoint(benchmark::State& state) {
    const auto in = silicon_input(9.4e-6);
    const double z = static_cast<double>(state.range(0)) * 1e-6;
    for (auto _ : state)
        benchmark::DoNotOptimize(decoherence::gamma_markov(in, z));
}
BENCHMARK(BM_MarkovPoint)->Arg(1)->Arg(10)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_MarkovCurve(benchmark::State& state) {
    const auto in = silicon_input(9.4e-6);
    for (auto _ : state)
        benchmark::DoNotOptimize(decoherence::visibility_curve(decoherence::Model::markov, in));
}
BENCHMARK(BM_MarkovCurve)->Unit(benchmark::kMillisecond);

void BM_MachnikowskiMaterial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(decoherence::machnikowski_material(0.37));
}
BENCHMARK(BM_MachnikowskiMaterial)->Unit(benchmark::kMicrosecond);

} // namespace
