#pragma once

#include <aloof/decoherence/models.hpp>
#include <aloof/fringe/analysis.hpp>
#include <aloof/fringe/image.hpp>
#include <aloof/optics/wien.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aloof::cli {

struct RunConfig {
    std::filesystem::path source;  // empty when built from defaults

    // [run]
    std::string material = "silicon-n-doped";
    std::string material_section;
    std::vector<decoherence::Model> models{std::begin(decoherence::all_models),
                                           std::end(decoherence::all_models)};
    std::vector<double> separations{9.4e-6};
    std::uint64_t seed = 1;
    std::filesystem::path out = "aloof-out";

    // [beam]
    double beam_voltage = 1000.0;
    double energy_spread = 0.377;        // eV
    double energy_spread_sigma = 0.040;  // eV

    // [geometry]
    double plate_length = 0.01;
    /// -3 um for the bundled silicon, 0 otherwise, unless set.
    std::optional<double> surface_offset;
    double z_min = 1e-6;
    double z_max = 40e-6;
    std::size_t z_points = 40;

    // [quadrature]
    decoherence::ModelOptions model_options;

    // [image]
    decoherence::Model image_model = decoherence::Model::markov;
    double image_separation = 9.4e-6;
    fringe::ImageGeometry image{200, 200, 0.125e-6, 0.5e-6, 0.0};
    double total_counts = 5e5;
    fringe::FringeModelParams fringe{1.0, 1.0, 1e-6, 0.3, 50e-6, 0.1};

    // [analysis]
    fringe::SliceOptions slice;
    double reference_band = 5e-6;
    /// The pipeline summary compares slabs centred above this height.
    double compare_above = 5e-6;

    // [wien]
    optics::WienFilter wien{0.10, 5e-3, 0.0};
    double wien_separation = 2.9e-6;
    double wien_noise = 0.01;
    double wien_voltage_min = -6.0;
    double wien_voltage_max = 6.0;
    std::size_t wien_points = 41;

    // [optics]
    std::optional<std::filesystem::path> beamline;
    std::vector<std::string> markers;  // all markers when empty

    double resolved_surface_offset(const std::string& material_name) const;
    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Reads the sections above; unknown sections or keys are errors.
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<double> parse_length_list(const std::string& text);
std::vector<decoherence::Model> parse_model_list(const std::string& text);

} // namespace aloof::cli
