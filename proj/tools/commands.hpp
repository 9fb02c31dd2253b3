#pragma once

#include "run_config.hpp"

#include <aloof/decoherence/curve.hpp>
#include <aloof/fringe/analysis.hpp>
#include <aloof/fringe/image.hpp>

#include <filesystem>
#include <iosfwd>

namespace aloof::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_convergence = 3,
    exit_degraded = 4,
    exit_format = 5,
};

/// Everything the pipeline command computes, before any file is written.
struct PipelineResult {
    decoherence::VisibilityCurve curve;  // evaluated at the image row centres
    Provenance provenance;
    fringe::FringeImage image;
    fringe::ContrastProfile profile;
    bool normalized = false;
    /// Model V averaged over each slab's rows, normalized like the data.
    std::vector<double> model;
    double model_normalization = 1.0;
    /// Over usable slabs centred above compare_above.
    double max_deviation = 0.0;
    double median_sigma = 0.0;
    std::size_t compared_slabs = 0;
};

PipelineResult run_pipeline(const RunConfig& cfg, std::ostream& log);

int cmd_models(const RunConfig& cfg, std::ostream& log);
int cmd_optics(const RunConfig& cfg, std::ostream& log);
int cmd_wien(const RunConfig& cfg, std::ostream& log);
int cmd_pipeline(const RunConfig& cfg, std::ostream& log);
int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& image, bool normalize,
                std::ostream& log);

} // namespace aloof::cli
