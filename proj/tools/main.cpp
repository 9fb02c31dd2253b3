#include "commands.hpp"
#include "run_config.hpp"

#include <aloof/errors.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>

namespace {

using namespace aloof;
using namespace aloof::cli;

struct Overrides {
    std::string config;
    std::string models;
    std::string material;
    std::string separations;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("-c,--config", o.config, "INI run configuration")->check(CLI::ExistingFile);
    app->add_option("--out", o.out, "output directory");
    app->add_option("--seed", o.seed, "random seed");
}

void add_physics(CLI::App* app, Overrides& o) {
    app->add_option("--model", o.models,
                    "comma-separated models (markov, finite_temperature, anglin, machnikowski, "
                    "howie) or 'all'");
    app->add_option("--material", o.material, "bundled material name or materials INI file");
    app->add_option("--dx", o.separations, "comma-separated path separations, e.g. 9.4um,3.2um");
    app->add_option("--tol", o.tolerance, "relative quadrature tolerance")
        ->check(CLI::PositiveNumber);
}

RunConfig build_config(const Overrides& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (!o.models.empty())
        cfg.models = parse_model_list(o.models);
    if (!o.material.empty()) {
        cfg.material = o.material;
        cfg.material_section.clear();
    }
    if (!o.separations.empty()) {
        cfg.separations = parse_length_list(o.separations);
        cfg.image_separation = cfg.separations.front();
    }
    if (!o.out.empty())
        cfg.out = o.out;
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.tolerance)
        cfg.model_options.quadrature.relative_tolerance = *o.tolerance;
    if (cfg.models.size() == 1)
        cfg.image_model = cfg.models.front();
    return cfg;
}

int fail(int code, const char* kind, const std::exception& e) {
    std::cerr << "aloof: " << kind << ": " << e.what() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surface-induced decoherence of electron matter waves: model curves, "
                 "beam optics, synthetic interferograms and contrast analysis"};
    app.require_subcommand(1);
    Overrides o;

    auto* models = app.add_subcommand("models", "evaluate decoherence models on a height grid");
    add_common(models, o);
    add_physics(models, o);

    auto* optics = app.add_subcommand("optics", "trace both partial beams through a beamline");
    add_common(optics, o);
    std::string beamline;
    optics->add_option("--beamline", beamline, "beamline INI file (default: built-in reference)")
        ->check(CLI::ExistingFile);

    auto* wien = app.add_subcommand("wien", "synthetic Wien-filter scan and separation estimate");
    add_common(wien, o);

    auto* pipeline = app.add_subcommand(
        "pipeline", "model curve, synthetic image, contrast profile and comparison");
    add_common(pipeline, o);
    add_physics(pipeline, o);

    auto* analyze = app.add_subcommand("analyze", "contrast profile of a PGM interferogram");
    add_common(analyze, o);
    std::string image;
    bool no_normalize = false;
    analyze->add_option("image", image, "PGM image with its .meta sidecar")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_flag("--no-normalize", no_normalize, "skip reference-band normalization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        RunConfig cfg = build_config(o);
        if (!beamline.empty())
            cfg.beamline = beamline;
        auto& log = std::cout;
        if (models->parsed())
            return cmd_models(cfg, log);
        if (optics->parsed())
            return cmd_optics(cfg, log);
        if (wien->parsed())
            return cmd_wien(cfg, log);
        if (pipeline->parsed())
            return cmd_pipeline(cfg, log);
        return cmd_analyze(cfg, image, !no_normalize, log);
    } catch (const ConfigError& e) {
        return fail(exit_config, "configuration error", e);
    } catch (const DomainError& e) {
        return fail(exit_config, "invalid parameter", e);
    } catch (const ConvergenceError& e) {
        return fail(exit_convergence, "not converged", e);
    } catch (const AnalysisError& e) {
        return fail(exit_degraded, "analysis failed", e);
    } catch (const FormatError& e) {
        return fail(exit_format, "bad input file", e);
    } catch (const aloof::Error& e) {
        return fail(exit_config, "error", e);
    }
}
