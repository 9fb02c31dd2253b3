#include "commands.hpp"

#include "embedded_data.hpp"

#include <aloof/config/materials.hpp>
#include <aloof/decoherence/curve.hpp>
#include <aloof/errors.hpp>
#include <aloof/fringe/analysis.hpp>
#include <aloof/optics/beamline.hpp>
#include <aloof/optics/wien.hpp>
#include <aloof/physics.hpp>
#include <aloof/provenance.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace aloof::cli {

namespace fs = std::filesystem;
using decoherence::Model;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

physics::Material load_material(const RunConfig& cfg) {
    for (const auto& name : physics::bundled_material_names())
        if (cfg.material == name)
            return physics::bundled_material(name);
    const auto local = cfg.resolve(cfg.material);
    if (fs::exists(local))
        return config::resolve_material(local.string(), cfg.material_section);
    return config::resolve_material(cfg.material, cfg.material_section);
}

physics::BeamParams beam(const RunConfig& cfg) {
    return physics::BeamParams(cfg.beam_voltage, cfg.energy_spread);
}

std::string micron_tag(double metres) { return fmt::format("{}", metres * 1e6); }

void add(Provenance& p, std::string key, double value) {
    p.emplace_back(std::move(key), format_number(value));
}

std::string model_list(const std::vector<Model>& models) {
    std::string s;
    for (auto m : models)
        s += (s.empty() ? "" : ",") + std::string(decoherence::to_string(m));
    return s;
}

} // namespace

int cmd_models(const RunConfig& cfg, std::ostream& log) {
    if (cfg.models.empty())
        throw ConfigError("no models selected");
    const auto material = load_material(cfg);
    physics::InteractionGeometry geometry;
    geometry.plate_length = cfg.plate_length;
    geometry.surface_offset = cfg.resolved_surface_offset(material.name());
    geometry.z_grid = physics::linear_grid(cfg.z_min, cfg.z_max, cfg.z_points);
    const decoherence::DecoherenceInput base_input(material, beam(cfg), geometry);

    std::vector<std::vector<decoherence::VisibilityCurve>> curves;
    bool converged = true;
    for (double dx : cfg.separations) {
        const auto input = base_input.with_separation(dx);
        auto provenance = decoherence::describe(input, cfg.model_options);
        curves.emplace_back();
        for (Model model : cfg.models) {
            auto curve = decoherence::visibility_curve(model, input, cfg.model_options);
            const auto path = cfg.out
                / fmt::format("curve_{}_{}_dx{}um.csv", decoherence::to_string(model),
                              material.name(), micron_tag(dx));
            auto out = open_output(path);
            decoherence::write_curve_csv(out, curve, provenance);
            log << "wrote " << path.string() << '\n';
            if (!curve.all_converged()) {
                converged = false;
                std::cerr << fmt::format("warning: {} quadrature did not converge at {} of {} "
                                         "points (dx = {} m); flagged in {}\n",
                                         decoherence::to_string(model),
                                         std::count(curve.converged.begin(),
                                                    curve.converged.end(), false),
                                         curve.converged.size(), dx, path.string());
            }
            curves.back().push_back(std::move(curve));
        }
    }

    // Comparison table: one block of rows per separation, one column per model.
    auto provenance = decoherence::describe(base_input, cfg.model_options);
    provenance.erase(std::remove_if(provenance.begin(), provenance.end(),
                                    [](const auto& kv) {
                                        return kv.first == "geometry.path_separation_m";
                                    }),
                     provenance.end());
    std::string separations;
    for (double dx : cfg.separations)
        separations += (separations.empty() ? "" : ",") + format_number(dx);
    provenance.emplace_back("separations_m", separations);
    provenance.emplace_back("models", model_list(cfg.models));
    const auto path = cfg.out / fmt::format("comparison_{}.csv", material.name());
    auto out = open_output(path);
    write_provenance(out, provenance);
    out << "dx_m,z_m";
    for (Model m : cfg.models)
        out << ',' << decoherence::to_string(m);
    out << ",all_converged\n";
    for (std::size_t d = 0; d < cfg.separations.size(); ++d) {
        for (std::size_t i = 0; i < geometry.z_grid.size(); ++i) {
            out << format_number(cfg.separations[d]) << ',' << format_number(geometry.z_grid[i]);
            bool ok = true;
            for (const auto& curve : curves[d]) {
                out << ',' << format_number(curve.visibility_values[i]);
                ok = ok && curve.converged[i];
            }
            out << ',' << (ok ? 1 : 0) << '\n';
        }
    }
    log << "wrote " << path.string() << '\n';
    return converged ? exit_ok : exit_convergence;
}

int cmd_optics(const RunConfig& cfg, std::ostream& log) {
    const auto beamline = [&] {
        if (cfg.beamline)
            return optics::load_beamline(*cfg.beamline);
        std::istringstream in{std::string(embedded::reference_beamline)};
        return optics::parse_beamline(in, "reference_beamline.ini");
    }();
    const auto plus = optics::trace(beamline, {}, +1);
    const auto minus = optics::trace(beamline, {}, -1);
    for (const auto& w : plus.warnings)
        std::cerr << "warning: " << w << '\n';

    Provenance provenance = base_provenance();
    provenance.emplace_back("beamline", cfg.beamline ? cfg.beamline->string()
                                                     : std::string("reference_beamline.ini"));
    add(provenance, "beam.voltage_v", beamline.beam_voltage());
    const auto path = cfg.out / "trace.csv";
    auto out = open_output(path);
    write_provenance(out, provenance);
    out << "element,type,position_m,x_plus_m,slope_plus,x_minus_m,slope_minus,separation_m\n";

    log << fmt::format("{:<24} {:<20} {:>10} {:>14} {:>14} {:>14} {:>14}\n", "element", "type",
                       "s [m]", "x+ [m]", "slope+", "x- [m]", "slope-");
    for (std::size_t i = 0; i < plus.points.size(); ++i) {
        const auto& a = plus.points[i];
        const auto& b = minus.points[i];
        const std::string type = i == 0 ? "start" : optics::element_type(beamline.elements()[i - 1].element);
        log << fmt::format("{:<24} {:<20} {:>10.4f} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}\n",
                           a.label, type, a.position, a.ray.x, a.ray.slope, b.ray.x, b.ray.slope);
        out << a.label << ',' << type << ',' << format_number(a.position) << ','
            << format_number(a.ray.x) << ',' << format_number(a.ray.slope) << ','
            << format_number(b.ray.x) << ',' << format_number(b.ray.slope) << ','
            << format_number(std::abs(a.ray.x - b.ray.x)) << '\n';
    }
    std::vector<std::string> markers = cfg.markers;
    if (markers.empty())
        for (const auto& m : beamline.markers())
            markers.push_back(m.name);
    for (const auto& name : markers)
        log << fmt::format("marker {:<16} dx = {:.4e} m ({:.3f} um)\n", name,
                           optics::path_separation(beamline, name),
                           optics::path_separation(beamline, name) * 1e6);
    log << "wrote " << path.string() << '\n';
    return exit_ok;
}

int cmd_wien(const RunConfig& cfg, std::ostream& log) {
    const auto b = beam(cfg);
    const double lc = b.coherence_length();
    const double lc_sigma = lc * cfg.energy_spread_sigma / cfg.energy_spread;
    const auto voltages = physics::linear_grid(cfg.wien_voltage_min, cfg.wien_voltage_max,
                                               cfg.wien_points);
    const auto scan = optics::wien_synthetic_scan(cfg.wien, cfg.beam_voltage, cfg.wien_separation,
                                                  lc, voltages, cfg.wien_noise, cfg.seed);

    Provenance provenance = base_provenance();
    add(provenance, "beam.voltage_v", cfg.beam_voltage);
    add(provenance, "beam.energy_spread_ev", cfg.energy_spread);
    add(provenance, "beam.energy_spread_sigma_ev", cfg.energy_spread_sigma);
    add(provenance, "coherence_length_m", lc);
    add(provenance, "wien.plate_length_m", cfg.wien.plate_length);
    add(provenance, "wien.plate_gap_m", cfg.wien.plate_gap);
    add(provenance, "wien.true_separation_m", cfg.wien_separation);
    add(provenance, "wien.relative_noise", cfg.wien_noise);
    provenance.emplace_back("seed", std::to_string(cfg.seed));

    {
        const auto path = cfg.out / "wien_scan.csv";
        auto out = open_output(path);
        write_provenance(out, provenance);
        out << "voltage_v,contrast\n";
        for (const auto& p : scan)
            out << format_number(p.voltage) << ',' << format_number(p.contrast) << '\n';
        log << "wrote " << path.string() << '\n';
    }

    const auto r = optics::wien_extract_separation(scan, cfg.wien, cfg.beam_voltage, lc, lc_sigma);
    const auto low = optics::wien_extract_separation(scan, cfg.wien, cfg.beam_voltage, lc - lc_sigma);
    const auto high = optics::wien_extract_separation(scan, cfg.wien, cfg.beam_voltage, lc + lc_sigma);
    const auto path = cfg.out / "wien_report.csv";
    auto out = open_output(path);
    write_provenance(out, provenance);
    const std::vector<std::pair<std::string, double>> rows{
        {"true_separation_m", cfg.wien_separation},
        {"estimated_separation_m", r.separation},
        {"relative_error", r.separation / cfg.wien_separation - 1.0},
        {"uncertainty_m", r.uncertainty},
        {"relative_uncertainty", r.relative_uncertainty},
        {"separation_at_lc_minus_sigma_m", low.separation},
        {"separation_at_lc_plus_sigma_m", high.separation},
        {"gaussian_width_v", r.width_voltage},
        {"gaussian_width_sigma_v", r.width_uncertainty},
        {"critical_voltage_v", r.critical_voltage},
    };
    out << "quantity,value\n";
    for (const auto& [k, v] : rows) {
        out << k << ',' << format_number(v) << '\n';
        log << fmt::format("{:<32} {:.6g}\n", k, v);
    }
    log << "wrote " << path.string() << '\n';
    return exit_ok;
}

namespace {

Provenance analysis_provenance(const RunConfig& cfg, const fringe::FringeImage& image) {
    Provenance p = base_provenance();
    p.emplace_back("image.columns", std::to_string(image.columns));
    p.emplace_back("image.rows", std::to_string(image.rows));
    add(p, "image.pixel_pitch_x_m", image.pixel_pitch_x);
    add(p, "image.pixel_pitch_z_m", image.pixel_pitch_z);
    add(p, "image.z_of_bottom_row_m", image.z_of_bottom_row);
    if (image.seed)
        p.emplace_back("image.seed", std::to_string(*image.seed));
    if (image.total_counts)
        add(p, "image.total_counts", *image.total_counts);
    add(p, "analysis.slab_height_m", cfg.slice.slab_height);
    add(p, "analysis.reference_band_m", cfg.reference_band);
    p.emplace_back("analysis.mode", cfg.slice.mode == fringe::SlabMode::shared_geometry
                                        ? "shared_geometry"
                                        : "independent");
    p.emplace_back("analysis.weighting",
                   cfg.slice.fit.weighting == fringe::FitWeighting::model ? "model" : "counts");
    add(p, "analysis.min_spectral_significance", cfg.slice.fit.min_spectral_significance);
    std::string shear;
    for (double c : cfg.slice.shear)
        shear += (shear.empty() ? "" : ",") + format_number(c);
    p.emplace_back("analysis.shear", shear.empty() ? "none" : shear);
    return p;
}

struct Analysis {
    fringe::ContrastProfile profile;
    bool normalized = false;
};

// Slice, fit and normalize; a failed normalization leaves the raw profile
// and is reported as degraded output.
Analysis analyze(const RunConfig& cfg, const fringe::FringeImage& image, bool normalize,
                 std::ostream& log) {
    Analysis a{fringe::slice_and_fit(image, cfg.slice), false};
    if (a.profile.global_fit)
        log << fmt::format("global fit: s = {:.5g} m, s1 = {:.5g} m, C = {:.4f}, "
                           "spectral significance {:.3g}\n",
                           a.profile.global_fit->params.spacing,
                           a.profile.global_fit->params.envelope_width,
                           a.profile.global_fit->params.contrast,
                           a.profile.global_fit->spectral_significance);
    if (normalize) {
        try {
            a.profile = fringe::normalize_profile(a.profile, cfg.reference_band);
            a.normalized = true;
        } catch (const AnalysisError& e) {
            std::cerr << "warning: " << e.what() << "; profile left unnormalized\n";
        }
    }
    return a;
}

int report_flags(const fringe::ContrastProfile& profile, bool normalization_ok, std::ostream& log) {
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < profile.size(); ++i)
        flagged += profile.usable(i) ? 0 : 1;
    log << fmt::format("{} slabs, {} flagged\n", profile.size(), flagged);
    if (flagged > 0 || !normalization_ok) {
        std::cerr << "warning: degraded analysis output\n";
        return exit_degraded;
    }
    return exit_ok;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& cfg, std::ostream& log) {
    const auto material = load_material(cfg);
    physics::InteractionGeometry geometry;
    geometry.plate_length = cfg.plate_length;
    geometry.path_separation = cfg.image_separation;
    geometry.surface_offset = cfg.resolved_surface_offset(material.name());
    for (std::size_t r = 0; r < cfg.image.rows; ++r)
        geometry.z_grid.push_back(cfg.image.z_of_bottom_row
                                  + (static_cast<double>(r) + 0.5) * cfg.image.pixel_pitch_z);
    const decoherence::DecoherenceInput input(material, beam(cfg), geometry);

    PipelineResult res;
    res.curve = decoherence::visibility_curve(cfg.image_model, input, cfg.model_options);
    res.provenance = decoherence::describe(input, cfg.model_options);
    auto& provenance = res.provenance;
    provenance.emplace_back("model", std::string(decoherence::to_string(cfg.image_model)));
    provenance.emplace_back("seed", std::to_string(cfg.seed));
    add(provenance, "fringe.contrast", cfg.fringe.contrast);
    add(provenance, "fringe.spacing_m", cfg.fringe.spacing);
    add(provenance, "fringe.phase", cfg.fringe.phase);
    add(provenance, "fringe.envelope_width_m", cfg.fringe.envelope_width);
    add(provenance, "fringe.envelope_phase", cfg.fringe.envelope_phase);
    add(provenance, "total_counts", cfg.total_counts);

    res.image = fringe::synthesize_image(res.curve, cfg.fringe, cfg.image, cfg.total_counts,
                                         cfg.seed);
    auto a = analyze(cfg, res.image, true, log);
    res.profile = std::move(a.profile);
    res.normalized = a.normalized;
    const auto& profile = res.profile;

    const std::size_t rows_per_slab = static_cast<std::size_t>(
        std::llround(cfg.slice.slab_height / cfg.image.pixel_pitch_z));
    res.model.resize(profile.size());
    double band_sum = 0.0;
    std::size_t band_count = 0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        double s = 0.0;
        for (std::size_t r = k * rows_per_slab; r < (k + 1) * rows_per_slab; ++r)
            s += res.curve.visibility_values[r];
        res.model[k] = s / static_cast<double>(rows_per_slab);
        if (profile.z_lower[k] >= profile.z_top - cfg.reference_band - 1e-9 * cfg.reference_band) {
            band_sum += res.model[k];
            ++band_count;
        }
    }
    if (res.normalized && band_count > 0 && band_sum > 0.0) {
        res.model_normalization = band_sum / static_cast<double>(band_count);
        for (double& m : res.model)
            m /= res.model_normalization;
    }

    std::vector<double> sigmas;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (profile.z_centers[k] > cfg.compare_above && profile.usable(k)) {
            res.max_deviation = std::max(res.max_deviation,
                                         std::abs(profile.contrast[k] - res.model[k]));
            sigmas.push_back(profile.sigma[k]);
        }
    }
    res.compared_slabs = sigmas.size();
    std::sort(sigmas.begin(), sigmas.end());
    res.median_sigma = sigmas.empty() ? NAN : sigmas[sigmas.size() / 2];
    return res;
}

int cmd_pipeline(const RunConfig& cfg, std::ostream& log) {
    const auto res = run_pipeline(cfg, log);
    {
        const auto path = cfg.out / "model_curve.csv";
        auto out = open_output(path);
        decoherence::write_curve_csv(out, res.curve, res.provenance);
        log << "wrote " << path.string() << '\n';
    }
    const auto image_path = cfg.out / "image.pgm";
    {
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
    }
    fringe::save_image(image_path, res.image, res.provenance);
    log << "wrote " << image_path.string() << " and " << fringe::sidecar_path(image_path).string()
        << '\n';

    const auto& profile = res.profile;
    const auto analysis_prov = analysis_provenance(cfg, res.image);
    {
        const auto path = cfg.out / "profile.csv";
        auto out = open_output(path);
        fringe::write_profile_csv(out, profile, analysis_prov);
        log << "wrote " << path.string() << '\n';
    }

    Provenance cmp_prov = res.provenance;
    cmp_prov.insert(cmp_prov.end(),
                    analysis_prov.begin() + static_cast<long>(base_provenance().size()),
                    analysis_prov.end());
    add(cmp_prov, "model_normalization_constant", res.model_normalization);
    add(cmp_prov, "data_normalization_constant", profile.normalization_constant);
    add(cmp_prov, "compare_above_m", cfg.compare_above);
    add(cmp_prov, "max_abs_deviation", res.max_deviation);
    add(cmp_prov, "median_sigma", res.median_sigma);
    const auto path = cfg.out / "comparison.csv";
    auto out = open_output(path);
    write_provenance(out, cmp_prov);
    out << "z_m,contrast,sigma,model_visibility,deviation,status\n";
    for (std::size_t k = 0; k < profile.size(); ++k)
        out << format_number(profile.z_centers[k]) << ',' << format_number(profile.contrast[k])
            << ',' << format_number(profile.sigma[k]) << ',' << format_number(res.model[k]) << ','
            << format_number(profile.contrast[k] - res.model[k]) << ','
            << fringe::to_string(profile.status[k]) << '\n';
    log << "wrote " << path.string() << '\n';
    log << fmt::format("max |C - V| above {:g} um: {:.4f} over {} slabs; median sigma {:.4f}\n",
                       cfg.compare_above * 1e6, res.max_deviation, res.compared_slabs,
                       res.median_sigma);

    int code = report_flags(profile, res.normalized, log);
    if (code == exit_ok && !res.curve.all_converged())
        code = exit_convergence;
    return code;
}

int cmd_analyze(const RunConfig& cfg, const fs::path& image_path, bool normalize,
                std::ostream& log) {
    const auto image = fringe::load_image(image_path);
    const auto a = analyze(cfg, image, normalize, log);
    const auto path = cfg.out / "profile.csv";
    auto out = open_output(path);
    fringe::write_profile_csv(out, a.profile, analysis_provenance(cfg, image));
    log << "wrote " << path.string() << '\n';
    return report_flags(a.profile, a.normalized || !normalize, log);
}

} // namespace aloof::cli
