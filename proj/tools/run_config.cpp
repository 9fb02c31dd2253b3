#include "run_config.hpp"

#include <aloof/config/ini.hpp>
#include <aloof/config/units.hpp>
#include <aloof/errors.hpp>

#include <fmt/format.h>

#include <sstream>

namespace aloof::cli {

using config::Dimension;
using config::IniSection;

namespace {

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw ConfigError(fmt::format("empty entry in list '{}'", text));
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty())
        throw ConfigError("empty list");
    return out;
}

template <class T>
void set(T& target, const std::optional<T>& value) {
    if (value)
        target = *value;
}

std::size_t count(const IniSection& s, const std::string& key, std::size_t current) {
    const auto v = s.integer(key);
    if (!v)
        return current;
    if (*v < 1)
        s.fail(key, "must be at least 1");
    return static_cast<std::size_t>(*v);
}

template <class Fn>
auto in_section(const IniSection& s, const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        s.fail(key, e.what());
    }
}

} // namespace

double RunConfig::resolved_surface_offset(const std::string& material_name) const {
    if (surface_offset)
        return *surface_offset;
    return material_name == "silicon-n-doped" ? -3e-6 : 0.0;
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
    if (p.is_absolute() || source.empty())
        return p;
    return source.parent_path() / p;
}

std::vector<double> parse_length_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text)) {
        const double v = config::parse_quantity(item, Dimension::length);
        if (v < 0.0)
            throw ConfigError(fmt::format("length '{}' must be >= 0", item));
        out.push_back(v);
    }
    return out;
}

std::vector<decoherence::Model> parse_model_list(const std::string& text) {
    std::vector<decoherence::Model> out;
    for (const auto& item : split(text)) {
        if (item == "all") {
            out.insert(out.end(), std::begin(decoherence::all_models),
                       std::end(decoherence::all_models));
            continue;
        }
        out.push_back(decoherence::parse_model(item));
    }
    return out;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const auto doc = config::IniDocument::load(path);
    RunConfig cfg;
    cfg.source = path;
    for (const auto& name : doc.section_names()) {
        static const std::vector<std::string> known{"run", "beam", "geometry", "quadrature",
                                                    "image", "analysis", "wien", "optics"};
        if (std::find(known.begin(), known.end(), name) == known.end())
            doc.section(name).fail({}, "unknown section");
    }

    if (const auto s = doc.find_section("run")) {
        s->reject_unknown({"material", "material_section", "models", "separations", "seed", "out"});
        set(cfg.material, s->get("material"));
        set(cfg.material_section, s->get("material_section"));
        if (const auto m = s->get("models"))
            cfg.models = in_section(*s, "models", [&] { return parse_model_list(*m); });
        if (const auto d = s->get("separations"))
            cfg.separations = in_section(*s, "separations", [&] { return parse_length_list(*d); });
        if (const auto seed = s->integer("seed")) {
            if (*seed < 0)
                s->fail("seed", "must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(*seed);
        }
        if (const auto out = s->get("out"))
            cfg.out = cfg.resolve(*out);
    }
    if (const auto s = doc.find_section("beam")) {
        s->reject_unknown({"voltage", "energy_spread", "energy_spread_sigma"});
        set(cfg.beam_voltage, s->quantity("voltage", Dimension::voltage));
        set(cfg.energy_spread, s->quantity("energy_spread", Dimension::energy_ev));
        set(cfg.energy_spread_sigma, s->quantity("energy_spread_sigma", Dimension::energy_ev));
    }
    if (const auto s = doc.find_section("geometry")) {
        s->reject_unknown({"plate_length", "surface_offset", "z_min", "z_max", "z_points"});
        set(cfg.plate_length, s->quantity("plate_length", Dimension::length));
        cfg.surface_offset = s->quantity("surface_offset", Dimension::length);
        set(cfg.z_min, s->quantity("z_min", Dimension::length));
        set(cfg.z_max, s->quantity("z_max", Dimension::length));
        cfg.z_points = count(*s, "z_points", cfg.z_points);
        if (!(cfg.z_max > cfg.z_min) && cfg.z_points > 1)
            s->fail("z_max", "must exceed z_min");
    }
    if (const auto s = doc.find_section("quadrature")) {
        s->reject_unknown({"rel_tol", "abs_tol", "max_subdivisions", "phi_panels", "retardation",
                           "permittivity", "rp_static_derivative", "envelope_cutoff",
                           "thermal_bracket"});
        auto& o = cfg.model_options;
        set(o.quadrature.relative_tolerance, s->quantity("rel_tol", Dimension::dimensionless));
        set(o.quadrature.absolute_tolerance, s->quantity("abs_tol", Dimension::dimensionless));
        o.quadrature.max_subdivisions = count(*s, "max_subdivisions", o.quadrature.max_subdivisions);
        o.phi_panels = count(*s, "phi_panels", o.phi_panels);
        set(o.envelope_cutoff, s->quantity("envelope_cutoff", Dimension::dimensionless));
        o.rp_static_derivative = s->quantity("rp_static_derivative", Dimension::dimensionless);
        if (const auto r = s->get("retardation")) {
            if (*r == "none")
                o.retardation = decoherence::Retardation::none;
            else if (*r == "envelope")
                o.retardation = decoherence::Retardation::envelope;
            else if (*r == "full")
                o.retardation = decoherence::Retardation::full;
            else
                s->fail("retardation", "expected none, envelope or full");
        }
        if (const auto b = s->get("thermal_bracket")) {
            if (*b == "separation")
                o.thermal_bracket = decoherence::ThermalBracket::separation;
            else if (*b == "plate_length")
                o.thermal_bracket = decoherence::ThermalBracket::plate_length;
            else
                s->fail("thermal_bracket", "expected separation or plate_length");
        }
        if (const auto p = s->get("permittivity")) {
            if (*p == "ohmic")
                o.permittivity = decoherence::PermittivityModel::ohmic;
            else if (*p == "drude")
                o.permittivity = decoherence::PermittivityModel::drude;
            else
                s->fail("permittivity", "expected ohmic or drude");
        }
        in_section(*s, "rel_tol", [&] {
            o.quadrature.validate();
            return 0;
        });
    }
    if (const auto s = doc.find_section("image")) {
        s->reject_unknown({"model", "separation", "columns", "rows", "pitch_x", "pitch_z",
                           "z_bottom", "total_counts", "contrast", "spacing", "phase",
                           "envelope_width", "envelope_phase"});
        if (const auto m = s->get("model"))
            cfg.image_model = in_section(*s, "model", [&] { return decoherence::parse_model(*m); });
        set(cfg.image_separation, s->quantity("separation", Dimension::length));
        cfg.image.columns = count(*s, "columns", cfg.image.columns);
        cfg.image.rows = count(*s, "rows", cfg.image.rows);
        set(cfg.image.pixel_pitch_x, s->quantity("pitch_x", Dimension::length));
        set(cfg.image.pixel_pitch_z, s->quantity("pitch_z", Dimension::length));
        set(cfg.image.z_of_bottom_row, s->quantity("z_bottom", Dimension::length));
        set(cfg.total_counts, s->quantity("total_counts", Dimension::dimensionless));
        auto& f = cfg.fringe;
        set(f.contrast, s->quantity("contrast", Dimension::dimensionless));
        set(f.spacing, s->quantity("spacing", Dimension::length));
        set(f.phase, s->quantity("phase", Dimension::dimensionless));
        set(f.envelope_width, s->quantity("envelope_width", Dimension::length));
        set(f.envelope_phase, s->quantity("envelope_phase", Dimension::dimensionless));
        in_section(*s, "contrast", [&] {
            try {
                f.validate();
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
            return 0;
        });
    }
    if (const auto s = doc.find_section("analysis")) {
        s->reject_unknown({"slab_height", "reference_band", "compare_above", "mode", "weighting",
                           "shear", "min_spectral_significance"});
        set(cfg.compare_above, s->quantity("compare_above", Dimension::length));
        set(cfg.slice.slab_height, s->quantity("slab_height", Dimension::length));
        set(cfg.reference_band, s->quantity("reference_band", Dimension::length));
        set(cfg.slice.fit.min_spectral_significance,
            s->quantity("min_spectral_significance", Dimension::dimensionless));
        if (const auto m = s->get("mode")) {
            if (*m == "shared_geometry")
                cfg.slice.mode = fringe::SlabMode::shared_geometry;
            else if (*m == "independent")
                cfg.slice.mode = fringe::SlabMode::independent;
            else
                s->fail("mode", "expected shared_geometry or independent");
        }
        if (const auto w = s->get("weighting")) {
            if (*w == "model")
                cfg.slice.fit.weighting = fringe::FitWeighting::model;
            else if (*w == "counts")
                cfg.slice.fit.weighting = fringe::FitWeighting::counts;
            else
                s->fail("weighting", "expected model or counts");
        }
        if (const auto shear = s->get("shear")) {
            cfg.slice.shear.clear();
            for (const auto& item : in_section(*s, "shear", [&] { return split(*shear); }))
                cfg.slice.shear.push_back(
                    in_section(*s, "shear", [&] {
                        return config::parse_quantity(item, Dimension::dimensionless);
                    }));
        }
    }
    if (const auto s = doc.find_section("wien")) {
        s->reject_unknown({"plate_length", "plate_gap", "separation", "noise", "voltage_min",
                           "voltage_max", "points"});
        set(cfg.wien.plate_length, s->quantity("plate_length", Dimension::length));
        set(cfg.wien.plate_gap, s->quantity("plate_gap", Dimension::length));
        set(cfg.wien_separation, s->quantity("separation", Dimension::length));
        set(cfg.wien_noise, s->quantity("noise", Dimension::dimensionless));
        set(cfg.wien_voltage_min, s->quantity("voltage_min", Dimension::voltage));
        set(cfg.wien_voltage_max, s->quantity("voltage_max", Dimension::voltage));
        cfg.wien_points = count(*s, "points", cfg.wien_points);
        if (!(cfg.wien_voltage_max > cfg.wien_voltage_min))
            s->fail("voltage_max", "must exceed voltage_min");
        in_section(*s, "plate_length", [&] {
            cfg.wien.validate();
            return 0;
        });
    }
    if (const auto s = doc.find_section("optics")) {
        s->reject_unknown({"beamline", "markers"});
        if (const auto b = s->get("beamline"))
            cfg.beamline = cfg.resolve(*b);
        if (const auto m = s->get("markers"))
            cfg.markers = in_section(*s, "markers", [&] { return split(*m); });
    }
    return cfg;
}

} // namespace aloof::cli
