#include "aloof/optics/beamline.hpp"

#include "aloof/config/ini.hpp"
#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>

namespace aloof::optics {

Beamline::Beamline(double beam_voltage, std::vector<NamedElement> elements,
                   std::vector<Marker> markers)
    : voltage_(beam_voltage), elements_(std::move(elements)), markers_(std::move(markers)) {
    if (!(voltage_ > 0.0) || !std::isfinite(voltage_))
        throw ConfigError(fmt::format("beam voltage must be positive, got {}", voltage_));
    if (elements_.empty())
        throw ConfigError("beamline has no elements");
    for (const auto& e : elements_)
        validate(e.element);
    std::set<std::string> names;
    for (const auto& m : markers_) {
        if (!names.insert(m.name).second)
            throw ConfigError(fmt::format("duplicate marker '{}'", m.name));
        if (m.after_elements > elements_.size())
            throw ConfigError(fmt::format("marker '{}' lies beyond the last element", m.name));
    }
}

const Marker& Beamline::marker(const std::string& name) const {
    for (const auto& m : markers_)
        if (m.name == name)
            return m;
    throw ConfigError(fmt::format("unknown marker '{}'", name));
}

Beamline Beamline::with_biprism_scaled(double factor) const {
    auto elements = elements_;
    for (auto& e : elements)
        if (auto* b = std::get_if<Biprism>(&e.element))
            b->voltage *= factor;
    return Beamline(voltage_, std::move(elements), markers_);
}

TraceResult trace(const Beamline& beamline, const RayState& ray, int beam_side) {
    if (beam_side != 1 && beam_side != -1)
        throw DomainError("beam side must be +1 or -1");
    if (!std::isfinite(ray.x) || !std::isfinite(ray.slope))
        throw DomainError("ray components must be finite");
    TraceResult result;
    double position = 0.0;
    RayState state = ray;
    result.points.push_back({"start", position, state});
    for (const auto& [name, element] : beamline.elements()) {
        OpticalElement effective = element;
        if (auto* b = std::get_if<Biprism>(&effective))
            b->side *= beam_side;
        if (const auto* q = std::get_if<QuadrupoleDefocus>(&element)) {
            const double kl = quadrupole_strength(q->voltage, q->aperture,
                                                  beamline.beam_voltage()) * q->length;
            if (kl > 3.14159265358979323846)
                result.warnings.push_back(fmt::format(
                    "{}: k l = {:.4g} exceeds pi; the ray crosses the axis inside the element",
                    name, kl));
        }
        state = apply(effective, beamline.beam_voltage(), state);
        position += element_length(element);
        result.points.push_back({name, position, state});
    }
    return result;
}

double path_separation(const Beamline& beamline, const std::string& marker, const RayState& ray) {
    const auto& m = beamline.marker(marker);
    const auto plus = trace(beamline, ray, +1);
    const auto minus = trace(beamline, ray, -1);
    return std::abs(plus.points[m.after_elements].ray.x - minus.points[m.after_elements].ray.x);
}

Matrix2 system_matrix(const Beamline& beamline) {
    Matrix2 total = Matrix2::Identity();
    for (const auto& e : beamline.elements()) {
        if (std::holds_alternative<Biprism>(e.element))
            throw DomainError("system matrix is undefined for a beamline with a biprism");
        total = element_matrix(e.element, beamline.beam_voltage()) * total;
    }
    return total;
}

Beamline parse_beamline(std::istream& in, const std::string& source_name) {
    using config::Dimension;
    const auto doc = config::IniDocument::parse(in, source_name);
    const auto head = doc.section("beamline");
    head.reject_unknown({"voltage", "log_base"});
    const double voltage = head.require_quantity("voltage", Dimension::voltage);
    LogBase log_base = LogBase::natural;
    if (const auto base = head.get("log_base")) {
        if (*base == "decimal")
            log_base = LogBase::decimal;
        else if (*base != "natural")
            head.fail("log_base", fmt::format("expected natural or decimal, got '{}'", *base));
    }

    std::vector<NamedElement> elements;
    std::vector<Marker> markers;
    for (const auto& name : doc.section_names()) {
        if (name == "beamline")
            continue;
        const auto s = doc.section(name);
        const auto type = s.require("type");
        OpticalElement element;
        if (type == "marker") {
            s.reject_unknown({"type"});
            markers.push_back({name, elements.size()});
            continue;
        } else if (type == "drift") {
            s.reject_unknown({"type", "length"});
            element = Drift{s.require_quantity("length", Dimension::length)};
        } else if (type == "biprism") {
            s.reject_unknown({"type", "voltage", "electrode_distance", "wire_radius", "side"});
            Biprism b{s.require_quantity("voltage", Dimension::voltage),
                      s.require_quantity("electrode_distance", Dimension::length),
                      s.require_quantity("wire_radius", Dimension::length),
                      static_cast<int>(s.integer("side").value_or(1)), log_base};
            element = b;
        } else if (type == "quadrupole_focus" || type == "quadrupole_defocus") {
            s.reject_unknown({"type", "voltage", "aperture", "length"});
            const double u = s.require_quantity("voltage", Dimension::voltage);
            const double g0 = s.require_quantity("aperture", Dimension::length);
            const double l = s.require_quantity("length", Dimension::length);
            if (type == "quadrupole_focus")
                element = QuadrupoleFocus{u, g0, l};
            else
                element = QuadrupoleDefocus{u, g0, l};
        } else {
            s.fail("type", fmt::format("unknown element type '{}'", type));
        }
        try {
            validate(element);
        } catch (const ConfigError& e) {
            s.fail({}, e.what());
        }
        elements.push_back({name, element});
    }
    try {
        return Beamline(voltage, std::move(elements), std::move(markers));
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", source_name, e.what()));
    }
}

Beamline load_beamline(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    return parse_beamline(in, path.string());
}

} // namespace aloof::optics
