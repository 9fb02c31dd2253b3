#pragma once

#include "aloof/optics/elements.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace aloof::optics {

struct NamedElement {
    std::string name;
    OpticalElement element;
};

/// Named longitudinal probe position located after `after_elements`
/// elements.
struct Marker {
    std::string name;
    std::size_t after_elements;
};

class Beamline {
public:
    Beamline(double beam_voltage, std::vector<NamedElement> elements,
             std::vector<Marker> markers = {});

    double beam_voltage() const noexcept { return voltage_; }
    const std::vector<NamedElement>& elements() const noexcept { return elements_; }
    const std::vector<Marker>& markers() const noexcept { return markers_; }
    const Marker& marker(const std::string& name) const;

    /// Copy with every biprism's voltage multiplied by `factor`.
    Beamline with_biprism_scaled(double factor) const;

private:
    double voltage_;
    std::vector<NamedElement> elements_;
    std::vector<Marker> markers_;
};

struct TracePoint {
    std::string label;   // element name, or "start"
    double position;     // axial coordinate after the element [m]
    RayState ray;
};

struct TraceResult {
    /// Ray at the entrance and after every element (size n + 1).
    std::vector<TracePoint> points;
    std::vector<std::string> warnings;
};

/// Partial beam: +1 passes the biprism on the positive side, -1 on the
/// negative side (kick reversed).
TraceResult trace(const Beamline& beamline, const RayState& ray, int beam_side = +1);

/// |x+ - x-| at a marker for the two partial beams launched from `ray`.
double path_separation(const Beamline& beamline, const std::string& marker,
                       const RayState& ray = {});

/// Product of all element matrices for a beamline without biprisms.
Matrix2 system_matrix(const Beamline& beamline);

/// Parse the INI beamline format (see data/reference_beamline.ini). Errors
/// are ConfigError with the offending line where known.
Beamline parse_beamline(std::istream& in, const std::string& source_name = "<input>");
Beamline load_beamline(const std::filesystem::path& path);

} // namespace aloof::optics
