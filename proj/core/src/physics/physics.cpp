#include "aloof/physics.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aloof::physics {

namespace {

void require_positive_voltage(double u) {
    if (!(u > 0.0) || !std::isfinite(u))
        throw DomainError(fmt::format("acceleration voltage must be positive, got {}", u));
}

} // namespace

double beam_velocity(double acceleration_voltage) {
    require_positive_voltage(acceleration_voltage);
    const auto& k = codata;
    return std::sqrt(2.0 * k.elementary_charge * acceleration_voltage / k.electron_mass);
}

double de_broglie_wavelength(double acceleration_voltage) {
    require_positive_voltage(acceleration_voltage);
    const auto& k = codata;
    return k.planck
        / std::sqrt(2.0 * k.electron_mass * k.elementary_charge * acceleration_voltage);
}

double coherence_length(double acceleration_voltage, double energy_spread_ev) {
    if (!(energy_spread_ev > 0.0) || !std::isfinite(energy_spread_ev))
        throw DomainError(fmt::format("energy spread must be positive, got {}", energy_spread_ev));
    return 2.0 * acceleration_voltage * de_broglie_wavelength(acceleration_voltage)
        / (pi * energy_spread_ev);
}

BeamParams::BeamParams(double acceleration_voltage, double energy_spread_ev)
    : voltage_(acceleration_voltage),
      energy_(codata.elementary_charge * acceleration_voltage),
      velocity_(beam_velocity(acceleration_voltage)),
      wavelength_(physics::de_broglie_wavelength(acceleration_voltage)),
      energy_spread_(energy_spread_ev) {
    if (!(energy_spread_ev > 0.0))
        throw DomainError(fmt::format("energy spread must be positive, got {}", energy_spread_ev));
    if (!(velocity_ < codata.light_speed))
        throw DomainError("nonrelativistic beam velocity reaches c; voltage too high");
}

double BeamParams::coherence_length() const {
    return physics::coherence_length(voltage_, energy_spread_);
}

void InteractionGeometry::validate() const {
    if (!(plate_length > 0.0))
        throw DomainError(fmt::format("plate length must be positive, got {}", plate_length));
    if (!(path_separation >= 0.0) || !std::isfinite(path_separation))
        throw DomainError(fmt::format("path separation must be >= 0, got {}", path_separation));
    if (!std::isfinite(surface_offset))
        throw DomainError("surface offset must be finite");
    for (std::size_t i = 1; i < z_grid.size(); ++i)
        if (!(z_grid[i] > z_grid[i - 1]))
            throw DomainError("z grid must be strictly increasing");
}

double InteractionGeometry::effective_height(double z) const {
    const double h = z - surface_offset;
    if (!(h > 0.0) || !std::isfinite(h))
        throw DomainError(fmt::format(
            "effective height z - z0 = {} m is not above the surface (z = {}, z0 = {})", h, z,
            surface_offset));
    return h;
}

std::vector<double> linear_grid(double first, double last, std::size_t count) {
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = first;
        return grid;
    }
    const double step = (last - first) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = first + step * static_cast<double>(i);
    if (count > 1)
        grid.back() = last;
    return grid;
}

} // namespace aloof::physics
