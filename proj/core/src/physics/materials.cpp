#include "aloof/physics.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aloof::physics {

namespace {

void require(bool ok, const std::string& material, const char* what) {
    if (!ok)
        throw ConfigError(fmt::format("material '{}': {}", material, what));
}

} // namespace

double fermi_wavevector_from_density(double carrier_density) {
    if (!(carrier_density > 0.0))
        throw DomainError("carrier density must be positive");
    return std::cbrt(3.0 * pi * pi * carrier_density);
}

double dielectric_relaxation_frequency(double conductivity, double background_permittivity) {
    return conductivity / (codata.vacuum_permittivity * background_permittivity);
}

Material::Material(MaterialSpec spec) : spec_(std::move(spec)) {
    const auto& n = spec_.name;
    require(!n.empty(), n, "name must not be empty");
    require(spec_.resistivity > 0.0 && std::isfinite(spec_.resistivity), n,
            "resistivity must be positive");
    require(spec_.temperature > 0.0 && std::isfinite(spec_.temperature), n,
            "temperature must be positive");
    require(spec_.background_permittivity >= 1.0, n, "background permittivity must be >= 1");
    if (spec_.drude_damping)
        require(*spec_.drude_damping > 0.0, n, "Drude damping must be positive");
    if (spec_.machnikowski) {
        const auto& m = *spec_.machnikowski;
        require(m.effective_mass_ratio > 0.0, n, "effective mass ratio must be positive");
        require(m.screening_permittivity > 0.0, n, "screening permittivity must be positive");
        require(m.fermi_wavevector > 0.0, n, "Fermi wavevector must be positive");
    }
    if (spec_.howie_cutoff)
        require(*spec_.howie_cutoff > 0.0, n, "Howie cut-off frequency must be positive");
    conductivity_ = 1.0 / spec_.resistivity;
}

Material Material::with_temperature(double kelvin) const {
    MaterialSpec s = spec_;
    s.temperature = kelvin;
    return Material(std::move(s));
}

// Resistivities are the published values. Every other microscopic parameter
// below is an assumption; see data/materials.ini for the same table.

Material silicon_n_doped() {
    MaterialSpec s;
    s.name = "silicon-n-doped";
    s.resistivity = 1.5e-2;  // 1.5 Ohm cm
    s.background_permittivity = 11.7;
    // 1/tau for electron mobility ~0.13 m^2/Vs at m_eff = 0.26
    s.drude_damping = 5.0e12;
    // n = 1/(rho e mu) with mu = 0.13 m^2/Vs
    s.machnikowski = MachnikowskiParams{0.26, 11.7, fermi_wavevector_from_density(3.2e21)};
    s.howie_cutoff = dielectric_relaxation_frequency(1.0 / s.resistivity, 11.7);
    return Material(std::move(s));
}

Material gold() {
    MaterialSpec s;
    s.name = "gold";
    s.resistivity = 2.2e-8;  // 2.2e-6 Ohm cm
    s.background_permittivity = 1.0;
    s.drude_damping = 3.7e13;
    s.machnikowski = MachnikowskiParams{1.0, 1.0, 1.21e10};
    // sigma/(eps0 eps_b) would be ~5e18 rad/s, far above the plasma
    // frequency; a sub-plasmon cut-off is used instead.
    s.howie_cutoff = 5.0e14;
    return Material(std::move(s));
}

std::vector<std::string> bundled_material_names() { return {"silicon-n-doped", "gold"}; }

Material bundled_material(const std::string& name) {
    if (name == "silicon-n-doped" || name == "silicon")
        return silicon_n_doped();
    if (name == "gold")
        return gold();
    throw ConfigError(fmt::format("unknown material '{}'", name));
}

} // namespace aloof::physics
