#pragma once

// Physical constants, surface materials and the beam/geometry parameter types
// shared by every other part of the library. All quantities are SI unless a
// name says otherwise (energy spreads are carried in eV).

#include <optional>
#include <string>
#include <vector>

namespace aloof::physics {

struct PhysicalConstants {
    double elementary_charge;    // C
    double planck;               // J s
    double reduced_planck;       // J s
    double boltzmann;            // J/K
    double vacuum_permittivity;  // F/m
    double light_speed;          // m/s
    double electron_mass;        // kg
};

// CODATA 2018. e, h, k_B and c are exact by definition of the SI.
inline constexpr PhysicalConstants codata{
    .elementary_charge = 1.602176634e-19,
    .planck = 6.62607015e-34,
    .reduced_planck = 6.62607015e-34 / (2.0 * 3.14159265358979323846),
    .boltzmann = 1.380649e-23,
    .vacuum_permittivity = 8.8541878128e-12,
    .light_speed = 299792458.0,
    .electron_mass = 9.1093837015e-31,
};

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double room_temperature = 293.0;

/// Parameters of the Machnikowski metal-response model.
struct MachnikowskiParams {
    double effective_mass_ratio;    // m_eff / m_e
    double screening_permittivity;  // eps_i
    double fermi_wavevector;        // k_F [1/m]
};

/// Fermi wavevector of a free-electron gas, k_F = (3 pi^2 n)^(1/3).
double fermi_wavevector_from_density(double carrier_density);

/// Everything the decoherence models need to know about the surface.
struct MaterialSpec {
    std::string name;
    double resistivity = 0.0;             // Ohm m
    double temperature = room_temperature;
    double background_permittivity = 1.0;
    std::optional<double> drude_damping;  // 1/s, only for the full Drude form
    std::optional<MachnikowskiParams> machnikowski;
    std::optional<double> howie_cutoff;   // rad/s
};

/// Validated, immutable surface material. Conductivity is derived from the
/// resistivity so that sigma * rho == 1.
class Material {
public:
    explicit Material(MaterialSpec spec);

    const std::string& name() const noexcept { return spec_.name; }
    double resistivity() const noexcept { return spec_.resistivity; }
    double conductivity() const noexcept { return conductivity_; }
    double temperature() const noexcept { return spec_.temperature; }
    double background_permittivity() const noexcept { return spec_.background_permittivity; }
    const std::optional<double>& drude_damping() const noexcept { return spec_.drude_damping; }
    const std::optional<MachnikowskiParams>& machnikowski() const noexcept { return spec_.machnikowski; }
    const std::optional<double>& howie_cutoff() const noexcept { return spec_.howie_cutoff; }
    const MaterialSpec& spec() const noexcept { return spec_; }

    /// Copy with a different temperature.
    Material with_temperature(double kelvin) const;

private:
    MaterialSpec spec_;
    double conductivity_;
};

/// Dielectric relaxation frequency sigma / (eps0 eps_b).
double dielectric_relaxation_frequency(double conductivity, double background_permittivity);

/// n-doped silicon wafer, 1.5 Ohm cm.
Material silicon_n_doped();
/// Gold, 2.2e-6 Ohm cm.
Material gold();
/// Names of the materials shipped with the library.
std::vector<std::string> bundled_material_names();
/// Look up a bundled material; throws ConfigError for unknown names.
Material bundled_material(const std::string& name);

// Nonrelativistic electron kinematics.

/// v = sqrt(2 e U / m_e) [m/s].
double beam_velocity(double acceleration_voltage);
/// lambda = h / sqrt(2 m_e e U) [m].
double de_broglie_wavelength(double acceleration_voltage);
/// Longitudinal coherence length l_c = 2 U lambda / (pi dE), with U in volts
/// and the energy spread dE in eV [m].
double coherence_length(double acceleration_voltage, double energy_spread_ev);

class BeamParams {
public:
    BeamParams(double acceleration_voltage, double energy_spread_ev);

    double acceleration_voltage() const noexcept { return voltage_; }
    double kinetic_energy() const noexcept { return energy_; }
    double velocity() const noexcept { return velocity_; }
    double de_broglie_wavelength() const noexcept { return wavelength_; }
    double energy_spread_ev() const noexcept { return energy_spread_; }
    double coherence_length() const;

private:
    double voltage_;
    double energy_;
    double velocity_;
    double wavelength_;
    double energy_spread_;
};

/// Plate length, path separation, surface offset and the z grid on which
/// curves are evaluated. Models see the effective height z - z0.
struct InteractionGeometry {
    double plate_length = 0.01;
    double path_separation = 0.0;
    double surface_offset = 0.0;
    std::vector<double> z_grid;

    void validate() const;
    double effective_height(double z) const;
};

/// Evenly spaced grid of `count` points from `first` to `last` inclusive.
std::vector<double> linear_grid(double first, double last, std::size_t count);

} // namespace aloof::physics
