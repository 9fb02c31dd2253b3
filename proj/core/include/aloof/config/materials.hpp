#pragma once

// Material sections:
//
//   [gold]
//   resistivity = 2.2e-6 ohm_cm        ; required
//   temperature = 293 K                ; default 293 K
//   background_permittivity = 1        ; default 1
//   drude_damping = 3.7e13             ; [1/s], optional
//   effective_mass_ratio = 1           ; the three Machnikowski keys are
//   screening_permittivity = 1         ; optional as a group; k_F may be
//   fermi_wavevector = 1.21e10 1/m     ; given as carrier_density instead
//   howie_cutoff = 5e14 rad/s          ; default sigma / (eps0 eps_b)

#include "aloof/config/ini.hpp"
#include "aloof/physics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace aloof::config {

physics::Material material_from_section(const IniSection& section);

std::vector<physics::Material> load_materials(const IniDocument& document);

/// A bundled material name, or a path to a materials file (its first
/// section is used unless `section` names another).
physics::Material resolve_material(const std::string& name_or_path,
                                   const std::string& section = {});

} // namespace aloof::config
