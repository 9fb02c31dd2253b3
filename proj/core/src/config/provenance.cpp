#include "aloof/provenance.hpp"

#include "aloof/physics.hpp"

#include <fmt/format.h>

#include <ostream>

namespace aloof {

std::string format_number(double value) { return fmt::format("{}", value); }

void write_provenance(std::ostream& out, const Provenance& provenance) {
    for (const auto& [key, value] : provenance)
        out << "# " << key << '=' << value << '\n';
}

Provenance base_provenance() {
    const auto& k = physics::codata;
    return {
        {"version", ALOOF_VERSION},
        {"const.elementary_charge", format_number(k.elementary_charge)},
        {"const.planck", format_number(k.planck)},
        {"const.reduced_planck", format_number(k.reduced_planck)},
        {"const.boltzmann", format_number(k.boltzmann)},
        {"const.vacuum_permittivity", format_number(k.vacuum_permittivity)},
        {"const.light_speed", format_number(k.light_speed)},
        {"const.electron_mass", format_number(k.electron_mass)},
    };
}

} // namespace aloof
