#pragma once

#include <string_view>

namespace aloof::config {

/// Quantity kinds accepted in configuration files. A bare number is read in
/// the base unit listed here; otherwise exactly one suffix from the list
/// must follow, optionally separated by spaces.
enum class Dimension {
    dimensionless,      // (none)
    length,             // m | cm | mm | um | nm
    voltage,            // V | kV | mV
    energy_ev,          // eV | meV
    resistivity,        // ohm_m | ohm_cm
    temperature,        // K
    angular_frequency,  // rad/s
    inverse_length,     // 1/m
    number_density,     // 1/m3 | 1/cm3
};

/// Parse "<number>[ ]<suffix>" into the base unit. Throws ConfigError on a
/// malformed number, an unknown suffix or a suffix from another dimension.
double parse_quantity(std::string_view text, Dimension dimension);

} // namespace aloof::config
