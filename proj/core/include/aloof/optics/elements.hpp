#pragma once

// Paraxial 2x2 transfer matrices acting on (x, tan alpha).

#include <Eigen/Dense>

#include <string>
#include <variant>

namespace aloof::optics {

using Matrix2 = Eigen::Matrix2d;

struct RayState {
    double x = 0.0;      // transverse offset [m]
    double slope = 0.0;  // tan(alpha)
};

enum class LogBase { natural, decimal };

struct Drift {
    double length;  // [m]
};

/// Charged-wire biprism seen by one partial beam. `side` (+1 or -1) is the
/// direction of the kick for the beam passing on the positive side; the
/// other partial beam receives the opposite kick.
struct Biprism {
    double voltage;             // U_BP [V]
    double electrode_distance;  // r_g [m]
    double wire_radius;         // r_BP [m]
    int side = +1;
    LogBase log_base = LogBase::natural;
};

/// Quadrupole in its focusing plane (cosh/sinh matrix).
struct QuadrupoleFocus {
    double voltage;   // U_q [V]
    double aperture;  // g0 [m]
    double length;    // l [m]
};

/// Quadrupole in its defocusing plane (cos/sin matrix).
struct QuadrupoleDefocus {
    double voltage;
    double aperture;
    double length;
};

using OpticalElement = std::variant<Drift, Biprism, QuadrupoleFocus, QuadrupoleDefocus>;

/// Throws ConfigError when a field violates its range (d >= 0,
/// r_g > r_BP > 0, g0 > 0, l > 0, U_q >= 0, side = +-1).
void validate(const OpticalElement& element);

/// Deflection angle pi U_BP / (2 log(r_g / r_BP) U_beam) [rad].
double biprism_deflection(const Biprism& biprism, double beam_voltage);

/// Quadrupole strength k = sqrt(U_q / (g0^2 U_beam)) [1/m].
double quadrupole_strength(double voltage, double aperture, double beam_voltage);

/// Transfer matrix of one element. The biprism matrix
/// diag(1, tan(alpha0 + side gamma) / tan(alpha0)) depends on the incoming
/// slope and is singular at slope 0, where DomainError is thrown; `trace`
/// applies the biprism as an angle kick instead.
Matrix2 element_matrix(const OpticalElement& element, double beam_voltage,
                       double incoming_slope = 0.0);

/// Apply one element to a ray, with the biprism acting as the kick
/// alpha -> alpha + side gamma.
RayState apply(const OpticalElement& element, double beam_voltage, const RayState& ray);

/// Length the element occupies along the axis (zero for the biprism).
double element_length(const OpticalElement& element);

std::string element_type(const OpticalElement& element);

} // namespace aloof::optics
