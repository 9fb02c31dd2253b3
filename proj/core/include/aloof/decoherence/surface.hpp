#pragma once

// Dielectric response of the decohering surface: Drude permittivity,
// reflection coefficients and the Bose-Einstein thermal factor.

#include "aloof/physics.hpp"

#include <complex>

namespace aloof::decoherence {

enum class PermittivityModel {
    /// eps = eps_b + i sigma / (eps0 omega), collision-dominated limit.
    ohmic,
    /// eps = eps_b - omega_p^2 / (omega^2 + i gamma omega) with
    /// omega_p^2 = sigma gamma / eps0; needs the material's Drude damping.
    drude,
};

/// Which retardation corrections the Markov integrand carries.
enum class Retardation {
    /// gamma(phi) = 1, electrostatic r_p, r_s = 0.
    none,
    /// gamma(phi) = sqrt(1 - (v/c)^2 cos^2 phi), electrostatic r_p, r_s = 0.
    envelope,
    /// As `envelope`, with full Fresnel r_p and r_s.
    full,
};

std::complex<double> drude_permittivity(const physics::Material& material, double omega,
                                        PermittivityModel model = PermittivityModel::ohmic);

/// Electrostatic (nonretarded) p-reflection (eps - 1)/(eps + 1).
std::complex<double> reflection_p(const physics::Material& material, double k_parallel,
                                  double omega,
                                  PermittivityModel model = PermittivityModel::ohmic);

/// Fresnel coefficients for an evanescent surface mode (k_parallel > omega/c).
std::complex<double> fresnel_reflection_p(const physics::Material& material, double k_parallel,
                                          double omega,
                                          PermittivityModel model = PermittivityModel::ohmic);
std::complex<double> fresnel_reflection_s(const physics::Material& material, double k_parallel,
                                          double omega,
                                          PermittivityModel model = PermittivityModel::ohmic);

/// Bose-Einstein occupation 1/(exp(hbar omega / k_B T) - 1).
double thermal_occupation(double omega, double temperature);

/// Symmetrized thermal factor 2 n(omega) + 1 = coth(hbar omega / 2 k_B T).
double thermal_factor(double omega, double temperature);

/// d Im r_p / d omega at omega -> 0 for the ohmic response, 2 eps0 rho.
double static_reflection_derivative(const physics::Material& material);

} // namespace aloof::decoherence
