#include "aloof/decoherence/surface.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aloof::decoherence {

using physics::codata;
using cplx = std::complex<double>;

namespace {

void require_positive_frequency(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError(fmt::format("frequency must be positive, got {}", omega));
}

// Principal branch with Im >= 0 (decaying away from the interface).
cplx sqrt_upper(cplx z) {
    cplx r = std::sqrt(z);
    if (r.imag() < 0.0)
        r = -r;
    return r;
}

} // namespace

cplx drude_permittivity(const physics::Material& material, double omega, PermittivityModel model) {
    require_positive_frequency(omega);
    const double eps0 = codata.vacuum_permittivity;
    const double sigma = material.conductivity();
    const double eps_b = material.background_permittivity();
    if (model == PermittivityModel::ohmic)
        return {eps_b, sigma / (eps0 * omega)};
    if (!material.drude_damping())
        throw ConfigError(fmt::format(
            "material '{}': full Drude permittivity needs drude_damping", material.name()));
    const double gamma = *material.drude_damping();
    const double wp2 = sigma * gamma / eps0;
    return cplx(eps_b, 0.0) - wp2 / cplx(omega * omega, gamma * omega);
}

cplx reflection_p(const physics::Material& material, double k_parallel, double omega,
                  PermittivityModel model) {
    if (!(k_parallel > 0.0))
        throw DomainError("k_parallel must be positive");
    const cplx eps = drude_permittivity(material, omega, model);
    // (eps - 1)/(eps + 1) written to keep Im r_p accurate when |eps| is huge.
    return 1.0 - 2.0 / (eps + 1.0);
}

cplx fresnel_reflection_p(const physics::Material& material, double k_parallel, double omega,
                          PermittivityModel model) {
    if (!(k_parallel > 0.0))
        throw DomainError("k_parallel must be positive");
    const cplx eps = drude_permittivity(material, omega, model);
    const double q2 = (omega / codata.light_speed) * (omega / codata.light_speed);
    const double k2 = k_parallel * k_parallel;
    const cplx kz0 = sqrt_upper(cplx(q2 - k2, 0.0));
    const cplx kz1 = sqrt_upper(eps * q2 - k2);
    return 1.0 - 2.0 * kz1 / (eps * kz0 + kz1);
}

cplx fresnel_reflection_s(const physics::Material& material, double k_parallel, double omega,
                          PermittivityModel model) {
    if (!(k_parallel > 0.0))
        throw DomainError("k_parallel must be positive");
    const cplx eps = drude_permittivity(material, omega, model);
    const double q2 = (omega / codata.light_speed) * (omega / codata.light_speed);
    const double k2 = k_parallel * k_parallel;
    const cplx kz0 = sqrt_upper(cplx(q2 - k2, 0.0));
    const cplx kz1 = sqrt_upper(eps * q2 - k2);
    // (kz0 - kz1)/(kz0 + kz1) with the difference formed analytically.
    const cplx sum = kz0 + kz1;
    return q2 * (1.0 - eps) / (sum * sum);
}

double thermal_occupation(double omega, double temperature) {
    require_positive_frequency(omega);
    if (!(temperature > 0.0))
        throw DomainError("temperature must be positive");
    const double x = codata.reduced_planck * omega / (codata.boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double thermal_factor(double omega, double temperature) {
    require_positive_frequency(omega);
    if (!(temperature > 0.0))
        throw DomainError("temperature must be positive");
    const double x = codata.reduced_planck * omega / (codata.boltzmann * temperature);
    return 1.0 / std::tanh(0.5 * x);
}

double static_reflection_derivative(const physics::Material& material) {
    return 2.0 * codata.vacuum_permittivity * material.resistivity();
}

} // namespace aloof::decoherence
