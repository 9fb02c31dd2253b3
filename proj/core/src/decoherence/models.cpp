#include "aloof/decoherence/models.hpp"

#include "aloof/errors.hpp"
#include "aloof/math/special.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aloof::decoherence {

using physics::codata;
using physics::pi;

std::string_view to_string(Model model) {
    switch (model) {
    case Model::markov: return "markov";
    case Model::finite_temperature: return "finite_temperature";
    case Model::anglin: return "anglin";
    case Model::machnikowski: return "machnikowski";
    case Model::howie: return "howie";
    }
    return "unknown";
}

Model parse_model(std::string_view tag) {
    if (tag == "markov") return Model::markov;
    if (tag == "finite_temperature" || tag == "ft") return Model::finite_temperature;
    if (tag == "anglin" || tag == "anglin_zurek") return Model::anglin;
    if (tag == "machnikowski") return Model::machnikowski;
    if (tag == "howie") return Model::howie;
    throw ConfigError(fmt::format("unknown model tag '{}'", tag));
}

DecoherenceInput::DecoherenceInput(physics::Material material, physics::BeamParams beam,
                                   physics::InteractionGeometry geometry)
    : material_(std::move(material)), beam_(beam), geometry_(std::move(geometry)) {
    geometry_.validate();
    time_ = geometry_.plate_length / beam_.velocity();
}

DecoherenceInput DecoherenceInput::with_separation(double dx) const {
    auto g = geometry_;
    g.path_separation = dx;
    return DecoherenceInput(material_, beam_, std::move(g));
}

DecoherenceInput DecoherenceInput::with_material(physics::Material material) const {
    return DecoherenceInput(std::move(material), beam_, geometry_);
}

namespace {

// coth(hbar w / 2kT) * Im{r_p (1 - beta^2 cos^2) + beta^2 r_s sin^2}, the
// dissipative weight of one surface mode. Finite as w -> 0, where the thermal
// factor diverges like 2kT/(hbar w) and Im r_p vanishes like 2 eps0 rho w.
double dissipative_weight(const physics::Material& material, double omega, double k_parallel,
                          double cos_phi, double sin_phi, double beta,
                          const ModelOptions& options) {
    const double kT = codata.boltzmann * material.temperature();
    const double transverse = 1.0 - beta * beta * cos_phi * cos_phi;
    if (!(omega > 0.0)) {
        const double slope = static_reflection_derivative(material);
        return 2.0 * kT / codata.reduced_planck * slope * transverse;
    }
    double response;
    if (options.retardation == Retardation::full) {
        const auto rp = fresnel_reflection_p(material, k_parallel, omega, options.permittivity);
        const auto rs = fresnel_reflection_s(material, k_parallel, omega, options.permittivity);
        response = rp.imag() * transverse + beta * beta * rs.imag() * sin_phi * sin_phi;
    } else {
        const auto eps = drude_permittivity(material, omega, options.permittivity);
        // Im (eps - 1)/(eps + 1) = 2 Im eps / |eps + 1|^2
        response = 2.0 * eps.imag() / std::norm(eps + 1.0) * transverse;
    }
    const double x = codata.reduced_planck * omega / kT;
    return response / std::tanh(0.5 * x);
}

void require_material(bool present, const physics::Material& m, const char* what) {
    if (!present)
        throw ConfigError(fmt::format("material '{}' lacks {}", m.name(), what));
}

} // namespace

GammaEstimate gamma_markov(const DecoherenceInput& input, double z, const ModelOptions& options) {
    const auto& geo = input.geometry();
    const double h = geo.effective_height(z);
    const double dx = geo.path_separation;
    if (dx == 0.0)
        return {};

    const auto& material = input.material();
    const double v = input.beam().velocity();
    const double beta = v / codata.light_speed;
    const bool retarded = options.retardation != Retardation::none;
    const double gamma_min = retarded ? std::sqrt(1.0 - beta * beta) : 1.0;
    const double kappa_max = -std::log(options.envelope_cutoff) / (2.0 * gamma_min);
    const double ratio = dx / h;
    const double q = codata.elementary_charge;

    // Substituting kappa = k h and folding phi onto [0, pi/2] (the integrand
    // is even under phi -> -phi and phi -> pi - phi) gives
    //   Gamma = 4 t q^2/(eps0 hbar) / ((2 pi)^2 h) * I,
    //   I = int dkappa int dphi 2 sin^2(kappa ratio sin(phi)/2)
    //       * W(omega) exp(-2 kappa g) / (2 g),   omega = kappa v cos(phi) / h.
    const double prefactor = 4.0 * input.interaction_time() * q * q
        / (codata.vacuum_permittivity * codata.reduced_planck) / (4.0 * pi * pi * h);

    auto integrand = [&](double kappa, double phi) {
        const double s = std::sin(phi);
        const double c = std::cos(phi);
        const double half_phase = std::sin(0.5 * kappa * ratio * s);
        const double separation = 2.0 * half_phase * half_phase;
        if (separation == 0.0)
            return 0.0;
        const double g = retarded ? std::sqrt(1.0 - beta * beta * c * c) : 1.0;
        const double omega = kappa * v * c / h;
        const double weight = dissipative_weight(material, omega, kappa / h, c, s, beta, options);
        return separation * weight * std::exp(-2.0 * kappa * g) / (2.0 * g);
    };

    math::QuadratureConfig cfg = options.quadrature;
    cfg.absolute_tolerance = options.quadrature.absolute_tolerance / prefactor;
    const math::Rectangle domain{{0.0, kappa_max}, {0.0, 0.5 * pi}};
    try {
        const auto r = math::integrate_adaptive_2d(integrand, domain, cfg, options.phi_panels);
        return {prefactor * r.value, prefactor * r.error_estimate, true};
    } catch (const ConvergenceError& e) {
        return {prefactor * e.best_estimate(), prefactor * e.error_estimate(), false};
    }
}

double gamma_finite_temperature(const DecoherenceInput& input, double z,
                                const ModelOptions& options) {
    const auto& geo = input.geometry();
    const double h = geo.effective_height(z);
    const auto& m = input.material();
    const double rp0 = options.rp_static_derivative.value_or(static_reflection_derivative(m));
    const double q = codata.elementary_charge;
    const double hbar = codata.reduced_planck;
    const double L = geo.plate_length;
    const double b = options.thermal_bracket == ThermalBracket::separation ? geo.path_separation : L;
    if (b == 0.0)
        return 0.0;
    const double bracket = 1.0 / (2.0 * h) - 1.0 / std::hypot(2.0 * h, b);
    return input.interaction_time() * q * q * codata.boltzmann * m.temperature() * rp0
        / (2.0 * pi * codata.vacuum_permittivity * hbar * hbar) * bracket;
}

double gamma_anglin(const DecoherenceInput& input, double z) {
    const auto& geo = input.geometry();
    const double h = geo.effective_height(z);
    const auto& m = input.material();
    const double e = codata.elementary_charge;
    const double dx = geo.path_separation;
    return pi * e * e * codata.boltzmann * m.temperature() * m.resistivity() * geo.plate_length
        * dx * dx / (4.0 * codata.planck * codata.planck * input.beam().velocity() * h * h * h);
}

double machnikowski_geometric(double xi) {
    if (!std::isfinite(xi))
        throw DomainError("geometric function needs a finite argument");
    if (xi == 0.0)
        return 0.0;
    const double b = 0.25 * xi * xi;
    auto f = [b](double u) {
        const double u2 = u * u;
        return 0.5 / (1.0 + u2) * std::log1p(b * u2 / (1.0 + u2));
    };
    const math::QuadratureConfig cfg{.relative_tolerance = 1e-13,
                                     .absolute_tolerance = 1e-300,
                                     .max_subdivisions = 2000};
    return math::integrate_adaptive_1d(f, -math::infinity, math::infinity, cfg).value;
}

double machnikowski_material(double zeta) {
    if (!(zeta > 0.0) || !std::isfinite(zeta))
        throw DomainError(fmt::format("material function needs zeta > 0, got {}", zeta));
    const double a = zeta / (4.0 * pi);
    // (1/u^3) [1 + a/u^2 g(u)]^-2 = u / (u^2 + a g(u))^2 with
    // g(u) = 1 + (1 - u^2)/(2u) ln((1+u)/(1-u)) = 1 + (1 - u^2) atanh(u)/u.
    auto f = [a](double u) {
        const double g = 1.0 + (1.0 - u) * (1.0 + u) * std::atanh(u) / u;
        const double d = u * u + a * g;
        return u / (d * d);
    };
    const math::QuadratureConfig cfg{.relative_tolerance = 1e-13,
                                     .absolute_tolerance = 1e-300,
                                     .max_subdivisions = 2000};
    return 0.25 * zeta * zeta * math::integrate_adaptive_1d(f, 0.0, 1.0, cfg).value;
}

double machnikowski_zeta(const physics::Material& material) {
    require_material(material.machnikowski().has_value(), material, "Machnikowski parameters");
    const auto& p = *material.machnikowski();
    const double e = codata.elementary_charge;
    const double hbar = codata.reduced_planck;
    return p.effective_mass_ratio * codata.electron_mass * e * e
        / (2.0 * pi * codata.vacuum_permittivity * p.screening_permittivity * hbar * hbar
           * p.fermi_wavevector);
}

double gamma_machnikowski(const DecoherenceInput& input, double z) {
    const auto& geo = input.geometry();
    const double h = geo.effective_height(z);
    const auto& m = input.material();
    const double zeta = machnikowski_zeta(m);
    const double inverse_length = codata.boltzmann * m.temperature()
        / (2.0 * pi * pi * codata.reduced_planck * input.beam().velocity())
        * machnikowski_geometric(geo.path_separation / h) * machnikowski_material(zeta);
    return geo.plate_length * inverse_length;
}

double gamma_howie(const DecoherenceInput& input, double z) {
    const auto& geo = input.geometry();
    const double h = geo.effective_height(z);
    const auto& m = input.material();
    require_material(m.howie_cutoff().has_value(), m, "a Howie cut-off frequency");
    const double dx = geo.path_separation;
    if (dx == 0.0)
        return 0.0;
    const double e = codata.elementary_charge;
    const double v = input.beam().velocity();
    const double wm = *m.howie_cutoff();
    const double prefactor = e * e * geo.plate_length * wm * wm
        / (4.0 * pi * pi * codata.reduced_planck * m.conductivity() * v * v);
    return prefactor * math::exp_integral_e1(2.0 * howie_alpha * h / dx);
}

GammaEstimate gamma(Model model, const DecoherenceInput& input, double z,
                    const ModelOptions& options) {
    switch (model) {
    case Model::markov: return gamma_markov(input, z, options);
    case Model::finite_temperature: return {gamma_finite_temperature(input, z, options), 0.0, true};
    case Model::anglin: return {gamma_anglin(input, z), 0.0, true};
    case Model::machnikowski: return {gamma_machnikowski(input, z), 0.0, true};
    case Model::howie: return {gamma_howie(input, z), 0.0, true};
    }
    throw ConfigError("unknown model");
}

} // namespace aloof::decoherence
