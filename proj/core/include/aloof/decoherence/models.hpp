#pragma once

// The five decoherence expressions. Every gamma_* function takes a grid
// height z, evaluates the model at the effective height z - z0 and returns
// a non-negative exponent Gamma with visibility V = exp(-Gamma).

#include "aloof/decoherence/surface.hpp"
#include "aloof/math/quadrature.hpp"
#include "aloof/physics.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace aloof::decoherence {

enum class Model { markov, finite_temperature, anglin, machnikowski, howie };

inline constexpr Model all_models[] = {Model::markov, Model::finite_temperature, Model::anglin,
                                       Model::machnikowski, Model::howie};

std::string_view to_string(Model model);
/// Accepts the tags above plus "ft" and "anglin_zurek"; throws ConfigError.
Model parse_model(std::string_view tag);

/// Length in the second term of the finite-temperature bracket
/// 1/(2z) - 1/sqrt((2z)^2 + b^2).
enum class ThermalBracket {
    /// b = dx. This is the high-temperature limit of the Markov integrand
    /// (coth -> 2kT/hbar eta, Im r_p -> r_p'(0) eta) integrated in closed
    /// form; it vanishes at dx = 0 and tends to the Anglin-Zurek result for
    /// z >> dx.
    separation,
    /// b = plate length, independent of dx.
    plate_length,
};

struct ModelOptions {
    Retardation retardation = Retardation::envelope;
    PermittivityModel permittivity = PermittivityModel::ohmic;
    /// Overrides r_p'(0) = 2 eps0 rho in the finite-temperature expression [s].
    std::optional<double> rp_static_derivative;
    ThermalBracket thermal_bracket = ThermalBracket::separation;
    /// Markov quadrature. Tolerances apply to Gamma itself.
    math::QuadratureConfig quadrature{.relative_tolerance = 1e-6,
                                      .absolute_tolerance = 1e-10,
                                      .max_subdivisions = 4000,
                                      .initial_panels = 8};
    /// Minimum number of panels along phi.
    std::size_t phi_panels = 64;
    /// The k integration stops where exp(-2 k z gamma) drops below this.
    double envelope_cutoff = 1e-16;
};

/// Material, beam and geometry bundled with the interaction time t = L / v.
class DecoherenceInput {
public:
    DecoherenceInput(physics::Material material, physics::BeamParams beam,
                     physics::InteractionGeometry geometry);

    const physics::Material& material() const noexcept { return material_; }
    const physics::BeamParams& beam() const noexcept { return beam_; }
    const physics::InteractionGeometry& geometry() const noexcept { return geometry_; }
    double interaction_time() const noexcept { return time_; }

    DecoherenceInput with_separation(double dx) const;
    DecoherenceInput with_material(physics::Material material) const;

private:
    physics::Material material_;
    physics::BeamParams beam_;
    physics::InteractionGeometry geometry_;
    double time_;
};

struct GammaEstimate {
    double gamma = 0.0;
    double error = 0.0;
    bool converged = true;
};

/// Long-time (Markov) decoherence functional, evaluated as a 2D adaptive
/// integral over the surface-mode wavevector magnitude and direction.
/// Non-convergence is reported through `converged`, never thrown.
GammaEstimate gamma_markov(const DecoherenceInput& input, double z,
                           const ModelOptions& options = {});

/// High-temperature Drude closed form,
/// t q^2 k_B T r_p'(0) / (2 pi eps0 hbar^2) [1/(2z) - 1/sqrt((2z)^2 + b^2)],
/// with b picked by options.thermal_bracket.
double gamma_finite_temperature(const DecoherenceInput& input, double z,
                                const ModelOptions& options = {});

/// Anglin-Zurek: pi e^2 k_B T rho L dx^2 / (4 h^2 v z^3).
double gamma_anglin(const DecoherenceInput& input, double z);

/// Machnikowski geometric function, 1/2 int 1/(1+u^2) ln(1 + xi^2/4 u^2/(1+u^2)) du.
double machnikowski_geometric(double xi);
/// Machnikowski material function mu(zeta), zeta > 0.
double machnikowski_material(double zeta);
/// Dimensionless material argument m_eff e^2 / (2 pi eps0 eps_i hbar^2 k_F).
double machnikowski_zeta(const physics::Material& material);
/// L / lambda with lambda the Machnikowski coherence length.
double gamma_machnikowski(const DecoherenceInput& input, double z);

inline constexpr double howie_alpha = 2.0;
/// Howie aloof-plasmon probability P = [e^2 L w_m^2 / (4 pi^2 hbar sigma v^2)] E1(2 alpha z / dx).
double gamma_howie(const DecoherenceInput& input, double z);

/// Dispatches to the model; closed forms report zero error.
GammaEstimate gamma(Model model, const DecoherenceInput& input, double z,
                    const ModelOptions& options = {});

} // namespace aloof::decoherence
