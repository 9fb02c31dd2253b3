#include "aloof/decoherence/curve.hpp"

#include "aloof/errors.hpp"
#include "aloof/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace aloof::decoherence {

bool VisibilityCurve::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool ok) { return ok; });
}

double VisibilityCurve::visibility_at(double z) const {
    if (z_values.empty())
        throw DomainError("empty visibility curve");
    if (z_values.size() == 1) {
        if (z == z_values.front())
            return visibility_values.front();
        throw DomainError(fmt::format("z = {} m outside single-point curve", z));
    }
    const double tol = 1e-12 * (z_values.back() - z_values.front());
    if (z < z_values.front() - tol || z > z_values.back() + tol)
        throw DomainError(fmt::format("z = {} m outside curve range [{}, {}] m", z,
                                      z_values.front(), z_values.back()));
    const auto it = std::upper_bound(z_values.begin(), z_values.end(), z);
    std::size_t i = static_cast<std::size_t>(it - z_values.begin());
    i = std::clamp<std::size_t>(i, 1, z_values.size() - 1);
    const double z0 = z_values[i - 1];
    const double z1 = z_values[i];
    const double w = std::clamp((z - z0) / (z1 - z0), 0.0, 1.0);
    return (1.0 - w) * visibility_values[i - 1] + w * visibility_values[i];
}

VisibilityCurve visibility_curve(Model model, const DecoherenceInput& input,
                                 const ModelOptions& options) {
    const auto& grid = input.geometry().z_grid;
    if (grid.empty())
        throw DomainError("geometry has an empty z grid");
    for (double z : grid)
        (void)input.geometry().effective_height(z);

    VisibilityCurve curve;
    curve.model = model;
    curve.z_values = grid;
    const std::size_t n = grid.size();
    std::vector<GammaEstimate> estimates(n);
    parallel_for(n, [&](std::size_t i) { estimates[i] = gamma(model, input, grid[i], options); });

    curve.gamma_values.resize(n);
    curve.visibility_values.resize(n);
    curve.quadrature_errors.resize(n);
    curve.converged.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Quadrature noise may leave a vanishing Gamma slightly negative.
        const double g = std::max(estimates[i].gamma, 0.0);
        curve.gamma_values[i] = g;
        curve.visibility_values[i] = std::exp(-g);
        curve.quadrature_errors[i] = estimates[i].error;
        curve.converged[i] = estimates[i].converged;
    }
    return curve;
}

namespace {

std::string_view to_string(Retardation r) {
    switch (r) {
    case Retardation::none: return "none";
    case Retardation::envelope: return "envelope";
    case Retardation::full: return "full";
    }
    return "unknown";
}

std::string_view to_string(PermittivityModel p) {
    return p == PermittivityModel::drude ? "drude" : "ohmic";
}

} // namespace

Provenance describe(const DecoherenceInput& input, const ModelOptions& options) {
    Provenance p = base_provenance();
    const auto& m = input.material();
    const auto& b = input.beam();
    const auto& g = input.geometry();
    auto add = [&p](std::string key, double value) {
        p.emplace_back(std::move(key), format_number(value));
    };
    p.emplace_back("material", m.name());
    add("material.resistivity_ohm_m", m.resistivity());
    add("material.conductivity_s_per_m", m.conductivity());
    add("material.temperature_k", m.temperature());
    add("material.background_permittivity", m.background_permittivity());
    if (m.drude_damping())
        add("material.drude_damping_per_s", *m.drude_damping());
    if (m.machnikowski()) {
        add("material.effective_mass_ratio", m.machnikowski()->effective_mass_ratio);
        add("material.screening_permittivity", m.machnikowski()->screening_permittivity);
        add("material.fermi_wavevector_per_m", m.machnikowski()->fermi_wavevector);
    }
    if (m.howie_cutoff())
        add("material.howie_cutoff_rad_per_s", *m.howie_cutoff());
    p.emplace_back("material.note",
                   "silicon microparameters are assumed defaults; absolute markov/ft "
                   "amplitudes are parameter-sensitive");
    add("beam.voltage_v", b.acceleration_voltage());
    add("beam.velocity_m_per_s", b.velocity());
    add("beam.wavelength_m", b.de_broglie_wavelength());
    add("beam.energy_spread_ev", b.energy_spread_ev());
    add("geometry.plate_length_m", g.plate_length);
    add("geometry.path_separation_m", g.path_separation);
    add("geometry.surface_offset_m", g.surface_offset);
    add("interaction_time_s", input.interaction_time());
    p.emplace_back("options.retardation", std::string(to_string(options.retardation)));
    p.emplace_back("options.permittivity", std::string(to_string(options.permittivity)));
    add("options.rp_static_derivative_s",
        options.rp_static_derivative.value_or(static_reflection_derivative(m)));
    p.emplace_back("options.thermal_bracket",
                   options.thermal_bracket == ThermalBracket::separation ? "separation"
                                                                         : "plate_length");
    add("options.rel_tol", options.quadrature.relative_tolerance);
    add("options.abs_tol", options.quadrature.absolute_tolerance);
    p.emplace_back("options.max_subdivisions", std::to_string(options.quadrature.max_subdivisions));
    p.emplace_back("options.phi_panels", std::to_string(options.phi_panels));
    add("options.envelope_cutoff", options.envelope_cutoff);
    add("howie.alpha", howie_alpha);
    return p;
}

void write_curve_csv(std::ostream& out, const VisibilityCurve& curve,
                     const Provenance& provenance) {
    write_provenance(out, provenance);
    out << "# model=" << to_string(curve.model) << '\n';
    out << "z_m,gamma,visibility,error_estimate,converged\n";
    for (std::size_t i = 0; i < curve.z_values.size(); ++i) {
        out << format_number(curve.z_values[i]) << ',' << format_number(curve.gamma_values[i])
            << ',' << format_number(curve.visibility_values[i]) << ','
            << format_number(curve.quadrature_errors[i]) << ','
            << (curve.converged[i] ? 1 : 0) << '\n';
    }
}

} // namespace aloof::decoherence
