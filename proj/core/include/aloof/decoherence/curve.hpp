#pragma once

#include "aloof/decoherence/models.hpp"
#include "aloof/provenance.hpp"

#include <iosfwd>
#include <vector>

namespace aloof::decoherence {

/// Gamma and V = exp(-Gamma) on the input's z grid (grid coordinates, before
/// the surface offset). V underflows to 0 in double precision for
/// Gamma > ~745.
struct VisibilityCurve {
    Model model = Model::markov;
    std::vector<double> z_values;
    std::vector<double> gamma_values;
    std::vector<double> visibility_values;
    /// Quadrature error estimate per point; zero for closed forms.
    std::vector<double> quadrature_errors;
    /// False where the Markov quadrature stopped short of its tolerance.
    std::vector<bool> converged;

    bool all_converged() const;
    /// Linear interpolation of V; throws DomainError outside the grid.
    double visibility_at(double z) const;
};

VisibilityCurve visibility_curve(Model model, const DecoherenceInput& input,
                                 const ModelOptions& options = {});

/// Resolved physical parameters, constants and tolerances for CSV headers.
Provenance describe(const DecoherenceInput& input, const ModelOptions& options);

/// Columns z_m,gamma,visibility,error_estimate,converged, preceded by
/// `# key=value` provenance lines.
void write_curve_csv(std::ostream& out, const VisibilityCurve& curve,
                     const Provenance& provenance);

} // namespace aloof::decoherence
