#pragma once

namespace aloof::fringe {

/// I(x) = I0 (1 + C cos(2 pi x / s + phi0)) sinc^2(2 pi x / s1 + phi1).
struct FringeModelParams {
    double intensity = 1.0;       // I0 [counts]
    double contrast = 0.0;        // C
    double spacing = 1.0;         // s [m]
    double phase = 0.0;           // phi0 [rad]
    double envelope_width = 1.0;  // s1 [m]
    double envelope_phase = 0.0;  // phi1 [rad]

    /// Throws DomainError unless I0 > 0, s > 0, s1 > 0 and 0 <= C <= 1.
    void validate() const;
};

double fringe_intensity(const FringeModelParams& p, double x);

} // namespace aloof::fringe
