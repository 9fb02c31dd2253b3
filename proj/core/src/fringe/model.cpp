#include "aloof/fringe/model.hpp"

#include "aloof/errors.hpp"
#include "aloof/math/special.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aloof::fringe {

void FringeModelParams::validate() const {
    if (!(intensity > 0.0) || !std::isfinite(intensity))
        throw DomainError(fmt::format("fringe intensity must be positive, got {}", intensity));
    if (!(contrast >= 0.0 && contrast <= 1.0))
        throw DomainError(fmt::format("fringe contrast must lie in [0, 1], got {}", contrast));
    if (!(spacing > 0.0) || !(envelope_width > 0.0))
        throw DomainError("fringe spacing and envelope width must be positive");
    if (!std::isfinite(phase) || !std::isfinite(envelope_phase))
        throw DomainError("fringe phases must be finite");
}

double fringe_intensity(const FringeModelParams& p, double x) {
    constexpr double two_pi = 6.283185307179586476925;
    const double envelope = math::sinc(two_pi * x / p.envelope_width + p.envelope_phase);
    return p.intensity * (1.0 + p.contrast * std::cos(two_pi * x / p.spacing + p.phase))
        * envelope * envelope;
}

} // namespace aloof::fringe
