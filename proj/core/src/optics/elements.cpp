#include "aloof/optics/elements.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aloof::optics {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
    if (!ok)
        throw ConfigError(message);
}

template <class Quad>
void validate_quadrupole(const Quad& q, const char* kind) {
    require(q.voltage >= 0.0 && std::isfinite(q.voltage),
            fmt::format("{}: voltage must be >= 0, got {}", kind, q.voltage));
    require(q.aperture > 0.0 && std::isfinite(q.aperture),
            fmt::format("{}: aperture must be positive, got {}", kind, q.aperture));
    require(q.length > 0.0 && std::isfinite(q.length),
            fmt::format("{}: length must be positive, got {}", kind, q.length));
}

Matrix2 drift_matrix(double d) {
    Matrix2 m;
    m << 1.0, d, 0.0, 1.0;
    return m;
}

} // namespace

void validate(const OpticalElement& element) {
    std::visit(overloaded{
                   [](const Drift& d) {
                       require(d.length >= 0.0 && std::isfinite(d.length),
                               fmt::format("drift: length must be >= 0, got {}", d.length));
                   },
                   [](const Biprism& b) {
                       require(std::isfinite(b.voltage), "biprism: voltage must be finite");
                       require(b.wire_radius > 0.0,
                               fmt::format("biprism: wire radius must be positive, got {}",
                                           b.wire_radius));
                       require(b.electrode_distance > b.wire_radius,
                               "biprism: electrode distance must exceed the wire radius");
                       require(b.side == 1 || b.side == -1, "biprism: side must be +1 or -1");
                   },
                   [](const QuadrupoleFocus& q) { validate_quadrupole(q, "quadrupole_focus"); },
                   [](const QuadrupoleDefocus& q) { validate_quadrupole(q, "quadrupole_defocus"); },
               },
               element);
}

double biprism_deflection(const Biprism& b, double beam_voltage) {
    if (!(beam_voltage > 0.0))
        throw DomainError("beam voltage must be positive");
    const double ratio = b.electrode_distance / b.wire_radius;
    const double log = b.log_base == LogBase::natural ? std::log(ratio) : std::log10(ratio);
    return 3.14159265358979323846 / (2.0 * log) * b.voltage / beam_voltage;
}

double quadrupole_strength(double voltage, double aperture, double beam_voltage) {
    if (!(beam_voltage > 0.0))
        throw DomainError("beam voltage must be positive");
    return std::sqrt(voltage / (aperture * aperture * beam_voltage));
}

Matrix2 element_matrix(const OpticalElement& element, double beam_voltage, double incoming_slope) {
    validate(element);
    return std::visit(
        overloaded{
            [](const Drift& d) { return drift_matrix(d.length); },
            [&](const Biprism& b) {
                if (incoming_slope == 0.0)
                    throw DomainError("biprism matrix is singular for a ray parallel to the axis");
                const double a0 = std::atan(incoming_slope);
                const double g = biprism_deflection(b, beam_voltage);
                Matrix2 m;
                m << 1.0, 0.0, 0.0, std::tan(a0 + b.side * g) / incoming_slope;
                return m;
            },
            [&](const QuadrupoleFocus& q) {
                const double k = quadrupole_strength(q.voltage, q.aperture, beam_voltage);
                if (k == 0.0)
                    return drift_matrix(q.length);
                const double kl = k * q.length;
                Matrix2 m;
                m << std::cosh(kl), std::sinh(kl) / k, k * std::sinh(kl), std::cosh(kl);
                return m;
            },
            [&](const QuadrupoleDefocus& q) {
                const double k = quadrupole_strength(q.voltage, q.aperture, beam_voltage);
                if (k == 0.0)
                    return drift_matrix(q.length);
                const double kl = k * q.length;
                Matrix2 m;
                m << std::cos(kl), std::sin(kl) / k, -k * std::sin(kl), std::cos(kl);
                return m;
            },
        },
        element);
}

RayState apply(const OpticalElement& element, double beam_voltage, const RayState& ray) {
    if (const auto* b = std::get_if<Biprism>(&element)) {
        validate(element);
        const double g = biprism_deflection(*b, beam_voltage);
        return {ray.x, std::tan(std::atan(ray.slope) + b->side * g)};
    }
    const Matrix2 m = element_matrix(element, beam_voltage);
    return {m(0, 0) * ray.x + m(0, 1) * ray.slope, m(1, 0) * ray.x + m(1, 1) * ray.slope};
}

double element_length(const OpticalElement& element) {
    return std::visit(overloaded{
                          [](const Drift& d) { return d.length; },
                          [](const Biprism&) { return 0.0; },
                          [](const QuadrupoleFocus& q) { return q.length; },
                          [](const QuadrupoleDefocus& q) { return q.length; },
                      },
                      element);
}

std::string element_type(const OpticalElement& element) {
    return std::visit(overloaded{
                          [](const Drift&) { return std::string("drift"); },
                          [](const Biprism&) { return std::string("biprism"); },
                          [](const QuadrupoleFocus&) { return std::string("quadrupole_focus"); },
                          [](const QuadrupoleDefocus&) { return std::string("quadrupole_defocus"); },
                      },
                      element);
}

} // namespace aloof::optics
