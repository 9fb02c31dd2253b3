#include "aloof/optics/wien.hpp"

#include "aloof/errors.hpp"
#include "aloof/math/least_squares.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace aloof::optics {

namespace {
constexpr double pi = 3.14159265358979323846;
}

void WienFilter::validate() const {
    if (!(plate_length > 0.0) || !(plate_gap > 0.0))
        throw ConfigError("Wien filter plate length and gap must be positive");
    if (!std::isfinite(voltage))
        throw ConfigError("Wien filter voltage must be finite");
}

double wien_shift(const WienFilter& wf, double beam_voltage, double separation) {
    wf.validate();
    if (!(beam_voltage > 0.0))
        throw DomainError("beam voltage must be positive");
    return wf.plate_length * separation * wf.voltage / (2.0 * wf.plate_gap * beam_voltage);
}

double wien_contrast_model(double shift, double coherence_length) {
    if (!(coherence_length > 0.0))
        throw DomainError("coherence length must be positive");
    const double r = shift / coherence_length;
    return std::exp(-0.5 * pi * r * r);
}

std::vector<WienScanPoint> wien_synthetic_scan(const WienFilter& wf, double beam_voltage,
                                               double separation, double coherence_length,
                                               const std::vector<double>& voltages,
                                               double relative_noise, std::uint64_t seed) {
    if (!(relative_noise >= 0.0))
        throw DomainError("noise level must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<WienScanPoint> scan;
    scan.reserve(voltages.size());
    for (double u : voltages) {
        WienFilter at = wf;
        at.voltage = u;
        const double c = wien_contrast_model(wien_shift(at, beam_voltage, separation),
                                             coherence_length);
        const double noise = relative_noise > 0.0 ? relative_noise * normal(rng) : 0.0;
        scan.push_back({u, c * (1.0 + noise)});
    }
    return scan;
}

WienExtraction wien_extract_separation(const std::vector<WienScanPoint>& scan,
                                       const WienFilter& wf, double beam_voltage,
                                       double coherence_length,
                                       double coherence_length_uncertainty) {
    wf.validate();
    if (scan.size() < 5)
        throw AnalysisError(fmt::format("Wien scan needs at least 5 points, got {}", scan.size()));
    if (!(coherence_length > 0.0) || !(beam_voltage > 0.0))
        throw DomainError("coherence length and beam voltage must be positive");

    const auto n = static_cast<Eigen::Index>(scan.size());
    double c_max = 0.0;
    double c_sum = 0.0;
    double u_mean = 0.0;
    double u_span = 0.0;
    for (const auto& p : scan) {
        c_max = std::max(c_max, p.contrast);
        c_sum += std::max(p.contrast, 0.0);
        u_mean += std::max(p.contrast, 0.0) * p.voltage;
    }
    if (!(c_max > 0.0) || !(c_sum > 0.0))
        throw AnalysisError("Wien scan has no positive contrast");
    u_mean /= c_sum;
    double second = 0.0;
    for (const auto& p : scan) {
        const double d = p.voltage - u_mean;
        second += std::max(p.contrast, 0.0) * d * d;
        u_span = std::max(u_span, std::abs(d));
    }
    if (!(u_span > 0.0))
        throw AnalysisError("Wien scan voltages are all equal");
    const double w_seed = std::max(std::sqrt(second / c_sum), 1e-3 * u_span);

    // Fit in units of the scan half-span so every parameter is O(1).
    const double scale = u_span;
    auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& j) {
        r.resize(n);
        j.resize(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& s = scan[static_cast<std::size_t>(i)];
            const double d = (s.voltage / scale - p[1]);
            const double w = p[2];
            const double g = std::exp(-0.5 * d * d / (w * w));
            r[i] = p[0] * g - s.contrast;
            j(i, 0) = g;
            j(i, 1) = p[0] * g * d / (w * w);
            j(i, 2) = p[0] * g * d * d / (w * w * w);
        }
    };
    Eigen::VectorXd start(3);
    start << c_max, u_mean / scale, w_seed / scale;
    const auto fit = math::levenberg_marquardt(residuals, start);
    const double amplitude = fit.params[0];
    const double width = std::abs(fit.params[2]) * scale;
    if (!fit.converged || fit.rank < 3 || !std::isfinite(width) || !(amplitude > 0.0))
        throw AnalysisError("Gaussian fit to the Wien scan did not converge");
    const double center = fit.params[1] * scale;
    double reach = 0.0;
    for (const auto& p : scan)
        reach = std::max(reach, std::abs(p.voltage - center));
    if (std::exp(-0.5 * reach * reach / (width * width)) > 0.5)
        throw AnalysisError(fmt::format(
            "Wien scan does not resolve the contrast decay (width {:.4g} V, reach {:.4g} V)",
            width, reach));

    const double width_sigma = std::sqrt(std::max(fit.covariance(2, 2), 0.0)) * scale;
    const double critical = width * std::sqrt(pi);
    const double separation = 2.0 * wf.plate_gap * beam_voltage * coherence_length
        / (wf.plate_length * critical);
    const double rel_w = width_sigma / width;
    const double rel_lc = coherence_length_uncertainty / coherence_length;
    const double rel = std::hypot(rel_w, rel_lc);
    return {separation, rel * separation, rel, amplitude, center, width, width_sigma, critical};
}

} // namespace aloof::optics
