#include "aloof/errors.hpp"
#include "aloof/fringe/analysis.hpp"
#include "aloof/math/least_squares.hpp"
#include "aloof/math/special.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>

namespace aloof::fringe {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

struct SpectralPeak {
    double frequency = 0.0;  // cycles per bin
    double contrast = 0.0;
    double phase = 0.0;
    double significance = 0.0;
};

// Hann-windowed, mean-subtracted transform scanned on an oversampled
// frequency grid. Frequencies below 4/n are skipped because the window's
// main lobe carries the envelope there.
SpectralPeak dominant_peak(const std::vector<double>& h, const std::vector<double>& x) {
    const std::size_t n = h.size();
    std::vector<double> window(n);
    double mean = 0.0;
    for (double v : h)
        mean += v;
    mean /= static_cast<double>(n);
    double weighted_total = 0.0;
    double noise = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n - 1)));
        weighted_total += window[i] * h[i];
        noise += window[i] * window[i] * std::max(h[i], 1.0);
    }
    auto transform = [&](double f) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            acc += window[i] * (h[i] - mean) * std::polar(1.0, -two_pi * f * x[i]);
        return acc;
    };
    const double nd = static_cast<double>(n);
    const double f_lo = 4.0 / nd;
    const double step = 1.0 / (8.0 * nd);
    double best_f = f_lo;
    double best_power = -1.0;
    for (double f = f_lo; f <= 0.5; f += step) {
        const double power = std::norm(transform(f));
        if (power > best_power) {
            best_power = power;
            best_f = f;
        }
    }
    // Parabolic refinement of the peak on |X|.
    const double a = std::abs(transform(best_f - step));
    const double b = std::sqrt(best_power);
    const double c = std::abs(transform(best_f + step));
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0)
        best_f += 0.5 * step * (a - c) / denom;
    const auto peak = transform(best_f);
    SpectralPeak out;
    out.frequency = best_f;
    out.significance = std::norm(peak) / noise;
    out.contrast = weighted_total > 0.0 ? 2.0 * std::abs(peak) / weighted_total : 0.0;
    out.phase = std::arg(peak);
    return out;
}

double sinc2(double psi) {
    const double s = math::sinc(psi);
    return s * s;
}

// Envelope width and offset by a log-spaced scan with I0 solved in closed
// form at each trial width.
std::pair<double, double> seed_envelope(const std::vector<double>& h, const std::vector<double>& x,
                                        double contrast, double spacing, double phase) {
    const std::size_t n = h.size();
    double total = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += h[i];
        moment += x[i] * h[i];
    }
    const double centroid = moment / total;
    const double nd = static_cast<double>(n);
    double best_width = 4.0 * nd;
    double best_phase = 0.0;
    double best_cost = INFINITY;
    constexpr int steps = 48;
    for (int k = 0; k <= steps; ++k) {
        const double width = 0.5 * nd * std::pow(128.0, static_cast<double>(k) / steps);
        const double env_phase = -two_pi * centroid / width;
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = sinc2(two_pi * x[i] / width + env_phase)
                * (1.0 + contrast * std::cos(two_pi * x[i] / spacing + phase));
            const double w = 1.0 / std::max(h[i], 1.0);
            num += w * h[i] * g;
            den += w * g * g;
        }
        if (!(den > 0.0))
            continue;
        const double i0 = num / den;
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = sinc2(two_pi * x[i] / width + env_phase)
                * (1.0 + contrast * std::cos(two_pi * x[i] / spacing + phase));
            const double r = i0 * g - h[i];
            cost += r * r / std::max(h[i], 1.0);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best_width = width;
            best_phase = env_phase;
        }
    }
    return {best_width, best_phase};
}

double wrap_phase(double phi) {
    phi = std::remainder(phi, two_pi);
    return phi <= -pi ? phi + two_pi : phi;
}

} // namespace

double FringeFit::contrast_sigma() const { return std::sqrt(std::max(covariance(1, 1), 0.0)); }

FringeFit fit_fringe_model(const std::vector<double>& histogram, double pitch,
                           const FringeFitOptions& options) {
    const std::size_t n = histogram.size();
    if (n < 8)
        throw AnalysisError(fmt::format("fringe fit needs at least 8 bins, got {}", n));
    if (!(pitch > 0.0))
        throw DomainError("histogram pitch must be positive");
    double total = 0.0;
    for (double v : histogram) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw AnalysisError("histogram holds a negative or non-finite bin");
        total += v;
    }
    if (!(total > 0.0))
        throw AnalysisError("histogram is empty");

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = static_cast<double>(i) - 0.5 * static_cast<double>(n - 1);

    FringeFit result;
    Eigen::VectorXd start(6);
    bool fit_fringes = true;
    if (options.initial) {
        const auto& p = *options.initial;
        start << p.intensity, p.contrast, p.spacing / pitch, p.phase, p.envelope_width / pitch,
            p.envelope_phase;
        result.spectral_significance = INFINITY;
    } else {
        const auto peak = dominant_peak(histogram, x);
        result.spectral_significance = peak.significance;
        fit_fringes = peak.significance >= options.min_spectral_significance;
        const double spacing = 1.0 / peak.frequency;
        const double contrast = fit_fringes ? std::min(peak.contrast, 1.0) : 0.0;
        const auto [width, env_phase] = seed_envelope(histogram, x, contrast, spacing, peak.phase);
        start << total / static_cast<double>(n), contrast, spacing, peak.phase, width, env_phase;
    }

    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::VectorXd sqrt_w(nn);
    for (Eigen::Index i = 0; i < nn; ++i)
        sqrt_w[i] = 1.0 / std::sqrt(std::max(histogram[static_cast<std::size_t>(i)], 1.0));

    // Weights from the model are refreshed between complete fits, so each
    // fit sees fixed weights.
    auto reweight = [&](const Eigen::VectorXd& p) {
        for (Eigen::Index i = 0; i < nn; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            const double env = math::sinc(two_pi * xi / p[4] + p[5]);
            const double m = p[0] * (1.0 + p[1] * std::cos(two_pi * xi / p[2] + p[3])) * env * env;
            sqrt_w[i] = 1.0 / std::sqrt(std::max(m, 1.0));
        }
    };

    math::LevenbergMarquardtOptions lm;
    lm.max_iterations = options.max_iterations;

    if (fit_fringes) {
        auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& j) {
            r.resize(nn);
            j.resize(nn, 6);
            for (Eigen::Index i = 0; i < nn; ++i) {
                const double xi = x[static_cast<std::size_t>(i)];
                const double theta = two_pi * xi / p[2] + p[3];
                const double psi = two_pi * xi / p[4] + p[5];
                const double s = math::sinc(psi);
                const double env = s * s;
                const double denv = 2.0 * s * math::sinc_derivative(psi);
                const double fringe = 1.0 + p[1] * std::cos(theta);
                const double dfringe_dtheta = -p[1] * std::sin(theta);
                const double w = sqrt_w[i];
                r[i] = w * (p[0] * fringe * env - histogram[static_cast<std::size_t>(i)]);
                j(i, 0) = w * fringe * env;
                j(i, 1) = w * p[0] * std::cos(theta) * env;
                j(i, 2) = w * p[0] * dfringe_dtheta * env * (-two_pi * xi / (p[2] * p[2]));
                j(i, 3) = w * p[0] * dfringe_dtheta * env;
                j(i, 4) = w * p[0] * fringe * denv * (-two_pi * xi / (p[4] * p[4]));
                j(i, 5) = w * p[0] * fringe * denv;
            }
        };
        auto fit = math::levenberg_marquardt(residuals, start, lm);
        if (options.weighting == FitWeighting::model) {
            for (int pass = 0; pass < 3 && fit.converged; ++pass) {
                reweight(fit.params);
                fit = math::levenberg_marquardt(residuals, fit.params, lm);
            }
        }
        Eigen::VectorXd p = fit.params;
        // Fold onto C >= 0, s > 0, s1 > 0; the model is invariant under each
        // of these sign changes together with the matching phase change.
        Eigen::Matrix<double, 6, 1> sign = Eigen::Matrix<double, 6, 1>::Ones();
        result.raw_contrast = p[1];
        if (p[2] < 0.0) {
            p[2] = -p[2];
            p[3] = -p[3];
            sign[2] = sign[3] = -1.0;
        }
        if (p[1] < 0.0) {
            p[1] = -p[1];
            p[3] += pi;
            sign[1] = -sign[1];
        }
        if (p[4] < 0.0) {
            p[4] = -p[4];
            p[5] = -p[5];
            sign[4] = sign[5] = -1.0;
        }
        Eigen::Matrix<double, 6, 1> scale = sign;
        scale[2] *= pitch;
        scale[4] *= pitch;
        result.covariance = scale.asDiagonal() * fit.covariance * scale.asDiagonal();
        result.params = {p[0], p[1], p[2] * pitch, wrap_phase(p[3]), p[4] * pitch, p[5]};
        result.chi_squared = fit.chi_squared;
        result.degrees_of_freedom = fit.degrees_of_freedom;
        result.converged = fit.converged && std::isfinite(fit.chi_squared);
        result.periodic = true;
        return result;
    }

    // No fringe period in the data: fit the envelope alone with C = 0.
    Eigen::VectorXd env_start(3);
    env_start << start[0], start[4], start[5];
    auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& j) {
        r.resize(nn);
        j.resize(nn, 3);
        for (Eigen::Index i = 0; i < nn; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            const double psi = two_pi * xi / p[1] + p[2];
            const double s = math::sinc(psi);
            const double denv = 2.0 * s * math::sinc_derivative(psi);
            const double w = sqrt_w[i];
            r[i] = w * (p[0] * s * s - histogram[static_cast<std::size_t>(i)]);
            j(i, 0) = w * s * s;
            j(i, 1) = w * p[0] * denv * (-two_pi * xi / (p[1] * p[1]));
            j(i, 2) = w * p[0] * denv;
        }
    };
    const auto fit = math::levenberg_marquardt(residuals, env_start, lm);
    const double width = std::abs(fit.params[1]);
    const double env_phase = fit.params[1] < 0.0 ? -fit.params[2] : fit.params[2];
    result.params = {fit.params[0], 0.0, start[2] * pitch, 0.0, width * pitch, env_phase};
    result.covariance.setZero();
    result.covariance(0, 0) = fit.covariance(0, 0);
    result.covariance(4, 4) = fit.covariance(1, 1) * pitch * pitch;
    result.covariance(5, 5) = fit.covariance(2, 2);
    result.chi_squared = fit.chi_squared;
    result.degrees_of_freedom = fit.degrees_of_freedom;
    result.converged = fit.converged;
    result.periodic = false;
    return result;
}

} // namespace aloof::fringe
