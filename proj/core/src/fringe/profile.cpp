#include "aloof/errors.hpp"
#include "aloof/fringe/analysis.hpp"
#include "aloof/math/special.hpp"
#include "aloof/parallel.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace aloof::fringe {

namespace {

constexpr double two_pi = 6.283185307179586476925;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct SlabFit {
    double contrast = 0.0;
    double sigma = nan;
    SlabStatus status = SlabStatus::ok;
};

SlabStatus fold_into_unit(double& contrast) {
    if (contrast < 0.0)
        contrast = 0.0;
    if (contrast > 1.0) {
        contrast = 1.0;
        return SlabStatus::clamped_above_one;
    }
    return SlabStatus::ok;
}

// With the geometry fixed the model a E + b E cos(theta) is linear in
// (a, b) = (I0, I0 C); solve the weighted normal equations directly. Model
// weighting iterates the solve with weights 1/max(model, 1).
SlabFit fit_slab_shared(const std::vector<double>& h, double pitch, const FringeModelParams& g,
                        FitWeighting weighting) {
    const std::size_t n = h.size();
    std::vector<std::pair<double, double>> basis(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * pitch;
        const double s = math::sinc(two_pi * x / g.envelope_width + g.envelope_phase);
        const double env = s * s;
        basis[i] = {env, env * std::cos(two_pi * x / g.spacing + g.phase)};
    }
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i)
        weight[i] = 1.0 / std::max(h[i], 1.0);

    SlabFit out;
    Eigen::Matrix2d normal;
    Eigen::Vector2d ab;
    const int passes = weighting == FitWeighting::model ? 4 : 1;
    for (int pass = 0; pass < passes; ++pass) {
        normal.setZero();
        Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const auto [b1, b2] = basis[i];
            const double w = weight[i];
            normal(0, 0) += w * b1 * b1;
            normal(0, 1) += w * b1 * b2;
            normal(1, 1) += w * b2 * b2;
            rhs[0] += w * b1 * h[i];
            rhs[1] += w * b2 * h[i];
        }
        normal(1, 0) = normal(0, 1);
        if (!(normal.determinant() > 0.0)) {
            out.status = SlabStatus::not_converged;
            return out;
        }
        ab = normal.ldlt().solve(rhs);
        for (std::size_t i = 0; i < n; ++i)
            weight[i] = 1.0 / std::max(ab[0] * basis[i].first + ab[1] * basis[i].second, 1.0);
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = ab[0] * basis[i].first + ab[1] * basis[i].second;
        const double r = m - h[i];
        chi2 += r * r / std::max(weighting == FitWeighting::model ? m : h[i], 1.0);
    }
    const double dof = static_cast<double>(n) - 2.0;
    const Eigen::Matrix2d cov = normal.inverse() * (dof > 0.0 ? chi2 / dof : 1.0);
    if (!(ab[0] > 0.0)) {
        out.status = SlabStatus::not_converged;
        return out;
    }
    const double c = ab[1] / ab[0];
    const double var = (cov(1, 1) - 2.0 * c * cov(0, 1) + c * c * cov(0, 0)) / (ab[0] * ab[0]);
    out.contrast = c;
    out.sigma = std::sqrt(std::max(var, 0.0));
    out.status = fold_into_unit(out.contrast);
    return out;
}

SlabFit fit_slab_independent(const std::vector<double>& h, double pitch,
                             const FringeFitOptions& options) {
    SlabFit out;
    try {
        const auto fit = fit_fringe_model(h, pitch, options);
        if (!fit.periodic) {
            out.status = SlabStatus::no_periodicity;
            return out;
        }
        if (!fit.converged) {
            out.status = SlabStatus::not_converged;
            return out;
        }
        out.contrast = fit.params.contrast;
        out.sigma = fit.contrast_sigma();
        out.status = fold_into_unit(out.contrast);
    } catch (const AnalysisError&) {
        out.status = SlabStatus::no_periodicity;
    }
    return out;
}

} // namespace

std::string_view to_string(SlabStatus status) {
    switch (status) {
    case SlabStatus::ok: return "ok";
    case SlabStatus::clamped_above_one: return "clamped_above_one";
    case SlabStatus::no_periodicity: return "no_periodicity";
    case SlabStatus::not_converged: return "not_converged";
    }
    return "unknown";
}

bool ContrastProfile::degraded() const {
    for (std::size_t i = 0; i < size(); ++i)
        if (!usable(i))
            return true;
    return size() == 0;
}

std::vector<double> slab_histogram(const FringeImage& image, std::size_t row_begin,
                                   std::size_t row_end, const std::vector<double>& shear) {
    if (row_begin >= row_end || row_end > image.rows)
        throw DomainError("slab rows out of range");
    std::vector<double> hist(image.columns, 0.0);
    for (std::size_t r = row_begin; r < row_end; ++r) {
        double shift = 0.0;
        double power = 1.0;
        for (double c : shear) {
            shift += c * power;
            power *= static_cast<double>(r);
        }
        if (shift == 0.0) {
            for (std::size_t c = 0; c < image.columns; ++c)
                hist[c] += image.at(c, r);
            continue;
        }
        // corrected[c] = row(c + shift), linear interpolation, zero outside.
        for (std::size_t c = 0; c < image.columns; ++c) {
            const double src = static_cast<double>(c) + shift;
            const double lo = std::floor(src);
            const double frac = src - lo;
            const auto sample = [&](double col) -> double {
                if (col < 0.0 || col > static_cast<double>(image.columns - 1))
                    return 0.0;
                return image.at(static_cast<std::size_t>(col), r);
            };
            hist[c] += (1.0 - frac) * sample(lo) + frac * sample(lo + 1.0);
        }
    }
    return hist;
}

ContrastProfile slice_and_fit(const FringeImage& image, const SliceOptions& options) {
    image.validate();
    const double rows_real = options.slab_height / image.pixel_pitch_z;
    const auto rows_per_slab = static_cast<std::size_t>(std::llround(rows_real));
    if (rows_per_slab < 1)
        throw DomainError(fmt::format("slab height {} m is below one row ({} m)",
                                      options.slab_height, image.pixel_pitch_z));
    const std::size_t slabs = image.rows / rows_per_slab;
    if (slabs == 0)
        throw AnalysisError("image is shorter than one slab");

    ContrastProfile profile;
    std::vector<std::vector<double>> histograms(slabs);
    for (std::size_t k = 0; k < slabs; ++k) {
        histograms[k] = slab_histogram(image, k * rows_per_slab, (k + 1) * rows_per_slab,
                                       options.shear);
        const double lower = image.z_of_bottom_row
            + static_cast<double>(k * rows_per_slab) * image.pixel_pitch_z;
        const double upper = lower + static_cast<double>(rows_per_slab) * image.pixel_pitch_z;
        profile.z_lower.push_back(lower);
        profile.z_upper.push_back(upper);
        profile.z_centers.push_back(0.5 * (lower + upper));
    }
    profile.z_top = profile.z_upper.back();

    std::vector<SlabFit> fits(slabs);
    if (options.mode == SlabMode::shared_geometry) {
        std::vector<double> global(image.columns, 0.0);
        for (const auto& h : histograms)
            for (std::size_t c = 0; c < global.size(); ++c)
                global[c] += h[c];
        SlabStatus failure = SlabStatus::ok;
        try {
            const auto g = fit_fringe_model(global, image.pixel_pitch_x, options.fit);
            profile.global_fit = g;
            if (!g.periodic)
                failure = SlabStatus::no_periodicity;
            else if (!g.converged)
                failure = SlabStatus::not_converged;
        } catch (const AnalysisError&) {
            failure = SlabStatus::no_periodicity;
        }
        if (failure != SlabStatus::ok) {
            for (auto& f : fits)
                f = {0.0, nan, failure};
        } else {
            const auto geometry = profile.global_fit->params;
            parallel_for(slabs, [&](std::size_t k) {
                fits[k] = fit_slab_shared(histograms[k], image.pixel_pitch_x, geometry,
                                           options.fit.weighting);
            });
        }
    } else {
        parallel_for(slabs, [&](std::size_t k) {
            fits[k] = fit_slab_independent(histograms[k], image.pixel_pitch_x, options.fit);
        });
    }
    for (const auto& f : fits) {
        profile.contrast.push_back(f.contrast);
        profile.sigma.push_back(f.sigma);
        profile.status.push_back(f.status);
    }
    return profile;
}

ContrastProfile normalize_profile(const ContrastProfile& profile, double band) {
    if (!(band > 0.0))
        throw DomainError("reference band height must be positive");
    const double threshold = profile.z_top - band;
    const double slack = 1e-9 * band;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.z_lower[i] >= threshold - slack && profile.usable(i)) {
            sum += profile.contrast[i];
            ++count;
        }
    }
    if (count == 0)
        throw AnalysisError(fmt::format(
            "no usable slab lies within the top {} m of the data", band));
    const double mean = sum / static_cast<double>(count);
    if (!(mean > 0.0))
        throw AnalysisError("reference band has zero mean contrast");
    ContrastProfile out = profile;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.contrast[i] /= mean;
        out.sigma[i] /= mean;
    }
    out.normalized = true;
    out.normalization_constant = profile.normalization_constant * mean;
    return out;
}

void write_profile_csv(std::ostream& out, const ContrastProfile& profile,
                       const Provenance& provenance) {
    write_provenance(out, provenance);
    out << "# normalization_constant=" << format_number(profile.normalization_constant) << '\n';
    out << "z_m,contrast,sigma,normalized,status\n";
    for (std::size_t i = 0; i < profile.size(); ++i)
        out << format_number(profile.z_centers[i]) << ',' << format_number(profile.contrast[i])
            << ',' << format_number(profile.sigma[i]) << ',' << (profile.normalized ? 1 : 0)
            << ',' << to_string(profile.status[i]) << '\n';
}

} // namespace aloof::fringe
