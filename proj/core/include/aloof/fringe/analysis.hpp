#pragma once

// From a counts image to a contrast-versus-height profile: slab
// histograms, model fits and normalization to a reference band.

#include "aloof/fringe/image.hpp"
#include "aloof/fringe/model.hpp"
#include "aloof/provenance.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aloof::fringe {

enum class FitWeighting {
    /// 1/max(n, 1) from the observed counts.
    counts,
    /// 1/max(m, 1) from the current model, iterated to convergence
    /// (Poisson-likelihood weights).
    model,
};

struct FringeFitOptions {
    /// Start values; seeded from the histogram spectrum when absent.
    std::optional<FringeModelParams> initial;
    int max_iterations = 200;
    /// A spectral peak counts as periodicity when its power exceeds this
    /// multiple of the Poisson noise power.
    double min_spectral_significance = 20.0;
    FitWeighting weighting = FitWeighting::model;
};

/// Parameter order of the covariance matrix.
enum FringeParam { p_intensity, p_contrast, p_spacing, p_phase, p_envelope_width, p_envelope_phase };

struct FringeFit {
    FringeModelParams params;
    Eigen::Matrix<double, 6, 6> covariance = Eigen::Matrix<double, 6, 6>::Zero();
    double chi_squared = 0.0;
    int degrees_of_freedom = 0;
    bool converged = false;
    /// False when no fringe period stands out of the noise; C is then 0 and
    /// the spacing is meaningless.
    bool periodic = false;
    /// Contrast before folding into [0, 1].
    double raw_contrast = 0.0;
    double spectral_significance = 0.0;

    double contrast_sigma() const;
};

/// Weighted least-squares fit of the fringe model to a 1D
/// histogram with bin centres at (i - (n-1)/2) * pitch. Throws AnalysisError
/// for fewer than 8 bins or an empty histogram.
FringeFit fit_fringe_model(const std::vector<double>& histogram, double pitch,
                           const FringeFitOptions& options = {});

enum class SlabMode {
    /// One full fit of the whole image fixes s, phi0, s1 and phi1; each slab
    /// then fits only I0 and C.
    shared_geometry,
    /// Every slab gets its own six-parameter fit.
    independent,
};

enum class SlabStatus { ok, clamped_above_one, no_periodicity, not_converged };
std::string_view to_string(SlabStatus status);

struct SliceOptions {
    double slab_height = 2e-6;
    SlabMode mode = SlabMode::shared_geometry;
    /// Row shear polynomial: row r is shifted by sum_k c_k r^k columns
    /// (linear interpolation) before slicing.
    std::vector<double> shear;
    FringeFitOptions fit;
};

struct ContrastProfile {
    std::vector<double> z_centers;
    std::vector<double> z_lower;
    std::vector<double> z_upper;
    std::vector<double> contrast;
    std::vector<double> sigma;
    std::vector<SlabStatus> status;
    bool normalized = false;
    double normalization_constant = 1.0;
    /// Top edge of the analysed data [m].
    double z_top = 0.0;
    /// Whole-image fit used in shared-geometry mode.
    std::optional<FringeFit> global_fit;

    std::size_t size() const { return z_centers.size(); }
    bool usable(std::size_t i) const {
        return status[i] == SlabStatus::ok || status[i] == SlabStatus::clamped_above_one;
    }
    bool degraded() const;
};

/// Column sums over rows [row_begin, row_end), after optional shear.
std::vector<double> slab_histogram(const FringeImage& image, std::size_t row_begin,
                                   std::size_t row_end, const std::vector<double>& shear = {});

/// Slice into slabs of `slab_height` (partial slabs at the top dropped) and
/// fit each. Slab failures are flagged, never dropped.
ContrastProfile slice_and_fit(const FringeImage& image, const SliceOptions& options = {});

/// Divide by the mean usable contrast of slabs lying entirely within the
/// top `band` of the data. Throws AnalysisError when that band is empty.
ContrastProfile normalize_profile(const ContrastProfile& profile, double band = 5e-6);

/// Columns z_m,contrast,sigma,normalized,status.
void write_profile_csv(std::ostream& out, const ContrastProfile& profile,
                       const Provenance& provenance);

} // namespace aloof::fringe
