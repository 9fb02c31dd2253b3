#pragma once

// Measuring the path separation with a Wien filter: the longitudinal shift
// between the two wave packets grows linearly with the filter voltage and
// the fringe contrast decays as a Gaussian in that shift.

#include <cstdint>
#include <vector>

namespace aloof::optics {

struct WienFilter {
    double plate_length;  // L_WF [m]
    double plate_gap;     // D [m]
    double voltage = 0.0; // U_WF [V]

    void validate() const;
};

/// Delta y = L dx U_WF / (2 D U_beam).
double wien_shift(const WienFilter& wf, double beam_voltage, double separation);

/// C = exp(-pi/2 (dy / l_c)^2), so C(l_c) = exp(-pi/2).
double wien_contrast_model(double shift, double coherence_length);

struct WienScanPoint {
    double voltage;
    double contrast;
};

/// Contrast at each filter voltage for a known separation, multiplied by
/// (1 + relative_noise * N(0,1)) per point. Deterministic for a fixed seed.
std::vector<WienScanPoint> wien_synthetic_scan(const WienFilter& wf, double beam_voltage,
                                               double separation, double coherence_length,
                                               const std::vector<double>& voltages,
                                               double relative_noise, std::uint64_t seed);

struct WienExtraction {
    double separation;            // [m]
    double uncertainty;           // 1 sigma [m]
    double relative_uncertainty;
    double amplitude;             // fitted peak contrast
    double center_voltage;        // [V]
    double width_voltage;         // Gaussian sigma in U_WF [V]
    double width_uncertainty;     // [V]
    double critical_voltage;      // U_WF* where dy = l_c [V]
};

/// Fits A exp(-(U - U0)^2 / (2 w^2)) to the scan, converts the width to the
/// voltage U* = w sqrt(pi) at which the shift equals l_c, and returns
/// dx = 2 D U_beam l_c / (L U*). The uncertainty combines the fit
/// covariance of w with the relative uncertainty of l_c in quadrature.
/// Throws AnalysisError for fewer than 5 points or a scan whose decay is not
/// resolved.
WienExtraction wien_extract_separation(const std::vector<WienScanPoint>& scan,
                                       const WienFilter& wf, double beam_voltage,
                                       double coherence_length,
                                       double coherence_length_uncertainty = 0.0);

} // namespace aloof::optics
