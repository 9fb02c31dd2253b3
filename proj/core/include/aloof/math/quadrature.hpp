#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature in one and two
// dimensions.
//
// Infinite limits are mapped onto (0, 1] with x = a + (1 - t)/t (and the
// mirrored form for a lower infinite limit); a doubly infinite range folds
// f(x) + f(-x) onto the same map. Kronrod nodes are interior, so integrable
// endpoint singularities are never sampled.
//
// The engine repeatedly bisects the panel with the largest error estimate
// until the summed estimate meets max(absolute_tolerance, relative_tolerance
// * |value|). Panel contributions are summed in left-to-right order, so the
// result is bit-reproducible for a fixed configuration.

#include <cstddef>
#include <functional>
#include <limits>

namespace aloof::math {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadratureConfig {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-14;
    std::size_t max_subdivisions = 2000;
    /// Number of equal panels the range is split into before adapting.
    std::size_t initial_panels = 1;

    void validate() const;
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Integrate f over [a, b]; either limit may be infinite. Throws
/// ConvergenceError (carrying the best estimate) when max_subdivisions is
/// exhausted and EvaluationError when f returns a non-finite value.
QuadratureResult integrate_adaptive_1d(const std::function<double(double)>& f, double a,
                                       double b, const QuadratureConfig& cfg = {});

struct Interval {
    double lower;
    double upper;
};

/// Rectangle for the 2D engine: the outer variable x, the inner variable y.
/// Either axis may have an infinite upper limit.
struct Rectangle {
    Interval outer;
    Interval inner;
};

/// Nested adaptive integration of f(x, y) over a rectangle. The inner
/// integral is computed to a tenth of the outer tolerance; its error
/// estimates are integrated alongside the value and added to the outer
/// estimate. `inner_initial_panels` sets the minimum subdivision of the
/// inner axis, for integrands that oscillate along y.
QuadratureResult integrate_adaptive_2d(const std::function<double(double, double)>& f,
                                       const Rectangle& domain,
                                       const QuadratureConfig& cfg = {},
                                       std::size_t inner_initial_panels = 1);

} // namespace aloof::math
