#pragma once

namespace aloof::math {

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt for x > 0.
///
/// Power series for x <= 1, modified-Lentz continued fraction above; both
/// branches are accurate to ~1e-15 relative on their own side of the switch
/// and agree to better than 1e-12 on [0.5, 5].
double exp_integral_e1(double x);

/// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// d/dx sinc(x).
double sinc_derivative(double x);

namespace detail {
inline constexpr double e1_switch_point = 1.0;
double e1_series(double x);
double e1_continued_fraction(double x);
} // namespace detail

} // namespace aloof::math
