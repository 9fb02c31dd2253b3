#pragma once

// Reference integrators for the tests. They deliberately share nothing with
// the library's Gauss-Kronrod engine: plain composite Simpson on explicit
// meshes, and a recursive adaptive Simpson with Richardson correction.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace oracle {

/// Composite Simpson with n (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2 != 0)
        ++n;
    const double h = (b - a) / static_cast<double>(n);
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double x = a + static_cast<double>(i) * h;
        (i % 2 ? odd : even) += f(x);
    }
    return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

namespace detail {
inline double adaptive_step(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw std::runtime_error("oracle adaptive Simpson: recursion limit");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

/// Recursive adaptive Simpson to an absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_depth = 60) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// E1(x) = e^-x int_0^inf e^-s / (x + s) ds, truncated at s = 60 where the
/// remaining tail is below e^-60 / x.
inline double e1(double x) {
    const auto f = [x](double s) { return std::exp(-s) / (x + s); };
    double sum = 0.0;
    // Split the range so the 1/(x+s) bend near s = 0 gets its own panels.
    const double edges[] = {0.0, 0.01, 0.1, 1.0, 5.0, 20.0, 60.0};
    for (std::size_t i = 0; i + 1 < std::size(edges); ++i)
        sum += adaptive_simpson(f, edges[i], edges[i + 1], 1e-16);
    return std::exp(-x) * sum;
}

/// Machnikowski geometric function, 1/2 int_R ln(1 + xi^2/4 u^2/(1+u^2))/(1+u^2) du.
/// Simpson on [0, 1e4] over log-graded blocks, then the tail beyond U,
/// where the integrand is ln(1 + a)/(1 + u^2) up to O(u^-4), closed-form.
inline double machnikowski_gamma(double xi) {
    const double a = xi * xi / 4.0;
    const auto f = [a](double u) {
        const double w = u * u / (1.0 + u * u);
        return std::log1p(a * w) / (1.0 + u * u);
    };
    const double blocks[] = {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0};
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(blocks); ++i)
        sum += simpson(f, blocks[i], blocks[i + 1], 20000);
    sum += std::log1p(a) * std::atan(1.0 / blocks[std::size(blocks) - 1]);
    return sum;  // the even integrand doubles the half line, the prefactor halves it
}

/// Machnikowski material function mu(zeta), written directly from its
/// defining integral and evaluated with Simpson after u = (1 - cos pi s)/2,
/// which crowds nodes into both endpoints.
inline double machnikowski_mu(double zeta) {
    const double pi = std::numbers::pi;
    const auto integrand = [zeta, pi](double u) {
        const double log_ratio = std::log1p(u) - std::log1p(-u);
        const double bracket =
            1.0 + zeta / (4.0 * pi * u * u) * (1.0 + (1.0 - u * u) / (2.0 * u) * log_ratio);
        return 1.0 / (u * u * u * bracket * bracket);
    };
    const auto g = [&](double s) {
        if (s <= 0.0 || s >= 1.0)
            return 0.0;  // Jacobian sin(pi s) vanishes, integrand is bounded
        const double u = 0.5 * (1.0 - std::cos(pi * s));
        return integrand(u) * 0.5 * pi * std::sin(pi * s);
    };
    return zeta * zeta / 4.0 * simpson(g, 0.0, 1.0, 400000);
}

} // namespace oracle
