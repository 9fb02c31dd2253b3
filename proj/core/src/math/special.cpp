#include "aloof/math/special.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace aloof::math {

namespace {
constexpr double euler_gamma = 0.577215664901532860606512090082402431;
constexpr double eps = std::numeric_limits<double>::epsilon();
} // namespace

namespace detail {

double e1_series(double x) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= -x / k;
        const double contribution = term / k;
        sum += contribution;
        if (std::abs(contribution) < eps * std::abs(sum))
            break;
    }
    return -euler_gamma - std::log(x) - sum;
}

double e1_continued_fraction(double x) {
    // E1(x) = e^-x / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...))), modified Lentz.
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < eps)
            return h * std::exp(-x);
    }
    throw ConvergenceError(fmt::format("E1 continued fraction did not converge at x = {}", x),
                           h * std::exp(-x), std::abs(h * std::exp(-x)));
}

} // namespace detail

double exp_integral_e1(double x) {
    if (std::isnan(x) || !(x > 0.0))
        throw DomainError(fmt::format("E1 requires a positive argument, got {}", x));
    if (std::isinf(x))
        return 0.0;
    return x <= detail::e1_switch_point ? detail::e1_series(x)
                                        : detail::e1_continued_fraction(x);
}

double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

double sinc_derivative(double x) {
    if (std::abs(x) < 1e-4)
        return -x / 3.0 * (1.0 - x * x / 10.0);
    return (std::cos(x) - std::sin(x) / x) / x;
}

} // namespace aloof::math
