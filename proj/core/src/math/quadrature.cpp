#include "aloof/math/quadrature.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace aloof::math {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// A sample carries an integrand value and (for nested integrals) the error
// already committed in computing it.
struct Sample {
    double value;
    double error;
};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct PanelLess {
    bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

template <class F>
Panel gauss_kronrod(const F& f, double a, double b, std::size_t& evaluations) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const Sample fc = f(centre);
    double resk = fc.value * wgk[7];
    double resg = fc.value * wg[3];
    double inner_err = fc.error * wgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[static_cast<std::size_t>(j)];
        const Sample lo = f(centre - dx);
        const Sample hi = f(centre + dx);
        f1[static_cast<std::size_t>(j)] = lo.value;
        f2[static_cast<std::size_t>(j)] = hi.value;
        const double w = wgk[static_cast<std::size_t>(j)];
        resk += w * (lo.value + hi.value);
        resabs += w * (std::abs(lo.value) + std::abs(hi.value));
        inner_err += w * (lo.error + hi.error);
        if (j % 2 == 1)
            resg += wg[static_cast<std::size_t>(j / 2)] * (lo.value + hi.value);
    }
    evaluations += 15;
    const double mean = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc.value - mean);
    for (std::size_t j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double ahalf = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= ahalf;
    resabs *= ahalf;
    // QUADPACK error scaling: pessimistic for rough panels, optimistic once
    // the Kronrod/Gauss difference is resolved.
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return Panel{a, b, resk * half, err + inner_err * ahalf};
}

template <class F>
QuadratureResult adaptive(const F& f, double a, double b, const QuadratureConfig& cfg) {
    std::size_t evaluations = 0;
    std::priority_queue<Panel, std::vector<Panel>, PanelLess> heap;
    const std::size_t n0 = std::max<std::size_t>(1, cfg.initial_panels);
    const double width = (b - a) / static_cast<double>(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == n0) ? b : a + width * static_cast<double>(i + 1);
        heap.push(gauss_kronrod(f, lo, hi, evaluations));
    }

    auto totals = [&heap]() {
        // Sum in position order for reproducibility.
        std::vector<Panel> panels;
        auto copy = heap;
        panels.reserve(copy.size());
        while (!copy.empty()) {
            panels.push_back(copy.top());
            copy.pop();
        }
        std::sort(panels.begin(), panels.end(),
                  [](const Panel& l, const Panel& r) { return l.a < r.a; });
        double value = 0.0, error = 0.0;
        for (const auto& p : panels) {
            value += p.value;
            error += p.error;
        }
        return std::pair{value, error};
    };

    double value = 0.0, error = 0.0;
    {
        auto [v, e] = totals();
        value = v;
        error = e;
    }
    std::size_t subdivisions = n0;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (error > std::max(cfg.absolute_tolerance, cfg.relative_tolerance * std::abs(value))) {
        if (subdivisions >= cfg.max_subdivisions)
            throw ConvergenceError(
                fmt::format("adaptive quadrature did not converge in {} subdivisions "
                            "(estimate {}, error {})",
                            subdivisions, value, error),
                value, error);
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)
            || std::abs(worst.b - worst.a) <= 4.0 * eps * std::max(std::abs(mid), 1e-300))
            throw ConvergenceError(
                fmt::format("adaptive quadrature hit roundoff near x = {} (estimate {}, error {})",
                            mid, value, error),
                value, error);
        heap.pop();
        const Panel left = gauss_kronrod(f, worst.a, mid, evaluations);
        const Panel right = gauss_kronrod(f, mid, worst.b, evaluations);
        heap.push(left);
        heap.push(right);
        ++subdivisions;
        // Incremental update; exact totals are recomputed at the end.
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
    }
    auto [v, e] = totals();
    return QuadratureResult{v, e, evaluations};
}

double checked(double v, double x) {
    if (!std::isfinite(v))
        throw EvaluationError(fmt::format("integrand returned {} at x = {}", v, x));
    return v;
}

// Maps any (a, b) to a finite range and returns the transformed integrand.
template <class G>
QuadratureResult dispatch(const G& g, double a, double b, const QuadratureConfig& cfg) {
    const bool a_inf = std::isinf(a);
    const bool b_inf = std::isinf(b);
    if (!a_inf && !b_inf)
        return adaptive([&](double x) { return g(x); }, a, b, cfg);
    if (!a_inf && b_inf && b > 0) {
        // x = a + (1 - t)/t, dx = dt / t^2
        return adaptive(
            [&](double t) {
                const Sample s = g(a + (1.0 - t) / t);
                const double j = 1.0 / (t * t);
                return Sample{s.value * j, s.error * j};
            },
            0.0, 1.0, cfg);
    }
    if (a_inf && a < 0 && !b_inf) {
        return adaptive(
            [&](double t) {
                const Sample s = g(b - (1.0 - t) / t);
                const double j = 1.0 / (t * t);
                return Sample{s.value * j, s.error * j};
            },
            0.0, 1.0, cfg);
    }
    if (a_inf && b_inf && a < 0 && b > 0) {
        return adaptive(
            [&](double t) {
                const double x = (1.0 - t) / t;
                const Sample p = g(x);
                const Sample m = g(-x);
                const double j = 1.0 / (t * t);
                return Sample{(p.value + m.value) * j, (p.error + m.error) * j};
            },
            0.0, 1.0, cfg);
    }
    throw DomainError(fmt::format("invalid integration range [{}, {}]", a, b));
}

void check_range(double a, double b) {
    if (std::isnan(a) || std::isnan(b) || !(a < b))
        throw DomainError(fmt::format("integration range requires a < b, got [{}, {}]", a, b));
}

} // namespace

void QuadratureConfig::validate() const {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (max_subdivisions < 1 || initial_panels < 1)
        throw DomainError("quadrature subdivision counts must be >= 1");
}

QuadratureResult integrate_adaptive_1d(const std::function<double(double)>& f, double a,
                                       double b, const QuadratureConfig& cfg) {
    cfg.validate();
    check_range(a, b);
    return dispatch([&](double x) { return Sample{checked(f(x), x), 0.0}; }, a, b, cfg);
}

QuadratureResult integrate_adaptive_2d(const std::function<double(double, double)>& f,
                                       const Rectangle& domain, const QuadratureConfig& cfg,
                                       std::size_t inner_initial_panels) {
    cfg.validate();
    check_range(domain.outer.lower, domain.outer.upper);
    check_range(domain.inner.lower, domain.inner.upper);

    const double outer_width = std::isinf(domain.outer.upper)
        ? 1.0
        : domain.outer.upper - domain.outer.lower;
    QuadratureConfig inner_cfg = cfg;
    inner_cfg.relative_tolerance = 0.1 * cfg.relative_tolerance;
    inner_cfg.absolute_tolerance = 0.1 * cfg.absolute_tolerance / std::max(outer_width, 1.0);
    inner_cfg.initial_panels = std::max<std::size_t>(1, inner_initial_panels);

    std::size_t inner_evaluations = 0;
    bool inner_failed = false;
    auto outer = [&](double x) -> Sample {
        auto g = [&](double y) { return Sample{checked(f(x, y), y), 0.0}; };
        try {
            const auto r = dispatch(g, domain.inner.lower, domain.inner.upper, inner_cfg);
            inner_evaluations += r.evaluations;
            return Sample{r.value, r.error_estimate};
        } catch (const ConvergenceError& e) {
            inner_failed = true;
            return Sample{e.best_estimate(), e.error_estimate()};
        }
    };
    auto result = dispatch(outer, domain.outer.lower, domain.outer.upper, cfg);
    result.evaluations = inner_evaluations;
    if (inner_failed
        && result.error_estimate
            > std::max(cfg.absolute_tolerance, cfg.relative_tolerance * std::abs(result.value)))
        throw ConvergenceError("inner quadrature did not converge", result.value,
                               result.error_estimate);
    return result;
}

} // namespace aloof::math
