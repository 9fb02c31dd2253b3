#include "aloof/math/least_squares.hpp"

#include "aloof/errors.hpp"

#include <algorithm>
#include <cmath>

namespace aloof::math {

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& residuals,
                                             Eigen::VectorXd initial,
                                             const LevenbergMarquardtOptions& options) {
    const Eigen::Index n = initial.size();
    Eigen::VectorXd p = std::move(initial);
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    residuals(p, r, J);
    if (!r.allFinite() || !J.allFinite())
        throw EvaluationError("non-finite residuals at the initial parameters");
    const Eigen::Index m = r.size();
    if (m < n)
        throw DomainError("least squares needs at least as many residuals as parameters");

    double sse = r.squaredNorm();
    double lambda = options.initial_damping;
    LevenbergMarquardtResult out;

    Eigen::VectorXd r_trial;
    Eigen::MatrixXd J_trial;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-300 || sse == 0.0) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd diag = A.diagonal();
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(diag[i] > 0.0))
                diag[i] = 1.0;

        bool accepted = false;
        Eigen::VectorXd step;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd damped = A;
            damped.diagonal() += lambda * diag;
            step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = p + step;
            residuals(trial, r_trial, J_trial);
            const double sse_trial = r_trial.allFinite() ? r_trial.squaredNorm()
                                                         : std::numeric_limits<double>::infinity();
            if (sse_trial <= sse) {
                const double decrease = sse - sse_trial;
                p = trial;
                r.swap(r_trial);
                J.swap(J_trial);
                const double old = sse;
                sse = sse_trial;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                const bool small_step = step.norm()
                    <= options.step_tolerance * (p.norm() + options.step_tolerance);
                const bool small_decrease = decrease <= options.function_tolerance * old;
                if (small_step || small_decrease) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No downhill step exists at any damping: a (numerical) minimum.
            out.converged = true;
            break;
        }
        if (out.converged) {
            ++it;
            break;
        }
    }

    out.params = p;
    out.iterations = it;
    out.chi_squared = sse;
    out.degrees_of_freedom = static_cast<int>(m - n);
    // Equilibrate before the pseudo-inverse so the rank threshold is not
    // fooled by parameters of very different magnitude.
    const Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i)
        scale[i] = A(i, i) > 0.0 ? 1.0 / std::sqrt(A(i, i)) : 0.0;
    const Eigen::MatrixXd As = scale.asDiagonal() * A * scale.asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(As);
    cod.setThreshold(1e-10);
    out.rank = static_cast<int>(cod.rank());
    out.covariance = scale.asDiagonal() * cod.pseudoInverse() * scale.asDiagonal();
    if (options.scale_covariance && out.degrees_of_freedom > 0)
        out.covariance *= sse / out.degrees_of_freedom;
    return out;
}

} // namespace aloof::math
