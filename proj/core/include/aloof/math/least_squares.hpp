#pragma once

// Damped (Levenberg-Marquardt) nonlinear least squares.

#include <Eigen/Dense>

#include <functional>

namespace aloof::math {

/// Evaluates weighted residuals r(p) (model minus data, already multiplied
/// by sqrt(weight)) and their Jacobian dr/dp.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residuals,
                       Eigen::MatrixXd& jacobian)>;

struct LevenbergMarquardtOptions {
    int max_iterations = 200;
    double initial_damping = 1e-3;
    /// Stop once the relative decrease of the residual sum of squares falls
    /// below this.
    double function_tolerance = 1e-14;
    /// ... or the step is this small relative to the parameters.
    double step_tolerance = 1e-12;
    /// Scale the covariance by chi^2 / dof (errors estimated from scatter).
    bool scale_covariance = true;
};

struct LevenbergMarquardtResult {
    Eigen::VectorXd params;
    /// Pseudo-inverse of J^T J (optionally scaled by chi^2/dof). Directions
    /// the data cannot constrain come out with zero variance; check
    /// `rank` against the parameter count.
    Eigen::MatrixXd covariance;
    double chi_squared = 0.0;
    int degrees_of_freedom = 0;
    int iterations = 0;
    int rank = 0;
    bool converged = false;
};

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& residuals,
                                             Eigen::VectorXd initial,
                                             const LevenbergMarquardtOptions& options = {});

} // namespace aloof::math
