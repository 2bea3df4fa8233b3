#pragma once

// Damped nonlinear least squares with forward-difference Jacobians.

#include <functional>

#include <Eigen/Dense>

namespace hfspec {

struct LeastSquaresProblem {
  // Residual vector r(p); the optimizer minimizes |r|^2.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residuals;
  // Optional projection applied after every step (bounds, sign conventions).
  std::function<void(Eigen::VectorXd&)> project;
};

struct LmOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
  double jacobian_step = 1e-6;
  double initial_damping = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd std_errs;
  double cost = 0.0;          // sum of squared residuals at params
  double initial_cost = 0.0;
  int n_residuals = 0;
  int iterations = 0;
  bool converged = false;
};

LmResult levenberg_marquardt(const LeastSquaresProblem& problem, const Eigen::VectorXd& initial,
                             const LmOptions& options = {});

}  // namespace hfspec
