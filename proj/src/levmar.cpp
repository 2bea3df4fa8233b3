#include "hfspec/levmar.hpp"

#include <cmath>
#include <limits>

#include "hfspec/errors.hpp"

namespace hfspec {

namespace {

Eigen::MatrixXd jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& p, const Eigen::VectorXd& r0,
                         double rel_step) {
  Eigen::MatrixXd j(r0.size(), p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    Eigen::VectorXd q = p;
    const double h = rel_step * std::max(std::abs(p(k)), 1e-3);
    q(k) += h;
    const double actual = q(k) - p(k);
    j.col(k) = (problem.residuals(q) - r0) / actual;
  }
  return j;
}

}  // namespace

LmResult levenberg_marquardt(const LeastSquaresProblem& problem, const Eigen::VectorXd& initial,
                             const LmOptions& options) {
  Eigen::VectorXd p = initial;
  if (problem.project) problem.project(p);
  Eigen::VectorXd r = problem.residuals(p);
  if (!r.allFinite()) throw DomainError("residuals are not finite at the initial guess");
  double cost = r.squaredNorm();

  LmResult result;
  result.initial_cost = cost;
  result.n_residuals = static_cast<int>(r.size());
  double mu = options.initial_damping;
  Eigen::MatrixXd jac = jacobian(problem, p, r, options.jacobian_step);

  int it = 0;
  bool converged = false;
  while (it < options.max_iterations) {
    ++it;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-30);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += mu * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      Eigen::VectorXd trial = p + step;
      if (problem.project) problem.project(trial);
      const Eigen::VectorXd rt = problem.residuals(trial);
      const double trial_cost = rt.allFinite() ? rt.squaredNorm() : std::numeric_limits<double>::infinity();
      if (trial_cost <= cost) {
        const double change = (cost - trial_cost) / std::max(cost, 1e-300);
        p = std::move(trial);
        r = rt;
        cost = trial_cost;
        mu = std::max(mu / 10.0, 1e-12);
        accepted = true;
        if (change < options.relative_tolerance) converged = true;
      } else {
        mu *= 10.0;
        // No descent direction left at this damping: the point is a minimum to
        // working precision.
        if (mu > 1e16) {
          converged = true;
          break;
        }
      }
    }
    if (converged || cost == 0.0) {
      converged = true;
      break;
    }
    jac = jacobian(problem, p, r, options.jacobian_step);
  }

  result.params = p;
  result.cost = cost;
  result.iterations = it;
  result.converged = converged;

  jac = jacobian(problem, p, r, options.jacobian_step);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const Eigen::Index m = r.size();
  const Eigen::Index n = p.size();
  const double variance = m > n ? cost / static_cast<double>(m - n) : 0.0;
  const Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * variance;
  result.std_errs = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return result;
}

}  // namespace hfspec
