#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

/**
 * The two estimators under study.
 *
 * MNI: beta = K^{-1} y, the minimum-RKHS-norm interpolant of the labels.
 * Leave-one-out values come from the shortcut
 *     y_i eta_{\i}(x_i) = 1 - y_i beta_i / (K^{-1})_{ii},
 * which equals the explicit n-fold refit for positive definite K.
 *
 * SVM: the hard-margin dual  max  y^T beta - (1/2) beta^T K beta  subject to
 * y_i beta_i >= 0, solved by projected coordinate ascent on alpha_i =
 * y_i beta_i with exact nonnegativity projection.
 */
namespace svplab {

class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& message, double condition_estimate)
      : std::runtime_error(message), condition_estimate(condition_estimate) {}
  double condition_estimate;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& message, double kkt_residual)
      : std::runtime_error(message), kkt_residual(kkt_residual) {}
  double kkt_residual;
};

struct MniSolution {
  Eigen::VectorXd beta;
  Eigen::VectorXd loo_margins;       // y_i eta_{\i}(x_i)
  Eigen::VectorXd inverse_diagonal;  // (K^{-1})_{ii}, positive for PD K
  double interpolation_residual = 0.0;
  double rcond = 0.0;
};

struct SvmSolution {
  Eigen::VectorXd beta;     // y_i beta_i >= 0
  Eigen::VectorXd margins;  // y_i eta(x_i)
  std::vector<int> support_set;
  double duality_gap = 0.0;
  double kkt_residual = 0.0;
  double tol = 0.0;
  long long sweeps = 0;
  bool converged = false;
};

/// Default SVM tolerance: 1e-9 * max_i K_ii.
double default_svm_tol(const Eigen::MatrixXd& K);

/**
 * Solves K beta = y by Cholesky factorization and computes LOO margins and
 * the inverse diagonal. Rejects non-PD or ill-conditioned K (estimated
 * condition number above 1e12) with a ConditioningError.
 */
MniSolution solve_mni(const Eigen::MatrixXd& K, const Eigen::VectorXd& y);

/**
 * Projected coordinate ascent with update
 *     alpha_i <- max(0, alpha_i + (1 - (Q alpha)_i) / Q_ii),
 * Q_ij = y_i y_j K_ij, warm-started from `warm_start` when given (pass the
 * sign-clipped MNI beta). Requires positive diagonal; positive semidefinite
 * K is accepted (the dual stays concave and coordinate ascent monotone).
 * max_iter counts full sweeps.
 *
 * Stopping is certificate-driven: the solution is declared converged only
 * when the KKT residual is <= tol AND the duality gap is <= tol * n, both
 * evaluated on margins re-accumulated in extended precision. The gap
 * condition matters on ill-scaled duals (sum(alpha) >> n), where a tol-level
 * KKT residual still leaves a large gap; when the sweeps alone cannot close
 * it, an extended-precision active-set Newton refinement finishes the job.
 * The returned coefficients are the double rounding of the certified
 * iterate. Throws ConvergenceError when the certificate is not reached
 * within max_iter sweeps plus the bounded refinement.
 */
SvmSolution solve_svm(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                      double tol, long long max_iter,
                      const std::optional<Eigen::VectorXd>& warm_start = {});

/// eta(x) = sum_i beta_i k(x_i, x), given the kernel row (k(x_i, x))_i.
double predict(const Eigen::VectorXd& beta, const Eigen::VectorXd& kernel_row);

}  // namespace svplab
