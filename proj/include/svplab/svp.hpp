#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "svplab/solvers.hpp"

/**
 * Support-vector proliferation detection.
 *
 * Three equivalent characterizations for positive definite K:
 *   1. every training point is a support vector (SVM solution has full
 *      support, equivalently SVM beta equals MNI beta);
 *   2. sign(z_i) = y_i with z = K^{-1} y, i.e. min_i y_i beta_i > 0;
 *   3. y_i eta_{\i}(x_i) < 1 for all i.
 * 2 and 3 are related through y_i eta_{\i}(x_i) = 1 - y_i beta_i/(K^{-1})_{ii}
 * with (K^{-1})_{ii} > 0, so both are evaluated from the sign of y_i beta_i
 * and agree exactly; any disagreement outside the indeterminacy band is an
 * invariant violation, not a tolerance issue.
 */
namespace svplab {

struct SvpVerdict {
  bool svp = false;
  Eigen::VectorXd sign_margins;  // y_i beta_i
  Eigen::VectorXd loo_margins;   // y_i eta_{\i}(x_i)
  double min_sign_margin = 0.0;
  double max_loo_margin = 0.0;
  bool indeterminate = false;
  std::vector<int> indeterminate_indices;  // |y_i beta_i| <= tau * ||beta||_inf
  std::optional<bool> solver_agreement;
};

inline constexpr double kDefaultTau = 1e-10;

/// Evaluates conditions 2 and 3 and their agreement.
SvpVerdict detect_svp(const MniSolution& mni, const Eigen::VectorXd& y,
                      double tau = kDefaultTau);

/**
 * Condition-1 cross-check: under SVP the converged SVM coefficients must
 * equal the MNI coefficients within rel_tol; without SVP some SVM
 * coefficient must vanish. Records the outcome in the verdict.
 */
bool cross_check_solver(SvpVerdict& verdict, const SvmSolution& svm,
                        const MniSolution& mni, double rel_tol);

}  // namespace svplab
