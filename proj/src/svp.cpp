#include "svplab/svp.hpp"

#include <cmath>
#include <stdexcept>

namespace svplab {

SvpVerdict detect_svp(const MniSolution& mni, const Eigen::VectorXd& y,
                      double tau) {
  const Eigen::Index n = mni.beta.size();
  if (n == 0) throw std::invalid_argument("detect_svp: empty solution");
  if (y.size() != n)
    throw std::invalid_argument("detect_svp: label size mismatch");
  if (mni.loo_margins.size() != n || mni.inverse_diagonal.size() != n)
    throw std::invalid_argument("detect_svp: incomplete solution");
  if (!(tau >= 0.0)) throw std::invalid_argument("detect_svp: negative tau");

  SvpVerdict verdict;
  verdict.sign_margins.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    verdict.sign_margins(i) = y(i) * mni.beta(i);
  verdict.loo_margins = mni.loo_margins;
  verdict.min_sign_margin = verdict.sign_margins.minCoeff();
  verdict.max_loo_margin = verdict.loo_margins.maxCoeff();

  const double band = tau * mni.beta.lpNorm<Eigen::Infinity>();
  bool all_positive = true;   // condition 2 over determinate coordinates
  bool all_below_one = true;  // condition 3 over determinate coordinates
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(verdict.sign_margins(i)) <= band) {
      verdict.indeterminate = true;
      verdict.indeterminate_indices.push_back(static_cast<int>(i));
      continue;
    }
    const bool positive = verdict.sign_margins(i) > 0.0;
    const bool below_one = verdict.loo_margins(i) < 1.0;
    if (positive != below_one)
      throw std::logic_error(
          "detect_svp: sign and leave-one-out conditions disagree outside "
          "the indeterminacy band");
    all_positive = all_positive && positive;
    all_below_one = all_below_one && below_one;
  }
  verdict.svp = !verdict.indeterminate && all_positive && all_below_one;
  return verdict;
}

bool cross_check_solver(SvpVerdict& verdict, const SvmSolution& svm,
                        const MniSolution& mni, double rel_tol) {
  const Eigen::Index n = mni.beta.size();
  if (svm.beta.size() != n)
    throw std::invalid_argument("cross_check_solver: size mismatch");
  if (!(rel_tol > 0.0))
    throw std::invalid_argument("cross_check_solver: rel_tol must be > 0");

  bool agrees;
  if (verdict.svp) {
    const double scale = std::max(mni.beta.lpNorm<Eigen::Infinity>(),
                                  svm.beta.lpNorm<Eigen::Infinity>());
    const double gap = (svm.beta - mni.beta).lpNorm<Eigen::Infinity>();
    agrees = gap <= rel_tol * std::max(scale, 1e-300);
  } else {
    // Some point must sit strictly outside the SVM support set.
    agrees = static_cast<Eigen::Index>(svm.support_set.size()) < n;
  }
  verdict.solver_agreement = agrees;
  return agrees;
}

}  // namespace svplab
