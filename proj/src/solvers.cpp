#include "svplab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace svplab {

namespace {

void check_system(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                  const char* who) {
  if (K.rows() != K.cols())
    throw std::invalid_argument(std::string(who) + ": K must be square");
  if (K.rows() != y.size())
    throw std::invalid_argument(std::string(who) + ": K and y sizes disagree");
  if (K.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": empty system");
}

void check_labels(const Eigen::VectorXd& y, const char* who) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 1.0 && y(i) != -1.0)
      throw std::invalid_argument(std::string(who) +
                                  ": labels must be exactly +1 or -1");
}

}  // namespace

double default_svm_tol(const Eigen::MatrixXd& K) {
  if (K.rows() == 0 || K.rows() != K.cols())
    throw std::invalid_argument("default_svm_tol: K must be square, nonempty");
  return 1e-9 * K.diagonal().maxCoeff();
}

MniSolution solve_mni(const Eigen::MatrixXd& K, const Eigen::VectorXd& y) {
  check_system(K, y, "solve_mni");
  check_labels(y, "solve_mni");
  const Eigen::Index n = K.rows();

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw ConditioningError("solve_mni: K is not positive definite",
                            std::numeric_limits<double>::infinity());
  const double rcond = llt.rcond();
  if (!(rcond > 1e-12))
    throw ConditioningError("solve_mni: K condition number above 1e12",
                            rcond > 0.0
                                ? 1.0 / rcond
                                : std::numeric_limits<double>::infinity());

  MniSolution out;
  out.rcond = rcond;
  out.beta = llt.solve(y);
  out.interpolation_residual = (K * out.beta - y).lpNorm<Eigen::Infinity>();

  const Eigen::MatrixXd inverse =
      llt.solve(Eigen::MatrixXd::Identity(n, n));
  out.inverse_diagonal = inverse.diagonal();

  out.loo_margins.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dii = out.inverse_diagonal(i);
    if (!(dii > 0.0))
      throw ConditioningError(
          "solve_mni: nonpositive inverse diagonal despite Cholesky success",
          1.0 / rcond);
    out.loo_margins(i) = 1.0 - y(i) * out.beta(i) / dii;
  }
  return out;
}

SvmSolution solve_svm(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                      double tol, long long max_iter,
                      const std::optional<Eigen::VectorXd>& warm_start) {
  check_system(K, y, "solve_svm");
  check_labels(y, "solve_svm");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_svm: tol must be > 0");
  if (max_iter < 1)
    throw std::invalid_argument("solve_svm: max_iter must be >= 1");
  const Eigen::Index n = K.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(K(i, i) > 0.0))
      throw std::invalid_argument("solve_svm: K diagonal must be positive");

  // Q = (y y^T) .* K keeps every coordinate update a O(n) gather.
  Eigen::MatrixXd Q(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) Q(i, j) = y(i) * y(j) * K(i, j);

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  if (warm_start) {
    if (warm_start->size() != n)
      throw std::invalid_argument("solve_svm: warm start size mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
      alpha(i) = std::max(0.0, y(i) * (*warm_start)(i));
  }

  Eigen::VectorXd g = Q * alpha;  // g_i = y_i eta(x_i), the margins
  double kkt = std::numeric_limits<double>::infinity();
  long long sweeps = 0;
  bool reached_kkt = false;

  while (sweeps < max_iter) {
    ++sweeps;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double candidate = alpha(i) + (1.0 - g(i)) / Q(i, i);
      const double clipped = std::max(0.0, candidate);
      const double delta = clipped - alpha(i);
      if (delta != 0.0) {
        alpha(i) = clipped;
        g.noalias() += delta * Q.col(i);
      }
    }
    // Incremental margin updates drift over long runs; refresh periodically
    // and always before declaring victory.
    if (sweeps % 256 == 0) g.noalias() = Q * alpha;

    kkt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double slack = 1.0 - g(i);
      kkt = std::max(kkt, alpha(i) > 0.0 ? std::abs(slack)
                                         : std::max(0.0, slack));
    }
    if (kkt <= tol) {
      g.noalias() = Q * alpha;
      kkt = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double slack = 1.0 - g(i);
        kkt = std::max(kkt, alpha(i) > 0.0 ? std::abs(slack)
                                           : std::max(0.0, slack));
      }
      if (kkt <= tol) {
        reached_kkt = true;
        break;
      }
    }
  }
  if (!reached_kkt)
    throw ConvergenceError("solve_svm: KKT residual did not reach tol", kkt);

  /**
   * Certification stage. A tol-level KKT residual does not control the
   * duality gap when sum(alpha) is much larger than n: the gap at such an
   * iterate is roughly (KKT residual) * sum(alpha), so the gap target
   * tol * n can demand a residual far below what coordinate ascent reaches
   * in any reasonable budget (its asymptotic rate degrades with the
   * conditioning of the support block). The endgame is therefore an
   * active-set Newton refinement carried out in extended precision: solve
   * the equality system Q_SS alpha_S = 1 on the working support with a
   * Cholesky factorization plus iterative refinement, drop coordinates that
   * turn nonpositive, grow the set when an outside margin dips below one,
   * and accept only when the recomputed KKT residual is <= tol and the
   * duality gap is <= tol * n. Any principal submatrix of the positive
   * definite Q is positive definite with a condition number no larger than
   * Q's, so the extended-precision factorization has ample headroom.
   */
  using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

  VectorXld alpha_ext = alpha.cast<long double>();
  const MatrixXld Q_ext = Q.cast<long double>();
  VectorXld margins_ext = Q_ext * alpha_ext;

  // KKT residual and duality gap at the current extended iterate.
  const auto certificate = [&](long double& kkt_ext, long double& gap_ext) {
    kkt_ext = 0.0L;
    long double quad = 0.0L;
    long double sum_alpha = 0.0L;
    long double min_margin = std::numeric_limits<long double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const long double margin = margins_ext(i);
      const long double slack = 1.0L - margin;
      if (alpha_ext(i) > 0.0L)
        kkt_ext = std::max(kkt_ext, slack < 0.0L ? -slack : slack);
      else if (slack > 0.0L)
        kkt_ext = std::max(kkt_ext, slack);
      quad += alpha_ext(i) * margin;
      sum_alpha += alpha_ext(i);
      min_margin = std::min(min_margin, margin);
    }
    const long double dual = sum_alpha - 0.5L * quad;
    gap_ext = min_margin > 0.0L
                  ? 0.5L * quad / (min_margin * min_margin) - dual
                  : std::numeric_limits<long double>::infinity();
  };

  const double gap_tol = tol * static_cast<double>(n);
  long double kkt_ext = 0.0L;
  long double gap_ext = 0.0L;
  certificate(kkt_ext, gap_ext);
  bool converged = static_cast<double>(kkt_ext) <= tol &&
                   static_cast<double>(gap_ext) <= gap_tol;

  if (!converged) {
    std::vector<char> active(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      active[static_cast<std::size_t>(i)] = alpha_ext(i) > 0.0L ? 1 : 0;
    const int round_budget = 32;
    for (int round = 0; round < round_budget && !converged; ++round) {
      std::vector<Eigen::Index> support;
      for (Eigen::Index i = 0; i < n; ++i)
        if (active[static_cast<std::size_t>(i)]) support.push_back(i);
      if (support.empty()) break;

      const Eigen::Index m = static_cast<Eigen::Index>(support.size());
      MatrixXld block(m, m);
      for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
          block(a, b) = Q_ext(support[static_cast<std::size_t>(a)],
                              support[static_cast<std::size_t>(b)]);
      Eigen::LLT<MatrixXld> llt(block);
      if (llt.info() != Eigen::Success) break;
      VectorXld sub = llt.solve(VectorXld::Ones(m));
      for (int refine = 0; refine < 2; ++refine) {
        const VectorXld residual = VectorXld::Ones(m) - block * sub;
        sub += llt.solve(residual);
      }

      bool dropped = false;
      for (Eigen::Index a = 0; a < m; ++a)
        if (sub(a) <= 0.0L) {
          active[static_cast<std::size_t>(
              support[static_cast<std::size_t>(a)])] = 0;
          dropped = true;
        }
      if (dropped) continue;

      alpha_ext.setZero();
      for (Eigen::Index a = 0; a < m; ++a)
        alpha_ext(support[static_cast<std::size_t>(a)]) = sub(a);
      margins_ext = Q_ext * alpha_ext;

      bool grew = false;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!active[static_cast<std::size_t>(i)] && margins_ext(i) < 1.0L) {
          active[static_cast<std::size_t>(i)] = 1;
          grew = true;
        }
      if (grew) continue;

      certificate(kkt_ext, gap_ext);
      converged = static_cast<double>(kkt_ext) <= tol &&
                  static_cast<double>(gap_ext) <= gap_tol;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError(
        "solve_svm: duality gap certificate did not reach tol * n",
        static_cast<double>(kkt_ext));

  // The certificate holds at the extended-precision iterate; the returned
  // coefficients are its double rounding (within one ulp per coordinate).
  SvmSolution out;
  out.tol = tol;
  out.sweeps = sweeps;
  out.converged = true;
  out.kkt_residual = static_cast<double>(kkt_ext);
  out.beta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.beta(i) = y(i) * static_cast<double>(alpha_ext(i));
  out.margins.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.margins(i) = static_cast<double>(margins_ext(i));
  for (Eigen::Index i = 0; i < n; ++i)
    if (alpha_ext(i) > 0.0L) out.support_set.push_back(static_cast<int>(i));

  out.duality_gap = static_cast<double>(gap_ext);
  return out;
}

double predict(const Eigen::VectorXd& beta, const Eigen::VectorXd& kernel_row) {
  if (beta.size() != kernel_row.size())
    throw std::invalid_argument("predict: size mismatch");
  return beta.dot(kernel_row);
}

}  // namespace svplab
