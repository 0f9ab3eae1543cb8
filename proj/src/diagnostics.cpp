#include "svplab/diagnostics.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "svplab/rng.hpp"
#include "svplab/solvers.hpp"

namespace svplab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// S-bar eta*(x) for a Fourier target: every frequency keeps the survival
/// factor of eigenvalue index |ell| (zero frequency shares index 1), matching
/// the grid maximization in idealized_bias_sup.
double survived_target_at(const SurvivalProfile& profile,
                          const TargetFunction& target, double x) {
  const int support = target.support_half();
  std::complex<double> survived = 0.0;
  for (int ell = 0; ell <= support; ++ell) {
    const std::size_t idx = static_cast<std::size_t>(
        std::min<int>(ell == 0 ? 0 : ell - 1,
                      static_cast<int>(profile.survival.size()) - 1));
    const double s = profile.survival[idx];
    const std::complex<double> phase(std::cos(kTwoPi * ell * x),
                                     std::sin(kTwoPi * ell * x));
    const double weight = ell == 0 ? 1.0 : 2.0;
    survived += weight * s * target.fourier_coeff[static_cast<std::size_t>(ell)] *
                phase;
  }
  return survived.real();
}

/// Sub-Gaussian analog evaluated on stored feature column j of V_G.
double survived_target_at_column(const SurvivalProfile& profile,
                                 const TargetFunction& target,
                                 const Eigen::MatrixXcd& V_G, Eigen::Index j) {
  double survived = 0.0;
  for (std::size_t k = 0; k < target.subgaussian_coeff.size(); ++k) {
    survived += profile.survival[k] * target.subgaussian_coeff[k] *
                V_G(static_cast<Eigen::Index>(k), j).real();
  }
  return survived;
}

}  // namespace

TheoremTerms theorem_terms(double b, double ratio, double c, int n,
                           long long p, double lambda_residual,
                           double alpha_L) {
  if (!(b > 0.0)) throw std::domain_error("theorem_terms: b must be positive");
  if (n < 2) throw std::invalid_argument("theorem_terms: n must be >= 2");
  if (p < 1) throw std::invalid_argument("theorem_terms: p must be >= 1");
  if (!(alpha_L > 0.0))
    throw std::domain_error("theorem_terms: alpha_L must be positive");
  if (lambda_residual < 0.0)
    throw std::invalid_argument("theorem_terms: negative residual eigenvalue");

  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  const double logn = std::log(nn);

  TheoremTerms terms;
  terms.bos_interpolation = std::sqrt(pp * logn / nn) / b;
  terms.bos_ratio_term = ratio * (std::sqrt(logn) / b + std::sqrt(nn));
  terms.bos_covariance = c * c * std::sqrt(pp);
  terms.bos_sum =
      terms.bos_interpolation + terms.bos_ratio_term + terms.bos_covariance;

  terms.subg_interpolation = terms.bos_interpolation;
  terms.subg_ratio_term = ratio * std::sqrt(logn) / b;
  terms.subg_residual = std::sqrt(lambda_residual * nn * logn / alpha_L);
  terms.subg_covariance = c * std::sqrt(logn);
  terms.subg_sum = terms.subg_interpolation + terms.subg_ratio_term +
                   terms.subg_residual + terms.subg_covariance;
  return terms;
}

DiagnosticsReport measure_assumption1(const GramDecomposition& gram,
                                      const SpectrumModel& model,
                                      const TargetFunction& target,
                                      int grid_size) {
  const Eigen::Index n = gram.K.rows();
  if (n < 2) throw std::invalid_argument("measure_assumption1: need n >= 2");
  if (gram.K_R.rows() != n || gram.V_G.cols() != n)
    throw std::invalid_argument("measure_assumption1: inconsistent Gram split");

  DiagnosticsReport report;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> residual_eigs(
      gram.K_R, Eigen::EigenvaluesOnly);
  if (residual_eigs.info() != Eigen::Success)
    throw std::runtime_error("measure_assumption1: residual eigensolve failed");
  report.alpha_L = residual_eigs.eigenvalues().minCoeff();
  report.alpha_U = residual_eigs.eigenvalues().maxCoeff();
  if (!(report.alpha_L > 0.0))
    throw std::domain_error(
        "measure_assumption1: residual Gram is rank deficient");
  report.ratio =
      (report.alpha_U - report.alpha_L) / (report.alpha_U + report.alpha_L);
  report.alpha_bar =
      2.0 * report.alpha_L * report.alpha_U / (report.alpha_L + report.alpha_U);

  // c: worst case over the n leave-one-out favored-feature covariances,
  // each a rank-one downdate of M = V_G V_G^*.
  const Eigen::Index g_dim = gram.V_G.rows();
  const Eigen::MatrixXcd M = gram.V_G * gram.V_G.adjoint();
  const Eigen::MatrixXcd identity_scaled =
      static_cast<double>(n) * Eigen::MatrixXcd::Identity(g_dim, g_dim);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXcd Mi =
        M - gram.V_G.col(i) * gram.V_G.col(i).adjoint() - identity_scaled;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigs(Mi,
                                                         Eigen::EigenvaluesOnly);
    if (eigs.info() != Eigen::Success)
      throw std::runtime_error("measure_assumption1: covariance eigensolve failed");
    const double spectral =
        std::max(std::abs(eigs.eigenvalues().minCoeff()),
                 std::abs(eigs.eigenvalues().maxCoeff()));
    worst = std::max(worst, (2.0 / static_cast<double>(n)) * spectral);
  }
  report.c = report.ratio + worst;

  const SurvivalProfile profile =
      survival_profile(model, report.alpha_bar, static_cast<int>(n));
  if (target.family == FeatureFamily::fourier) {
    const BiasSupResult sup = idealized_bias_sup(profile, target, grid_size);
    report.b = sup.b;
    report.survived_sup = sup.survived_sup;
  } else {
    if (target.subgaussian_coeff.size() >
        static_cast<std::size_t>(std::min<Eigen::Index>(
            g_dim, static_cast<Eigen::Index>(profile.survival.size()))))
      throw std::invalid_argument(
          "measure_assumption1: target support exceeds the leading subspace");
    // No closed-form sup exists for random features; use the realized sample.
    for (Eigen::Index j = 0; j < n; ++j) {
      double survived = 0.0;
      double biased = 0.0;
      for (std::size_t k = 0; k < target.subgaussian_coeff.size(); ++k) {
        const double term = target.subgaussian_coeff[k] *
                            gram.V_G(static_cast<Eigen::Index>(k), j).real();
        survived += profile.survival[k] * term;
        biased += profile.bias[k] * term;
      }
      report.b = std::max(report.b, std::abs(biased));
      report.survived_sup = std::max(report.survived_sup, std::abs(survived));
    }
  }
  report.b_bound_flagged = !(report.b <= 1.0 - report.survived_sup);

  const double lambda_residual = model.two_level()
                                     ? model.lambda_residual
                                     : model.eigenvalue(model.p + 1);
  report.terms = theorem_terms(report.b, report.ratio, report.c,
                               static_cast<int>(n), g_dim, lambda_residual,
                               report.alpha_L);
  return report;
}

void measure_abc(const GramDecomposition& gram, const LabeledSample& sample,
                 const SurvivalProfile& profile, const TargetFunction& target,
                 DiagnosticsReport& report) {
  const Eigen::Index n = gram.K.rows();
  if (static_cast<Eigen::Index>(sample.eta.size()) != n ||
      static_cast<Eigen::Index>(sample.xi.size()) != n)
    throw std::invalid_argument("measure_abc: sample size mismatch");
  if (!(report.b > 0.0))
    throw std::domain_error(
        "measure_abc: report.b must be measured first (run the assumption "
        "measurement)");
  if (target.family == FeatureFamily::fourier) {
    if (static_cast<Eigen::Index>(sample.x.size()) != n)
      throw std::invalid_argument("measure_abc: sample locations missing");
    if (target.support_half() >
        static_cast<int>(profile.survival.size()))
      throw std::invalid_argument(
          "measure_abc: target support exceeds the leading subspace");
  } else if (target.subgaussian_coeff.size() >
             std::min<std::size_t>(static_cast<std::size_t>(gram.V_G.rows()),
                                   profile.survival.size())) {
    throw std::invalid_argument(
        "measure_abc: target support exceeds the leading subspace");
  }

  const Eigen::VectorXd xi =
      Eigen::Map<const Eigen::VectorXd>(sample.xi.data(), n);
  const Eigen::VectorXd eta =
      Eigen::Map<const Eigen::VectorXd>(sample.eta.data(), n);

  Eigen::LLT<Eigen::MatrixXd> llt(gram.K);
  if (llt.info() != Eigen::Success)
    throw ConditioningError("measure_abc: K is not positive definite",
                            std::numeric_limits<double>::infinity());
  const Eigen::MatrixXd inverse =
      llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::VectorXd h_xi = inverse * xi;
  const Eigen::VectorXd h_eta = inverse * eta;

  double a_raw = 0.0;
  double b_raw = 0.0;
  double c_raw = 0.0;
  Eigen::VectorXd held_out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dii = inverse(i, i);
    if (!(dii > 0.0))
      throw ConditioningError("measure_abc: nonpositive inverse diagonal",
                              std::numeric_limits<double>::infinity());

    // Leave-one-out interpolant of the noise, evaluated at the held-out point.
    a_raw = std::max(a_raw, std::abs(xi(i) - h_xi(i) / dii));

    // Coefficients of the noiseless leave-one-out interpolant, embedded with
    // a zero at position i: K restricted to the others maps them to eta there.
    held_out = h_eta - (h_eta(i) / dii) * inverse.col(i);
    held_out(i) = 0.0;
    const double residual_part = gram.K_R.row(i).dot(held_out);
    const double favored_part = gram.K_G.row(i).dot(held_out);
    const double survived =
        target.family == FeatureFamily::fourier
            ? survived_target_at(profile, target, sample.x[static_cast<std::size_t>(i)])
            : survived_target_at_column(profile, target, gram.V_G, i);

    b_raw = std::max(b_raw, std::abs(residual_part));
    c_raw = std::max(c_raw, std::abs(favored_part - survived));
  }
  report.a_max = a_raw / report.b;
  report.b_max = b_raw / report.b;
  report.c_max = c_raw / report.b;
}

RiskEstimate excess_risk(const std::function<double(double)>& eta_hat,
                         const TargetFunction& target, long long mc_points,
                         std::uint64_t seed) {
  if (mc_points < 100)
    throw std::invalid_argument("excess_risk: mc_points must be >= 100");
  if (target.family != FeatureFamily::fourier)
    throw std::invalid_argument(
        "excess_risk: pointwise evaluation needs the Fourier family");

  rng::Stream stream(rng::chain(seed, rng::StreamTag::risk_points));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long long t = 0; t < mc_points; ++t) {
    const double x = stream.uniform();
    const double star = target.evaluate(x);
    const double value =
        eta_hat(x) * star < 0.0 ? std::abs(star) : 0.0;
    sum += value;
    sum_sq += value * value;
  }
  RiskEstimate estimate;
  estimate.mc_points = mc_points;
  const double mean = sum / static_cast<double>(mc_points);
  estimate.excess_risk = mean;
  const double variance =
      std::max(0.0, sum_sq / static_cast<double>(mc_points) - mean * mean);
  estimate.std_error = std::sqrt(variance / static_cast<double>(mc_points));
  return estimate;
}

RiskEstimate excess_risk_from_values(const Eigen::VectorXd& eta_hat,
                                     const Eigen::VectorXd& eta_star,
                                     const Eigen::VectorXd& weights) {
  const Eigen::Index n = eta_hat.size();
  if (n < 1) throw std::invalid_argument("excess_risk_from_values: empty input");
  if (eta_star.size() != n || weights.size() != n)
    throw std::invalid_argument("excess_risk_from_values: size mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights(i) < 0.0)
      throw std::invalid_argument("excess_risk_from_values: negative weight");
    total += weights(i);
  }
  if (!(total > 0.0))
    throw std::invalid_argument("excess_risk_from_values: zero total weight");

  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double value =
        eta_hat(i) * eta_star(i) < 0.0 ? std::abs(eta_star(i)) : 0.0;
    mean += (weights(i) / total) * value;
  }
  double variance = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double value =
        eta_hat(i) * eta_star(i) < 0.0 ? std::abs(eta_star(i)) : 0.0;
    variance += (weights(i) / total) * (value - mean) * (value - mean);
  }
  RiskEstimate estimate;
  estimate.excess_risk = mean;
  estimate.mc_points = n;
  estimate.std_error = std::sqrt(variance / static_cast<double>(n));
  return estimate;
}

}  // namespace svplab
