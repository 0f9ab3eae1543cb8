#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "svplab/features.hpp"
#include "svplab/gram.hpp"
#include "svplab/spectrum.hpp"

/**
 * Empirical measurement of the quantities the theory is stated in terms of:
 * the residual-Gram extremal eigenvalues (alpha_L, alpha_U), the leave-one-out
 * feature covariance constant c, the idealized bias sup b, the raw
 * theorem-condition summands, the per-point A/B/C leave-one-out error terms,
 * and Monte-Carlo excess classification risk.
 */
namespace svplab {

struct TheoremTerms {
  // Bounded orthonormal system condition:
  //   (1/b) sqrt(p log n / n) + ratio * (sqrt(log n)/b + sqrt(n)) + c^2 sqrt(p)
  double bos_interpolation = 0.0;
  double bos_ratio_term = 0.0;
  double bos_covariance = 0.0;
  double bos_sum = 0.0;
  // Sub-Gaussian condition:
  //   (1/b) sqrt(p log n / n) + ratio * sqrt(log n)/b
  //     + sqrt(lambda_{p+1} n log n / alpha_L) + c sqrt(log n)
  double subg_interpolation = 0.0;
  double subg_ratio_term = 0.0;
  double subg_residual = 0.0;
  double subg_covariance = 0.0;
  double subg_sum = 0.0;
};

struct DiagnosticsReport {
  double alpha_L = 0.0;
  double alpha_U = 0.0;
  double ratio = 0.0;      // (alpha_U - alpha_L)/(alpha_U + alpha_L)
  double alpha_bar = 0.0;  // harmonic mean
  double c = 0.0;          // max_i ratio + (2/n)||C*_{\i}C_{\i} - n I_G||
  double b = 0.0;
  double survived_sup = 0.0;     // ||S-bar eta*||_inf on the grid
  bool b_bound_flagged = false;  // b > 1 - survived_sup
  TheoremTerms terms;
  double a_max = 0.0;  // empirical A/B/C, normalized by b
  double b_max = 0.0;
  double c_max = 0.0;
};

struct RiskEstimate {
  double excess_risk = 0.0;
  long long mc_points = 0;
  double std_error = 0.0;
};

/**
 * alpha_L/alpha_U from a symmetric eigensolve of K_R, c from the n rank-one
 * downdates of the favored-feature covariance M = V_G V_G^*, and b from the
 * survival profile at the measured alpha_bar. Also fills the theorem terms.
 * Rejects rank-deficient K_R (alpha_L <= 0).
 */
DiagnosticsReport measure_assumption1(const GramDecomposition& gram,
                                      const SpectrumModel& model,
                                      const TargetFunction& target,
                                      int grid_size = 8192);

/// Raw theorem-condition summands; no threshold is applied.
TheoremTerms theorem_terms(double b, double ratio, double c, int n,
                           long long p, double lambda_residual,
                           double alpha_L);

/**
 * Per-point leave-one-out error terms of the margin decomposition, each
 * normalized by b and maximized over i:
 *   A: interpolated label noise |eps_{\i}(x_i)|,
 *   B: residual-component leakage |P_{G-perp} eta-hat_{\i,0}(x_i)|,
 *   C: favored-component deviation |P_G eta-hat_{\i,0}(x_i) - S-bar eta*(x_i)|.
 * S-bar eta*(x_i) is evaluated exactly in the eigenbasis from the survival
 * profile; the projections come from the Gram split rows.
 */
void measure_abc(const GramDecomposition& gram, const LabeledSample& sample,
                 const SurvivalProfile& profile, const TargetFunction& target,
                 DiagnosticsReport& report);

/**
 * Monte-Carlo estimate of E_x[|eta*(x)| * 1{sign eta-hat(x) != sign eta*(x)}]
 * over x uniform on [0,1). The integrand is the closed form of the excess
 * classification risk P(y-hat != y) - P(y != sign eta*) under the label
 * model; the identity is exercised against exhaustive enumeration on a
 * discrete toy measure in the test suite.
 */
RiskEstimate excess_risk(const std::function<double(double)>& eta_hat,
                         const TargetFunction& target, long long mc_points,
                         std::uint64_t seed);

/// Excess risk on precomputed values (sub-Gaussian path or toy measures).
RiskEstimate excess_risk_from_values(const Eigen::VectorXd& eta_hat,
                                     const Eigen::VectorXd& eta_star,
                                     const Eigen::VectorXd& weights);

}  // namespace svplab
