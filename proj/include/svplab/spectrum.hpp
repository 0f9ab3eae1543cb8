#pragma once

#include <cstdint>
#include <vector>

/**
 * Kernel eigenvalue models and the idealized survival/bias operators.
 *
 * The bi-level ensemble is parameterized by (n, beta, r, q) with
 *     p = round(n^r) leading eigenvalues equal to 1,
 *     d = floor(n^beta) total eigenvalues,
 *     lambda_ell = n^(-beta+r+q) for p < ell <= d.
 * Eigenvalue indices here are one-sided (ell = 1..d); the symmetric Fourier
 * frequency layout is a concern of the feature map, not of the spectrum.
 *
 * d can reach ~2e8 at n=400, so the two-level model is stored compactly and
 * the residual tail is never materialized.
 */
namespace svplab {

struct TargetFunction;

struct BiLevelParams {
  int n = 0;
  double beta = 0.0;
  double r = 0.0;
  double q = 0.0;
};

struct SpectrumModel {
  long long p = 0;  // leading-subspace dimension, one-sided
  long long d = 0;  // total eigenvalue count, one-sided
  double lambda_head = 1.0;
  double lambda_residual = 0.0;
  // Nonempty for custom (explicit) spectra; overrides the two-level fields.
  std::vector<double> explicit_eigenvalues;

  double eigenvalue(long long ell) const;  // 1-based index
  double residual_trace() const;           // sum of eigenvalues above p
  bool two_level() const { return explicit_eigenvalues.empty(); }
};

/// Validates BiLevelParams and produces the two-level spectrum.
SpectrumModel build_bilevel(const BiLevelParams& params);

/// Custom spectrum from an explicit non-increasing positive sequence.
SpectrumModel build_custom(std::vector<double> eigenvalues, long long p);

/**
 * Survival s_ell = n*lambda_ell/(alpha_bar + n*lambda_ell) and bias
 * b_ell = 1 - s_ell for the leading eigenvalues, with alpha_bar the harmonic
 * mean of the measured extremal residual-Gram eigenvalues.
 */
struct SurvivalProfile {
  double alpha_bar = 0.0;
  int n = 0;
  std::vector<double> survival;  // index ell-1, ell = 1..p
  std::vector<double> bias;      // 1 - survival, exactly
};

SurvivalProfile survival_profile(const SpectrumModel& model, double alpha_bar,
                                 int n);

struct BiasSupResult {
  double b = 0.0;            // sup over the grid of |bias-operator applied to eta*|
  double survived_sup = 0.0; // sup over the grid of |survival-operator applied to eta*|
};

/**
 * Dense-grid maximization of |B-bar eta*| and |S-bar eta*| on [0,1).
 * The target must be supported on indices <= p. Default grid is 8192 points;
 * the leading eigenfunctions are smooth low-frequency exponentials, so the
 * grid error is bounded.
 */
BiasSupResult idealized_bias_sup(const SurvivalProfile& profile,
                                 const TargetFunction& target, int grid_size);

}  // namespace svplab
