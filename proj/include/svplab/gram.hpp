#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "svplab/features.hpp"
#include "svplab/spectrum.hpp"

/**
 * Gram matrix assembly with the split K = K_G + K_R.
 *
 * Fourier path: closed form through the Dirichlet kernel
 *     sum_{ell=-m..m} exp(j*2*pi*ell*delta) = sin((2m+1)*pi*u)/sin(pi*u),
 * u = delta - round(delta), which handles d_half ~ 2e8 without touching
 * individual frequencies.
 *
 * Sub-Gaussian path: either explicit blocked feature accumulation, or exact
 * Wishart sampling of the residual Gram (Gaussian features only), which
 * realizes lambda_R * W(d-p, I_n) without materializing d = n^beta features.
 */
namespace svplab {

struct GramDecomposition {
  Eigen::MatrixXd K;
  Eigen::MatrixXd K_G;
  Eigen::MatrixXd K_R;
  // Favored feature rows for diagnostics: (2*p_half+1) x n for Fourier,
  // p x n (real values) for sub-Gaussian families.
  Eigen::MatrixXcd V_G;
  bool near_duplicates = false;
};

/**
 * sum_{ell=-m..m} exp(j*2*pi*ell*delta), evaluated as
 * sin(M*pi*u)/sin(pi*u) with M = 2m+1 and u = delta - round(delta).
 *
 * Near the removable singularity the ratio runs out of precision, so for
 * |M*pi*u| < 1e-2 a 3-term expansion in a = pi*u is used:
 *     M * (1 - (M^2-1)a^2/6 + (3M^4-10M^2+7)a^4/360).
 * The switch is placed on M*a rather than a fixed |sin(pi*delta)| threshold
 * because the expansion must stay inside its own convergence region for
 * M ~ 4e8; at the switch point the neglected term is ~1e-13 relative.
 */
double dirichlet_sum(double delta, long long m);

/// Closed-form Fourier Gram on the given points.
GramDecomposition assemble_fourier_gram(const FourierMap& map,
                                        const SpectrumModel& model,
                                        const std::vector<double>& points);

/**
 * Explicit feature path: K accumulated as sum_ell lambda_ell v_ell v_ell^T
 * in fixed ell order over blocks, so any block size gives the same result up
 * to last-bit rounding. Memory: one n x block_size panel at a time.
 */
GramDecomposition assemble_explicit_gram(const SubGaussianFamily& family,
                                         const SpectrumModel& model, int n,
                                         std::uint64_t seed, int block_size);

/**
 * Bartlett construction: returns scale * L * L^T where L is lower triangular,
 * L(i,i) = sqrt(chi^2(dof - i)) (0-based row i), L(i,j) standard normal below
 * the diagonal. Each element draws from its own (seed, i, j) keyed stream.
 * Rejects dof < n: a rank-deficient residual Gram would make K singular.
 */
Eigen::MatrixXd sample_wishart_residual(int n, long long dof, double scale,
                                        std::uint64_t seed);

}  // namespace svplab
