#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "svplab/spectrum.hpp"

/**
 * Feature families and target/label generation.
 *
 * Fourier family: v_ell(x) = exp(j*2*pi*ell*x) on [0,1] for ell = -d..d, a
 * bounded orthonormal system with |v_ell(x)| = 1 everywhere. The one-sided
 * spectrum maps onto symmetric frequencies as
 *     favored  {ell : |ell| <= p_half},  p_half = max(support_half, p),
 *     residual {ell : p_half < |ell| <= d_half},  d_half = d,
 * with lambda_{-ell} = lambda_ell and the zero frequency assigned to the
 * favored level.
 *
 * Sub-Gaussian families (gaussian, rademacher): independent zero-mean
 * unit-variance coordinates, one-sided indices 1..d, generated counter-based
 * per (point, feature) so any block partition yields identical values.
 */
namespace svplab {

struct FourierMap {
  long long d_half = 0;  // frequencies ell = -d_half..d_half
  long long p_half = 0;  // favored set {|ell| <= p_half}

  long long favored_count() const { return 2 * p_half + 1; }
  long long total_count() const { return 2 * d_half + 1; }
};

/// Symmetric index mapping from a one-sided spectrum.
FourierMap fourier_map_from_spectrum(const SpectrumModel& model,
                                     int support_half);

enum class FeatureFamily { fourier, gaussian, rademacher };

struct SubGaussianFamily {
  FeatureFamily kind = FeatureFamily::gaussian;
  long long d = 0;
};

/**
 * eta* as a finite combination of leading eigenfunctions, sup-normalized.
 *
 * Fourier: complex coefficients c_0..c_support_half with the negative side
 * implied by conjugate symmetry, so eta*(x) = c_0 + 2*Re(sum c_ell v_ell(x))
 * is real. Sub-Gaussian: real coefficients on the first few coordinates, and
 * eta* exists only at sampled points (the features are random variables).
 */
struct TargetFunction {
  FeatureFamily family = FeatureFamily::fourier;
  std::vector<std::complex<double>> fourier_coeff;  // index ell = 0..support_half
  std::vector<double> subgaussian_coeff;
  double scale = 1.0;  // divisor applied during normalization

  int support_half() const {
    return static_cast<int>(fourier_coeff.size()) - 1;
  }
  /// Fourier-family pointwise evaluation.
  double evaluate(double x) const;
};

/**
 * Draws standard normal coefficients (conjugate-symmetric) and rescales so
 * the sup of |eta*| over a uniform grid equals 1/(1+1e-9). The strict factor
 * keeps |eta*(x)| <= 1 between grid points in well-resolved cases and makes
 * the label-model precondition robust to rounding.
 */
TargetFunction sample_target(std::uint64_t seed, int support_half,
                             int grid_size);

/// Sub-Gaussian analog: coefficients on the first `support` coordinates,
/// normalized by the realized max of |eta*| over the given feature rows.
TargetFunction sample_target_subgaussian(std::uint64_t seed, int support,
                                         const Eigen::MatrixXd& leading_features);

struct LabeledSample {
  std::vector<double> x;    // sample locations (Fourier) or empty (sampled features)
  std::vector<double> eta;  // eta*(x_i)
  std::vector<double> y;    // labels in {-1,+1}
  std::vector<double> xi;   // noise y_i - eta*(x_i)
};

/**
 * y_i = +1 with probability (1+eta*(x_i))/2, else -1.
 * Rejects |eta*(x_i)| > 1 + 1e-9 as a label-model violation.
 */
LabeledSample sample_labels(const TargetFunction& target,
                            const std::vector<double>& points,
                            std::uint64_t seed);

/// Label sampling from precomputed eta values (sub-Gaussian path).
LabeledSample sample_labels_from_eta(const std::vector<double>& eta,
                                     std::uint64_t seed);

/// v_ell(x) for ell = lo..hi.
std::vector<std::complex<double>> evaluate_features(const FourierMap& map,
                                                    double x, long long lo,
                                                    long long hi);

/**
 * n_points x (hi-lo+1) block of independent draws for features lo..hi
 * (1-based). Entry (i, ell) depends only on (seed, i, ell).
 */
Eigen::MatrixXd sample_subgaussian_features(const SubGaussianFamily& family,
                                            int n_points, long long lo,
                                            long long hi, std::uint64_t seed);

/// Uniform sample locations on [0,1); point i depends only on (seed, i).
std::vector<double> sample_points(int n, std::uint64_t seed);

}  // namespace svplab
