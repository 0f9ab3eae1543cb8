#include "svplab/spectrum.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "svplab/features.hpp"

namespace svplab {

double SpectrumModel::eigenvalue(long long ell) const {
  if (ell < 1 || ell > d) throw std::out_of_range("eigenvalue: index out of range");
  if (!two_level())
    return explicit_eigenvalues[static_cast<std::size_t>(ell - 1)];
  return ell <= p ? lambda_head : lambda_residual;
}

double SpectrumModel::residual_trace() const {
  if (!two_level()) {
    double sum = 0.0;
    for (long long ell = p; ell < d; ++ell)
      sum += explicit_eigenvalues[static_cast<std::size_t>(ell)];
    return sum;
  }
  return lambda_residual * static_cast<double>(d - p);
}

SpectrumModel build_bilevel(const BiLevelParams& params) {
  if (params.n < 1) throw std::invalid_argument("build_bilevel: n must be positive");
  if (!(params.beta > 1.0))
    throw std::invalid_argument("build_bilevel: beta must exceed 1");
  if (!(params.r > 0.0 && params.r < 1.0))
    throw std::invalid_argument("build_bilevel: r must lie in (0,1)");
  if (params.q > params.beta - params.r)
    throw std::invalid_argument(
        "build_bilevel: q above beta - r breaks the eigenvalue ordering");

  const double n = static_cast<double>(params.n);
  SpectrumModel model;
  model.p = std::llround(std::pow(n, params.r));
  if (model.p < 1) model.p = 1;
  model.d = static_cast<long long>(std::floor(std::pow(n, params.beta)));
  if (model.d <= model.p)
    throw std::invalid_argument("build_bilevel: d must exceed p");
  model.lambda_head = 1.0;
  model.lambda_residual = std::pow(n, -params.beta + params.r + params.q);
  return model;
}

SpectrumModel build_custom(std::vector<double> eigenvalues, long long p) {
  if (eigenvalues.empty())
    throw std::invalid_argument("build_custom: empty spectrum");
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0))
      throw std::invalid_argument("build_custom: eigenvalues must be positive");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
      throw std::invalid_argument("build_custom: sequence must be non-increasing");
  }
  if (p < 1 || p >= static_cast<long long>(eigenvalues.size()))
    throw std::invalid_argument("build_custom: p must satisfy 1 <= p < d");
  SpectrumModel model;
  model.p = p;
  model.d = static_cast<long long>(eigenvalues.size());
  model.explicit_eigenvalues = std::move(eigenvalues);
  return model;
}

SurvivalProfile survival_profile(const SpectrumModel& model, double alpha_bar,
                                 int n) {
  if (!(alpha_bar > 0.0))
    throw std::invalid_argument("survival_profile: alpha_bar must be positive");
  SurvivalProfile profile;
  profile.alpha_bar = alpha_bar;
  profile.n = n;
  profile.survival.reserve(static_cast<std::size_t>(model.p));
  profile.bias.reserve(static_cast<std::size_t>(model.p));
  for (long long ell = 1; ell <= model.p; ++ell) {
    const double nl = static_cast<double>(n) * model.eigenvalue(ell);
    const double s = nl / (alpha_bar + nl);
    profile.survival.push_back(s);
    profile.bias.push_back(1.0 - s);
  }
  return profile;
}

BiasSupResult idealized_bias_sup(const SurvivalProfile& profile,
                                 const TargetFunction& target, int grid_size) {
  if (grid_size < 2)
    throw std::invalid_argument("idealized_bias_sup: grid_size must be >= 2");
  const int support = target.support_half();
  if (support + 1 > static_cast<int>(profile.survival.size()) + 1)
    throw std::invalid_argument(
        "idealized_bias_sup: target support exceeds the leading subspace");

  // Frequency ell uses the survival factor of eigenvalue index |ell|; the
  // zero frequency sits in the favored level and shares s_1 in the uniform
  // bi-level case (all leading factors coincide there).
  auto survival_at = [&](int ell) {
    const int idx = ell == 0 ? 0 : ell - 1;
    return profile.survival[static_cast<std::size_t>(
        std::min<int>(idx, static_cast<int>(profile.survival.size()) - 1))];
  };

  BiasSupResult result;
  const double two_pi = 6.283185307179586476925286766559;
  for (int g = 0; g < grid_size; ++g) {
    const double x = static_cast<double>(g) / grid_size;
    std::complex<double> survived = 0.0;
    std::complex<double> biased = 0.0;
    for (int ell = 0; ell <= support; ++ell) {
      const double s = survival_at(ell);
      const std::complex<double> phase(std::cos(two_pi * ell * x),
                                       std::sin(two_pi * ell * x));
      const std::complex<double> term = target.fourier_coeff[ell] * phase;
      const double weight = ell == 0 ? 1.0 : 2.0;
      survived += weight * s * term;
      biased += weight * (1.0 - s) * term;
    }
    result.b = std::max(result.b, std::abs(biased.real()));
    result.survived_sup = std::max(result.survived_sup, std::abs(survived.real()));
  }
  return result;
}

}  // namespace svplab
