#include "svplab/gram.hpp"

#include <cmath>
#include <stdexcept>

#include "svplab/rng.hpp"

namespace svplab {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kDuplicateGap = 1e-12;
}  // namespace

double dirichlet_sum(double delta, long long m) {
  if (m < 0) throw std::invalid_argument("dirichlet_sum: m must be >= 0");
  const double M = static_cast<double>(2 * m + 1);
  const double u = delta - std::nearbyint(delta);
  const double a = kPi * u;
  const double Ma = M * a;
  if (std::abs(Ma) < 1e-2) {
    const double a2 = a * a;
    const double M2 = M * M;
    return M * (1.0 - (M2 - 1.0) * a2 / 6.0 +
                (3.0 * M2 * M2 - 10.0 * M2 + 7.0) * a2 * a2 / 360.0);
  }
  return std::sin(Ma) / std::sin(a);
}

GramDecomposition assemble_fourier_gram(const FourierMap& map,
                                        const SpectrumModel& model,
                                        const std::vector<double>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw std::invalid_argument("assemble_fourier_gram: empty sample");

  GramDecomposition gram;
  gram.K_G.resize(n, n);
  gram.K_R.resize(n, n);

  // Favored eigenvalues by frequency magnitude; index 0 maps to eigenvalue 1.
  std::vector<double> lambda_favored(static_cast<std::size_t>(map.p_half) + 1);
  for (long long ell = 0; ell <= map.p_half; ++ell)
    lambda_favored[static_cast<std::size_t>(ell)] =
        model.eigenvalue(std::max<long long>(ell, 1));

  const double lambda_res = model.two_level()
                                ? model.lambda_residual
                                : model.eigenvalue(model.d);
  if (!model.two_level()) {
    // Closed-form residual evaluation needs a flat residual level.
    for (long long ell = map.p_half + 1; ell <= map.d_half; ++ell)
      if (model.eigenvalue(ell) != lambda_res)
        throw std::invalid_argument(
            "assemble_fourier_gram: residual level must be flat for the "
            "closed-form path");
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double delta = points[static_cast<std::size_t>(i)] -
                           points[static_cast<std::size_t>(j)];
      if (i != j) {
        const double wrapped = delta - std::nearbyint(delta);
        if (std::abs(wrapped) < kDuplicateGap) gram.near_duplicates = true;
      }
      double kg = lambda_favored[0];
      for (long long ell = 1; ell <= map.p_half; ++ell)
        kg += 2.0 * lambda_favored[static_cast<std::size_t>(ell)] *
              std::cos(kTwoPi * static_cast<double>(ell) * delta);
      const double kr = lambda_res * (dirichlet_sum(delta, map.d_half) -
                                      dirichlet_sum(delta, map.p_half));
      gram.K_G(i, j) = gram.K_G(j, i) = kg;
      gram.K_R(i, j) = gram.K_R(j, i) = kr;
    }
  }
  gram.K = gram.K_G + gram.K_R;

  gram.V_G.resize(2 * map.p_half + 1, n);
  for (int j = 0; j < n; ++j) {
    const auto column = evaluate_features(map, points[static_cast<std::size_t>(j)],
                                          -map.p_half, map.p_half);
    for (long long row = 0; row < 2 * map.p_half + 1; ++row)
      gram.V_G(row, j) = column[static_cast<std::size_t>(row)];
  }
  return gram;
}

GramDecomposition assemble_explicit_gram(const SubGaussianFamily& family,
                                         const SpectrumModel& model, int n,
                                         std::uint64_t seed, int block_size) {
  if (n < 1) throw std::invalid_argument("assemble_explicit_gram: empty sample");
  if (block_size < 1)
    throw std::invalid_argument("assemble_explicit_gram: bad block size");
  if (family.d != model.d)
    throw std::invalid_argument(
        "assemble_explicit_gram: family and spectrum dimensions disagree");
  // Budget guard: the explicit path materializes n x block panels, d of them
  // in total. Past ~1e10 scalar draws the Wishart path is the right tool.
  const double scalar_draws = static_cast<double>(model.d) * n;
  if (scalar_draws > 1e10)
    throw std::range_error(
        "assemble_explicit_gram: d*n beyond the explicit budget; use the "
        "Wishart residual path");

  GramDecomposition gram;
  gram.K_G = Eigen::MatrixXd::Zero(n, n);
  gram.K_R = Eigen::MatrixXd::Zero(n, n);

  for (long long lo = 1; lo <= model.d; lo += block_size) {
    const long long hi = std::min<long long>(model.d, lo + block_size - 1);
    const Eigen::MatrixXd block =
        sample_subgaussian_features(family, n, lo, hi, seed);
    for (long long ell = lo; ell <= hi; ++ell) {
      const Eigen::VectorXd column = block.col(ell - lo);
      const double lambda = model.eigenvalue(ell);
      if (ell <= model.p)
        gram.K_G.selfadjointView<Eigen::Lower>().rankUpdate(column, lambda);
      else
        gram.K_R.selfadjointView<Eigen::Lower>().rankUpdate(column, lambda);
    }
  }
  gram.K_G = gram.K_G.selfadjointView<Eigen::Lower>();
  gram.K_R = gram.K_R.selfadjointView<Eigen::Lower>();
  gram.K = gram.K_G + gram.K_R;

  gram.V_G = sample_subgaussian_features(family, n, 1, model.p, seed)
                 .transpose()
                 .cast<std::complex<double>>();
  return gram;
}

Eigen::MatrixXd sample_wishart_residual(int n, long long dof, double scale,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_wishart_residual: n < 1");
  if (dof < n)
    throw std::invalid_argument(
        "sample_wishart_residual: dof below n gives a rank-deficient "
        "residual Gram");
  if (scale < 0.0)
    throw std::invalid_argument("sample_wishart_residual: negative scale");

  const std::uint64_t base = rng::chain(seed, rng::StreamTag::wishart);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t row_key = rng::chain(base, static_cast<std::uint64_t>(i));
    for (int j = 0; j <= i; ++j) {
      rng::Stream element(rng::chain(row_key, static_cast<std::uint64_t>(j)));
      if (j == i)
        L(i, j) = std::sqrt(
            element.chi_squared(static_cast<double>(dof - i)));
      else
        L(i, j) = element.normal();
    }
  }
  Eigen::MatrixXd W = scale * (L * L.transpose());
  return W;
}

}  // namespace svplab
