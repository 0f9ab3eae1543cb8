#include "svplab/features.hpp"

#include <cmath>
#include <stdexcept>

#include "svplab/rng.hpp"

namespace svplab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSupSlack = 1.0 + 1e-9;
}  // namespace

FourierMap fourier_map_from_spectrum(const SpectrumModel& model,
                                     int support_half) {
  if (support_half < 0)
    throw std::invalid_argument("fourier_map_from_spectrum: negative support");
  FourierMap map;
  map.p_half = std::max<long long>(support_half, model.p);
  map.d_half = model.d;
  if (map.p_half >= map.d_half)
    throw std::invalid_argument(
        "fourier_map_from_spectrum: favored set must be strictly inside the "
        "frequency range");
  return map;
}

double TargetFunction::evaluate(double x) const {
  if (family != FeatureFamily::fourier)
    throw std::logic_error(
        "TargetFunction::evaluate: sampled-feature targets have no pointwise "
        "form");
  double value = fourier_coeff[0].real();
  for (int ell = 1; ell < static_cast<int>(fourier_coeff.size()); ++ell) {
    const double angle = kTwoPi * ell * x;
    value += 2.0 * (fourier_coeff[ell].real() * std::cos(angle) -
                    fourier_coeff[ell].imag() * std::sin(angle));
  }
  return value;
}

TargetFunction sample_target(std::uint64_t seed, int support_half,
                             int grid_size) {
  if (support_half < 0)
    throw std::invalid_argument("sample_target: negative support");
  if (grid_size < 2)
    throw std::invalid_argument("sample_target: grid_size must be >= 2");

  TargetFunction target;
  target.family = FeatureFamily::fourier;
  target.fourier_coeff.resize(static_cast<std::size_t>(support_half) + 1);
  rng::Stream stream(rng::chain(seed, rng::StreamTag::target));
  // c_0 is real (it must equal its own conjugate); higher coefficients get
  // independent standard normal real and imaginary parts.
  target.fourier_coeff[0] = {stream.normal(), 0.0};
  for (int ell = 1; ell <= support_half; ++ell)
    target.fourier_coeff[ell] = {stream.normal(), stream.normal()};

  double sup = 0.0;
  for (int g = 0; g < grid_size; ++g)
    sup = std::max(sup,
                   std::abs(target.evaluate(static_cast<double>(g) / grid_size)));
  if (sup == 0.0) throw std::domain_error("sample_target: zero target drawn");
  // The grid maximum can undershoot the true sup: between samples a degree-s
  // trigonometric polynomial moves by at most (1/2)(2*pi*s)^2 (h/2)^2 ||f||
  // (second-order Taylor at the true peak with the Bernstein derivative
  // bound), h = 1/grid_size. Inflating by the looser (2*pi*s/grid_size)^2
  // keeps |eta*| < 1 everywhere, not only on the grid.
  const double overshoot =
      std::pow(kTwoPi * std::max(support_half, 1) / grid_size, 2.0);
  target.scale = sup * (1.0 + overshoot) * kSupSlack;
  for (auto& c : target.fourier_coeff) c /= target.scale;
  return target;
}

TargetFunction sample_target_subgaussian(
    std::uint64_t seed, int support, const Eigen::MatrixXd& leading_features) {
  if (support < 1 || support > leading_features.cols())
    throw std::invalid_argument(
        "sample_target_subgaussian: support must lie in [1, p]");
  TargetFunction target;
  target.family = FeatureFamily::gaussian;
  target.subgaussian_coeff.resize(static_cast<std::size_t>(support));
  rng::Stream stream(rng::chain(seed, rng::StreamTag::target));
  for (auto& c : target.subgaussian_coeff) c = stream.normal();

  Eigen::VectorXd coeff = Eigen::Map<const Eigen::VectorXd>(
      target.subgaussian_coeff.data(), support);
  const Eigen::VectorXd values = leading_features.leftCols(support) * coeff;
  const double sup = values.cwiseAbs().maxCoeff();
  if (sup == 0.0)
    throw std::domain_error("sample_target_subgaussian: zero target drawn");
  target.scale = sup * kSupSlack;
  for (auto& c : target.subgaussian_coeff) c /= target.scale;
  return target;
}

LabeledSample sample_labels(const TargetFunction& target,
                            const std::vector<double>& points,
                            std::uint64_t seed) {
  std::vector<double> eta(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    eta[i] = target.evaluate(points[i]);
  LabeledSample sample = sample_labels_from_eta(eta, seed);
  sample.x = points;
  return sample;
}

LabeledSample sample_labels_from_eta(const std::vector<double>& eta,
                                     std::uint64_t seed) {
  LabeledSample sample;
  sample.eta = eta;
  sample.y.resize(eta.size());
  sample.xi.resize(eta.size());
  const std::uint64_t key = rng::chain(seed, rng::StreamTag::labels);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (std::abs(eta[i]) > kSupSlack)
      throw std::domain_error(
          "sample_labels: |eta*(x_i)| exceeds 1, label model violated");
    const double u = rng::to_unit(rng::mix(key + rng::kGolden * (i + 1)));
    sample.y[i] = u < 0.5 * (1.0 + eta[i]) ? 1.0 : -1.0;
    sample.xi[i] = sample.y[i] - eta[i];
  }
  return sample;
}

std::vector<std::complex<double>> evaluate_features(const FourierMap& map,
                                                    double x, long long lo,
                                                    long long hi) {
  if (lo > hi || lo < -map.d_half || hi > map.d_half)
    throw std::invalid_argument("evaluate_features: index range out of bounds");
  std::vector<std::complex<double>> values;
  values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long long ell = lo; ell <= hi; ++ell) {
    const double angle = kTwoPi * static_cast<double>(ell) * x;
    values.emplace_back(std::cos(angle), std::sin(angle));
  }
  return values;
}

Eigen::MatrixXd sample_subgaussian_features(const SubGaussianFamily& family,
                                            int n_points, long long lo,
                                            long long hi, std::uint64_t seed) {
  if (lo < 1 || hi > family.d || lo > hi)
    throw std::invalid_argument(
        "sample_subgaussian_features: block outside [1, d]");
  const std::uint64_t base = rng::chain(seed, rng::StreamTag::features);
  Eigen::MatrixXd block(n_points, hi - lo + 1);
  for (int i = 0; i < n_points; ++i) {
    const std::uint64_t row_key = rng::chain(base, static_cast<std::uint64_t>(i));
    for (long long ell = lo; ell <= hi; ++ell) {
      rng::Stream element(rng::chain(row_key, static_cast<std::uint64_t>(ell)));
      double value;
      if (family.kind == FeatureFamily::rademacher)
        value = (element.next_u64() & 1ULL) ? 1.0 : -1.0;
      else
        value = element.normal();
      block(i, ell - lo) = value;
    }
  }
  return block;
}

std::vector<double> sample_points(int n, std::uint64_t seed) {
  std::vector<double> points(static_cast<std::size_t>(n));
  const std::uint64_t key = rng::chain(seed, rng::StreamTag::points);
  for (int i = 0; i < n; ++i)
    points[static_cast<std::size_t>(i)] =
        rng::to_unit(rng::mix(key + rng::kGolden * (static_cast<std::uint64_t>(i) + 1)));
  return points;
}

}  // namespace svplab
