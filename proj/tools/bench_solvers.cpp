/**
 * Micro-benchmark for the solver stack.
 *
 * Assembles bi-level Fourier Gram matrices over a range of sample sizes and
 * times the interpolating solver, the hard-margin SVM (cold start and warm
 * started from the interpolator), and the proliferation detector. Intended
 * for performance-regression checks; timings are wall clock medians over a
 * configurable number of repetitions.
 */
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "svplab/experiments.hpp"
#include "svplab/features.hpp"
#include "svplab/gram.hpp"
#include "svplab/solvers.hpp"
#include "svplab/spectrum.hpp"
#include "svplab/svp.hpp"

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double median_time(int reps, F&& body) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    const double start = now_seconds();
    body();
    times.push_back(now_seconds() - start);
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timing harness for the Gram assembly and solver stack"};
  std::vector<int> sizes{50, 100, 200, 400};
  double beta = 3.2;
  double r = 0.4;
  double q = 0.4;
  int reps = 5;
  std::uint64_t seed = 42;
  app.add_option("--sizes", sizes, "Sample sizes to benchmark")->delimiter(',');
  app.add_option("--beta", beta, "Ambient-dimension exponent");
  app.add_option("--r", r, "Spike-count exponent");
  app.add_option("--q", q, "Spike-strength exponent");
  app.add_option("--reps", reps, "Repetitions per cell (median reported)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Instance seed");
  CLI11_PARSE(app, argc, argv);

  std::printf("%6s %12s %12s %12s %12s %12s\n", "n", "gram (s)", "mni (s)",
              "svm cold (s)", "svm warm (s)", "detect (s)");
  for (const int n : sizes) {
    const svplab::BiLevelParams params{n, beta, r, q};
    const svplab::SpectrumModel model = svplab::build_bilevel(params);
    const svplab::FourierMap map = svplab::fourier_map_from_spectrum(model, 3);
    const svplab::TargetFunction target = svplab::sample_target(seed, 3, 8192);
    const std::vector<double> points = svplab::sample_points(n, seed);
    const svplab::LabeledSample sample =
        svplab::sample_labels(target, points, seed);

    svplab::GramDecomposition gram;
    const double t_gram = median_time(reps, [&] {
      gram = svplab::assemble_fourier_gram(map, model, points);
    });

    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = sample.y[static_cast<std::size_t>(i)];

    svplab::MniSolution mni;
    const double t_mni =
        median_time(reps, [&] { mni = svplab::solve_mni(gram.K, y); });

    const double tol = svplab::default_svm_tol(gram.K);
    svplab::SvmSolution svm;
    const double t_cold = median_time(
        reps, [&] { svm = svplab::solve_svm(gram.K, y, tol, 1000000); });
    const double t_warm = median_time(reps, [&] {
      svm = svplab::solve_svm(gram.K, y, tol, 1000000, mni.beta);
    });

    svplab::SvpVerdict verdict;
    const double t_detect =
        median_time(reps, [&] { verdict = svplab::detect_svp(mni, y); });

    std::printf("%6d %12.6f %12.6f %12.6f %12.6f %12.6f\n", n, t_gram, t_mni,
                t_cold, t_warm, t_detect);
  }
  return 0;
}
