/**
 * End-to-end acceptance suite.
 *
 * Ten numbered criteria cover the detector equivalences, the leave-one-out
 * shortcut, the three-panel demo proportions, the phase diagram, the
 * sub-Gaussian regime, SVM optimality certification, the risk trend, the
 * concentration statistics, invariance/oracle cross-checks, and worker-count
 * determinism. Each criterion prints exactly one PASS/FAIL line with its key
 * measurements and wall time; the exit code is the number of failed criteria.
 *
 * Everything is seeded: the run is deterministic, and the expected outcome of
 * every criterion is a property of the pinned master seed 42, not of the
 * machine or the worker count.
 */
#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "svplab/config.hpp"
#include "svplab/experiments.hpp"
#include "svplab/features.hpp"
#include "svplab/gram.hpp"
#include "svplab/output.hpp"
#include "svplab/rng.hpp"
#include "svplab/solvers.hpp"
#include "svplab/spectrum.hpp"
#include "svplab/svp.hpp"

using namespace svplab;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

void report(int criterion, bool pass, double seconds, const std::string& detail) {
  std::printf("criterion %2d: %s  %s  (%.1f s)\n", criterion,
              pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

double median_of(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double upper = values[mid];
  if (values.size() % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + (mid - 1),
                     values.begin() + mid);
    return 0.5 * (values[mid - 1] + upper);
  }
  return upper;
}

/// Work-stealing loop over [0, count) with the first worker exception rethrown.
void run_parallel(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         (a.size() == 0 ||
          std::memcmp(a.data(), b.data(),
                      sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
}

/**
 * Optimality certificate accumulator for every SVM solved anywhere in the
 * suite: convergence, KKT residual within tol, duality gap within 10*tol*n,
 * and sign feasibility y_i beta_i >= 0.
 */
struct CertificateStats {
  long long instances = 0;
  long long violations = 0;
  double max_kkt_ratio = 0.0;  // kkt_residual / tol
  double max_gap_ratio = 0.0;  // duality_gap / (10 * tol * n)
  double min_feasibility = std::numeric_limits<double>::infinity();
  bool all_converged = true;
};

CertificateStats g_cert;
std::mutex g_cert_mutex;
std::atomic<long long> g_mirror_mismatches{0};
std::atomic<long long> g_cross_failures{0};

void record_certificate(const SvmSolution& svm, const Eigen::VectorXd& y) {
  double feasibility = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < y.size(); ++i)
    feasibility = std::min(feasibility, y(i) * svm.beta(i));
  const double gap_bound = 10.0 * svm.tol * static_cast<double>(y.size());
  const bool ok = svm.converged && svm.kkt_residual <= svm.tol &&
                  svm.duality_gap <= gap_bound && feasibility >= 0.0;

  const std::lock_guard<std::mutex> lock(g_cert_mutex);
  ++g_cert.instances;
  if (!ok) ++g_cert.violations;
  g_cert.all_converged = g_cert.all_converged && svm.converged;
  g_cert.max_kkt_ratio = std::max(g_cert.max_kkt_ratio, svm.kkt_residual / svm.tol);
  g_cert.max_gap_ratio = std::max(g_cert.max_gap_ratio, svm.duality_gap / gap_bound);
  g_cert.min_feasibility = std::min(g_cert.min_feasibility, feasibility);
}

// ---------------------------------------------------------------------------
// Random problem instances for the property criteria: four kernel families
// with labels always drawn from the generative model.
// ---------------------------------------------------------------------------

struct RandomInstance {
  Eigen::MatrixXd K;
  Eigen::VectorXd y;
};

RandomInstance make_instance(std::uint64_t key, int kind, int min_n, int max_n) {
  rng::Stream stream(key);
  const int span = max_n - min_n + 1;
  int n = min_n + static_cast<int>(stream.next_u64() %
                                   static_cast<std::uint64_t>(span));

  RandomInstance out;
  std::vector<double> points;

  switch (kind) {
    case 0: {  // dense factor Gram: B B^T / (2n) + 0.1 I
      Eigen::MatrixXd b(n, 2 * n);
      for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = stream.normal();
      out.K = b * b.transpose() / (2.0 * n);
      out.K.diagonal().array() += 0.1;
      points = sample_points(n, rng::chain(key, 4));
      break;
    }
    case 1: {  // random orthogonal basis, log-uniform eigenvalues in [1e-2, 1e2]
      Eigen::MatrixXd a(n, n);
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = stream.normal();
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      const Eigen::MatrixXd q = qr.householderQ();
      Eigen::VectorXd lambda(n);
      for (int i = 0; i < n; ++i)
        lambda(i) = std::pow(10.0, -2.0 + 4.0 * stream.uniform());
      out.K = q * lambda.asDiagonal() * q.transpose();
      out.K = 0.5 * (out.K + out.K.transpose()).eval();
      points = sample_points(n, rng::chain(key, 4));
      break;
    }
    case 2: {  // two-level Fourier Gram at random (beta, r, q)
      n = std::max(n, 10);
      const double beta = 1.8 + 1.6 * stream.uniform();
      const double r = 0.25 + 0.5 * stream.uniform();
      const double q_hi = std::min(1.1, beta - r - 0.2);
      const double q = 0.3 + (q_hi - 0.3) * stream.uniform();
      const SpectrumModel model = build_bilevel({n, beta, r, q});
      const FourierMap map = fourier_map_from_spectrum(model, 3);
      points = sample_points(n, rng::chain(key, 4));
      out.K = assemble_fourier_gram(map, model, points).K;
      break;
    }
    default: {  // white-noise Wishart with comfortable degrees of freedom
      out.K = sample_wishart_residual(n, n + 10, 1.0 / n, rng::chain(key, 1));
      points = sample_points(n, rng::chain(key, 4));
      break;
    }
  }

  const TargetFunction target = sample_target(rng::chain(key, 3), 3, 2048);
  const LabeledSample sample = sample_labels(target, points, rng::chain(key, 2));
  out.y = to_vector(sample.y);
  return out;
}

/// Draws instances until the interpolation solve accepts the conditioning.
RandomInstance solvable_instance(std::uint64_t seed, int index, int kind,
                                 int min_n, int max_n, MniSolution& mni) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    const std::uint64_t key =
        rng::chain(seed, static_cast<std::uint64_t>(index) * 64 +
                             static_cast<std::uint64_t>(attempt));
    RandomInstance instance = make_instance(key, kind, min_n, max_n);
    try {
      mni = solve_mni(instance.K, instance.y);
      return instance;
    } catch (const ConditioningError&) {
      continue;
    }
  }
  throw std::runtime_error("solvable_instance: conditioning retries exhausted");
}

// ---------------------------------------------------------------------------
// Trial mirrors: independent reconstructions of the seeded trial pipeline,
// used to recover the full SVM certificate for every trial instance and to
// guard (bitwise) that the reconstruction matches the production path.
// ---------------------------------------------------------------------------

struct MirrorTrial {
  Eigen::VectorXd beta_mni;
  Eigen::VectorXd beta_svm;
  bool svp = false;
};

MirrorTrial mirror_fourier_trial(const BiLevelParams& params,
                                 std::uint64_t master_seed,
                                 std::uint64_t trial_index, bool fixed_target) {
  const SpectrumModel model = build_bilevel(params);
  const std::uint64_t seed = trial_seed(master_seed, trial_index);
  const std::uint64_t target_seed = fixed_target ? master_seed : seed;
  const FourierMap map = fourier_map_from_spectrum(model, 3);
  const TargetFunction target = sample_target(target_seed, 3, 8192);
  const std::vector<double> points = sample_points(params.n, seed);
  const LabeledSample sample = sample_labels(target, points, seed);
  const GramDecomposition gram = assemble_fourier_gram(map, model, points);

  const Eigen::VectorXd y = to_vector(sample.y);
  const MniSolution mni = solve_mni(gram.K, y);
  SvpVerdict verdict = detect_svp(mni, y);
  const SvmSolution svm =
      solve_svm(gram.K, y, default_svm_tol(gram.K), 1000000, mni.beta);
  if (!cross_check_solver(verdict, svm, mni, 1e-6)) ++g_cross_failures;
  record_certificate(svm, y);
  return {mni.beta, svm.beta, verdict.svp};
}

MirrorTrial mirror_gaussian_trial(const BiLevelParams& params,
                                  std::uint64_t master_seed,
                                  std::uint64_t trial_index) {
  const SpectrumModel model = build_bilevel(params);
  const int n = params.n;
  const std::uint64_t seed = trial_seed(master_seed, trial_index);
  const SubGaussianFamily family{FeatureFamily::gaussian, model.d};
  const int support =
      static_cast<int>(std::min<long long>(2LL * 3 + 1, model.p));
  const Eigen::MatrixXd leading =
      sample_subgaussian_features(family, n, 1, model.p, seed);
  const TargetFunction target =
      sample_target_subgaussian(seed, support, leading);
  const Eigen::VectorXd coeff = Eigen::Map<const Eigen::VectorXd>(
      target.subgaussian_coeff.data(),
      static_cast<Eigen::Index>(target.subgaussian_coeff.size()));
  const Eigen::VectorXd eta = leading.leftCols(coeff.size()) * coeff;
  const LabeledSample sample = sample_labels_from_eta(
      std::vector<double>(eta.data(), eta.data() + eta.size()), seed);

  Eigen::VectorXd head(model.p);
  for (long long ell = 1; ell <= model.p; ++ell)
    head(ell - 1) = model.eigenvalue(ell);
  const Eigen::MatrixXd K =
      leading * head.asDiagonal() * leading.transpose() +
      sample_wishart_residual(n, model.d - model.p, model.lambda_residual, seed);

  const Eigen::VectorXd y = to_vector(sample.y);
  const MniSolution mni = solve_mni(K, y);
  SvpVerdict verdict = detect_svp(mni, y);
  const SvmSolution svm = solve_svm(K, y, default_svm_tol(K), 1000000, mni.beta);
  if (!cross_check_solver(verdict, svm, mni, 1e-6)) ++g_cross_failures;
  record_certificate(svm, y);
  return {mni.beta, svm.beta, verdict.svp};
}

/// Two-sample Kolmogorov-Smirnov distance by a sorted merge walk.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

/// Brute-force kernel value: direct sum over every symmetric frequency.
double direct_kernel(const FourierMap& map, const SpectrumModel& model,
                     double delta) {
  double value = 0.0;
  for (long long ell = -map.d_half; ell <= map.d_half; ++ell) {
    const long long mag = std::llabs(ell);
    const double lambda = model.eigenvalue(std::max<long long>(mag, 1));
    value += lambda * std::cos(2.0 * M_PI * static_cast<double>(ell) * delta);
  }
  return value;
}

// State shared between the phase-diagram criteria.
struct PhaseDiagram {
  bool ready = false;
  TrialConfig config;
  std::vector<double> r_grid;
  std::vector<double> q_grid;
  HeatmapResult result;
  std::string csv;
};

PhaseDiagram g_phase;

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// 1. The three detector characterizations agree on random PD instances.
bool criterion_1() {
  const auto start = clock_type::now();
  const int count = 500;
  int disagreements = 0;
  int cross_failures = 0;
  int indeterminate = 0;

  for (int i = 0; i < count; ++i) {
    MniSolution mni;
    const RandomInstance instance =
        solvable_instance(1001, i, i % 4, 2, 50, mni);
    SvpVerdict verdict = detect_svp(mni, instance.y);

    const SvmSolution svm = solve_svm(instance.K, instance.y,
                                      default_svm_tol(instance.K), 1000000,
                                      mni.beta);
    record_certificate(svm, instance.y);

    if (verdict.indeterminate) {
      ++indeterminate;
      continue;
    }
    const bool sign_condition = verdict.min_sign_margin > 0.0;
    const bool loo_condition = verdict.max_loo_margin < 1.0;
    if (sign_condition != loo_condition || verdict.svp != sign_condition)
      ++disagreements;
    if (!cross_check_solver(verdict, svm, mni, 1e-6)) ++cross_failures;
  }

  const double elapsed = seconds_since(start);
  const bool pass = disagreements == 0 && cross_failures == 0 && elapsed < 60.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "margin/leave-one-out detectors and solver support agree on "
                "%d/%d instances (%d indeterminate)",
                count - disagreements - cross_failures, count, indeterminate);
  report(1, pass, elapsed, detail);
  return pass;
}

/// 2. The leave-one-out shortcut equals explicit n-fold refits.
bool criterion_2() {
  const auto start = clock_type::now();
  const int count = 100;
  double max_gap = 0.0;

  for (int i = 0; i < count; ++i) {
    MniSolution mni;
    const RandomInstance instance =
        solvable_instance(2002, i, i % 2, 2, 20, mni);
    const Eigen::Index n = instance.y.size();

    for (Eigen::Index drop = 0; drop < n; ++drop) {
      Eigen::MatrixXd sub(n - 1, n - 1);
      Eigen::VectorXd y_sub(n - 1);
      Eigen::VectorXd row(n - 1);
      Eigen::Index a = 0;
      for (Eigen::Index i2 = 0; i2 < n; ++i2) {
        if (i2 == drop) continue;
        Eigen::Index b = 0;
        for (Eigen::Index j2 = 0; j2 < n; ++j2) {
          if (j2 == drop) continue;
          sub(a, b) = instance.K(i2, j2);
          ++b;
        }
        y_sub(a) = instance.y(i2);
        row(a) = instance.K(drop, i2);
        ++a;
      }
      const Eigen::VectorXd beta_sub = sub.llt().solve(y_sub);
      const double refit_margin = instance.y(drop) * row.dot(beta_sub);
      max_gap = std::max(max_gap, std::abs(refit_margin - mni.loo_margins(drop)));
    }

    const SvmSolution svm = solve_svm(instance.K, instance.y,
                                      default_svm_tol(instance.K), 1000000,
                                      mni.beta);
    record_certificate(svm, instance.y);
  }

  const double elapsed = seconds_since(start);
  const bool pass = max_gap <= 1e-8 && elapsed < 30.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "shortcut vs %d explicit refit folds: max margin gap %.2e",
                count, max_gap);
  report(2, pass, elapsed, detail);
  return pass;
}

/// 3. Three-panel demo proportions at (n, beta, r) = (100, 3.2, 0.4).
bool criterion_3() {
  const auto start = clock_type::now();
  const double panels[3] = {-0.4, 0.4, 0.8};
  int svp_counts[3] = {0, 0, 0};
  int indeterminate = 0;
  int errors = 0;

  for (int p = 0; p < 3; ++p) {
    TrialConfig config;
    config.bilevel = {100, 3.2, 0.4, panels[p]};
    config.master_seed = 42;
    for (int t = 0; t < 25; ++t) {
      const TrialResult result =
          run_trial(config, static_cast<std::uint64_t>(t));
      if (!result.error.empty()) {
        ++errors;
        continue;
      }
      if (result.verdict.indeterminate)
        ++indeterminate;
      else if (result.verdict.svp)
        ++svp_counts[p];

      const MirrorTrial mirror =
          mirror_fourier_trial(config.bilevel, 42, static_cast<std::uint64_t>(t),
                               /*fixed_target=*/false);
      if (!bitwise_equal(mirror.beta_mni, result.beta_mni) ||
          !bitwise_equal(mirror.beta_svm, result.beta_svm))
        ++g_mirror_mismatches;
    }
  }

  const double elapsed = seconds_since(start);
  const bool pass = errors == 0 && indeterminate == 0 &&
                    svp_counts[0] <= 5 && svp_counts[1] >= 20 &&
                    svp_counts[2] >= 20 && elapsed < 120.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "proliferation counts q=-0.4: %d/25 (<=5), q=+0.4: %d/25 "
                "(>=20), q=+0.8: %d/25 (>=20)",
                svp_counts[0], svp_counts[1], svp_counts[2]);
  report(3, pass, elapsed, detail);
  return pass;
}

/// 4. Phase diagram: proportions inside the predicted region and the q-trend.
bool criterion_4() {
  const auto start = clock_type::now();

  TrialConfig config;
  config.bilevel = {100, 3.2, 0.4, 0.8};
  config.master_seed = 42;
  config.trials = 25;
  config.workers = 8;
  const std::vector<double> r_grid = arithmetic_grid(0.05, 0.95, 0.05);
  const std::vector<double> q_grid = arithmetic_grid(-0.5, 1.5, 0.05);

  const HeatmapResult hm = heatmap(config, r_grid, q_grid);
  g_phase.ready = true;
  g_phase.config = config;
  g_phase.r_grid = r_grid;
  g_phase.q_grid = q_grid;
  g_phase.result = hm;
  g_phase.csv = render_heatmap_csv(hm);

  // Cells strictly inside the predicted boundary q > (1 - r)/2, with a 0.1
  // margin in q and r capped at 0.6, must each reach a 0.9 proportion.
  int qualifying = 0;
  int violations = 0;
  double min_proportion = 1.0;
  for (const HeatmapCell& cell : hm.cells) {
    if (!cell.valid) continue;
    if (cell.r > 0.6 + 1e-9) continue;
    if (cell.q <= 0.5 * (1.0 - cell.r) + 0.1 + 1e-9) continue;
    ++qualifying;
    const double proportion =
        static_cast<double>(cell.svp_count) / static_cast<double>(cell.trials);
    min_proportion = std::min(min_proportion, proportion);
    if (proportion < 0.9) ++violations;
  }

  // Along every row with r <= 0.6 the proportion must not significantly
  // decrease in q (one-sided trend test at level 0.05).
  double min_trend_p = 1.0;
  for (std::size_t ri = 0; ri < hm.r_grid.size(); ++ri) {
    if (hm.r_grid[ri] > 0.6 + 1e-9) continue;
    std::vector<double> proportions;
    for (std::size_t qi = 0; qi < hm.q_grid.size(); ++qi) {
      const HeatmapCell& cell =
          hm.cell(static_cast<int>(ri), static_cast<int>(qi));
      if (cell.valid)
        proportions.push_back(static_cast<double>(cell.svp_count) /
                              static_cast<double>(cell.trials));
    }
    min_trend_p =
        std::min(min_trend_p, mann_kendall_decreasing_pvalue(proportions));
  }

  const double elapsed = seconds_since(start);
  const bool pass = qualifying > 0 && violations == 0 && min_trend_p >= 0.05 &&
                    elapsed < 1200.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "%d predicted-region cells, %d below 0.9 (min proportion "
                "%.2f), min q-trend p %.3f (>=0.05)",
                qualifying, violations, min_proportion, min_trend_p);
  report(4, pass, elapsed, detail);
  return pass;
}

/// 5. Sub-Gaussian regime via the Wishart residual path.
bool criterion_5() {
  const auto start = clock_type::now();
  int count_high = 0;  // q = 0.45, expected proliferation
  int count_zero = 0;  // q = 0.0, expected rarity
  int indeterminate = 0;
  int errors = 0;

  const double panels[2] = {0.45, 0.0};
  int* counters[2] = {&count_high, &count_zero};
  for (int p = 0; p < 2; ++p) {
    TrialConfig config;
    config.bilevel = {100, 2.2, 0.4, panels[p]};
    config.family = FeatureFamily::gaussian;
    config.master_seed = 42;
    for (int t = 0; t < 25; ++t) {
      const TrialResult result =
          run_trial(config, static_cast<std::uint64_t>(t));
      if (!result.error.empty()) {
        ++errors;
        continue;
      }
      if (result.verdict.indeterminate)
        ++indeterminate;
      else if (result.verdict.svp)
        ++(*counters[p]);

      const MirrorTrial mirror = mirror_gaussian_trial(
          config.bilevel, 42, static_cast<std::uint64_t>(t));
      if (!bitwise_equal(mirror.beta_mni, result.beta_mni) ||
          !bitwise_equal(mirror.beta_svm, result.beta_svm))
        ++g_mirror_mismatches;
    }
  }

  const double elapsed = seconds_since(start);
  const bool pass = errors == 0 && indeterminate == 0 && count_high >= 20 &&
                    count_zero <= 7 && elapsed < 300.0;
  // The q = 0 bound is a knife-edge property of this pipeline: across 200
  // trials the proliferation rate sits near 0.35, above the 0.30 ceiling, so
  // the pinned seed reports the discrepancy instead of hiding it.
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "gaussian features q=0.45: %d/25 (>=20), q=0.00: %d/25 "
                "(<=7; long-run rate over 200 trials is 0.35)",
                count_high, count_zero);
  report(5, pass, elapsed, detail);
  return pass;
}

/// 6. SVM optimality certificates across every instance of criteria 1-5.
bool criterion_6() {
  const auto start = clock_type::now();
  bool mirrored = false;

  if (g_phase.ready) {
    // Re-derive every phase-diagram trial to recover its full certificate;
    // spot instances are checked bitwise against the production path.
    const HeatmapResult& hm = g_phase.result;
    struct Item {
      std::size_t cell = 0;
      int trial = 0;
    };
    std::vector<Item> items;
    for (std::size_t cell = 0; cell < hm.cells.size(); ++cell) {
      if (!hm.cells[cell].valid) continue;
      for (int t = 0; t < g_phase.config.trials; ++t)
        items.push_back({cell, static_cast<int>(t)});
    }

    std::vector<std::size_t> guards = {0, items.size() / 2, items.size() - 1};
    run_parallel(items.size(), 8, [&](std::size_t idx) {
      const Item& item = items[idx];
      const HeatmapCell& cell = hm.cells[item.cell];
      BiLevelParams params = g_phase.config.bilevel;
      params.r = cell.r;
      params.q = cell.q;
      const std::uint64_t global_index =
          static_cast<std::uint64_t>(item.cell) *
              static_cast<std::uint64_t>(g_phase.config.trials) +
          static_cast<std::uint64_t>(item.trial);
      const MirrorTrial mirror =
          mirror_fourier_trial(params, g_phase.config.master_seed, global_index,
                               /*fixed_target=*/true);

      if (std::find(guards.begin(), guards.end(), idx) != guards.end()) {
        TrialConfig cfg = g_phase.config;
        cfg.bilevel = params;
        cfg.fixed_target = true;
        cfg.with_risk = false;
        const TrialResult production = run_trial(cfg, global_index);
        if (!production.error.empty() ||
            !bitwise_equal(mirror.beta_mni, production.beta_mni) ||
            !bitwise_equal(mirror.beta_svm, production.beta_svm))
          ++g_mirror_mismatches;
      }
    });
    mirrored = true;
  }

  CertificateStats cert;
  {
    const std::lock_guard<std::mutex> lock(g_cert_mutex);
    cert = g_cert;
  }
  const long long expected = 500 + 100 + 75 + 19475 + 50;

  const double elapsed = seconds_since(start);
  const bool pass = mirrored && cert.instances == expected &&
                    cert.violations == 0 && cert.all_converged &&
                    cert.min_feasibility >= 0.0 &&
                    g_mirror_mismatches.load() == 0 &&
                    g_cross_failures.load() == 0;
  char detail[220];
  std::snprintf(detail, sizeof(detail),
                "%lld/%lld solutions certified (kkt/tol <= %.2f, gap/bound <= "
                "%.2e, %lld violations, %lld mirror mismatches)",
                cert.instances - cert.violations, expected, cert.max_kkt_ratio,
                cert.max_gap_ratio, cert.violations,
                g_mirror_mismatches.load());
  report(6, pass, elapsed, detail);
  return pass;
}

/// 7. Median excess risk shrinks with the sample size.
bool criterion_7() {
  const auto start = clock_type::now();

  TrialConfig config;
  config.bilevel = {100, 3.2, 0.4, 0.4};
  config.master_seed = 42;
  config.trials = 10;
  config.mc_points = 100000;
  config.workers = 8;
  const std::vector<int> n_list = {50, 100, 200, 400};
  const RiskSweepResult sweep = risk_sweep(config, n_list);

  bool non_increasing = true;
  for (std::size_t k = 1; k < sweep.median_mni.size(); ++k)
    non_increasing = non_increasing &&
                     sweep.median_mni[k] <= sweep.median_mni[k - 1];
  const double ratio = sweep.median_mni.back() / sweep.median_mni.front();

  const double elapsed = seconds_since(start);
  const bool pass = non_increasing && ratio <= 0.5 && elapsed < 600.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "median excess risk %.4f -> %.4f -> %.4f -> %.4f "
                "(end/start ratio %.3f <= 0.5)",
                sweep.median_mni[0], sweep.median_mni[1], sweep.median_mni[2],
                sweep.median_mni[3], ratio);
  report(7, pass, elapsed, detail);
  return pass;
}

/// 8. Residual and favored-frame concentration improve as n doubles.
bool criterion_8() {
  const auto start = clock_type::now();
  const int sizes[3] = {50, 100, 200};
  double residual_medians[3];
  double frame_medians[3];
  double max_diag_gap = 0.0;

  for (int s = 0; s < 3; ++s) {
    const int n = sizes[s];
    const SpectrumModel model = build_bilevel({n, 3.2, 0.4, 0.4});
    const FourierMap map = fourier_map_from_spectrum(model, 3);
    const double residual_trace =
        model.lambda_residual * 2.0 *
        static_cast<double>(map.d_half - map.p_half);

    std::vector<double> residual_stats;
    std::vector<double> frame_stats;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const GramDecomposition gram =
          assemble_fourier_gram(map, model, sample_points(n, seed));

      for (int i = 0; i < n; ++i)
        max_diag_gap =
            std::max(max_diag_gap,
                     std::abs(gram.K_R(i, i) - residual_trace) / residual_trace);

      Eigen::MatrixXd deviation = gram.K_R;
      deviation.diagonal().array() -= residual_trace;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(deviation);
      residual_stats.push_back(std::max(std::abs(es.eigenvalues().minCoeff()),
                                        std::abs(es.eigenvalues().maxCoeff())) /
                               residual_trace);

      Eigen::MatrixXcd frame = gram.V_G * gram.V_G.adjoint();
      frame.diagonal().array() -= static_cast<double>(n);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(frame);
      frame_stats.push_back(std::max(std::abs(es2.eigenvalues().minCoeff()),
                                     std::abs(es2.eigenvalues().maxCoeff())) /
                            static_cast<double>(n));
    }
    residual_medians[s] = median_of(residual_stats);
    frame_medians[s] = median_of(frame_stats);
  }

  const bool residual_decreasing = residual_medians[1] < residual_medians[0] &&
                                   residual_medians[2] < residual_medians[1];
  const bool frame_decreasing = frame_medians[1] < frame_medians[0] &&
                                frame_medians[2] < frame_medians[1];

  const double elapsed = seconds_since(start);
  const bool pass = residual_decreasing && frame_decreasing &&
                    max_diag_gap <= 1e-12 && elapsed < 300.0;
  char detail[220];
  std::snprintf(detail, sizeof(detail),
                "residual medians %.2e -> %.2e -> %.2e, frame medians %.3f -> "
                "%.3f -> %.3f, diag identity gap %.1e",
                residual_medians[0], residual_medians[1], residual_medians[2],
                frame_medians[0], frame_medians[1], frame_medians[2],
                max_diag_gap);
  report(8, pass, elapsed, detail);
  return pass;
}

/// 9. Verdict invariances, the closed-form Gram oracle, and the Wishart law.
bool criterion_9() {
  const auto start = clock_type::now();

  // Verdicts are invariant under kernel rescaling and global label flips.
  int invariance_failures = 0;
  for (int i = 0; i < 100; ++i) {
    MniSolution mni;
    const RandomInstance instance =
        solvable_instance(9009, i, i % 2, 2, 40, mni);
    const SvpVerdict base = detect_svp(mni, instance.y);

    for (const double scale : {1e-3, 1e3}) {
      const MniSolution scaled_mni =
          solve_mni((scale * instance.K).eval(), instance.y);
      const SvpVerdict scaled = detect_svp(scaled_mni, instance.y);
      if (scaled.svp != base.svp || scaled.indeterminate != base.indeterminate)
        ++invariance_failures;
    }
    const MniSolution flipped_mni =
        solve_mni(instance.K, (-instance.y).eval());
    const SvpVerdict flipped = detect_svp(flipped_mni, (-instance.y).eval());
    if (flipped.svp != base.svp || flipped.indeterminate != base.indeterminate)
      ++invariance_failures;
  }

  // Closed-form Gram assembly against the brute-force frequency sum.
  const SpectrumModel custom = build_custom(
      [] {
        std::vector<double> lambda{3.0, 2.0};
        lambda.insert(lambda.end(), 18, 0.25);
        return lambda;
      }(),
      2);
  const FourierMap map = fourier_map_from_spectrum(custom, 1);
  const std::vector<double> points = sample_points(5, 77);
  const GramDecomposition gram = assemble_fourier_gram(map, custom, points);
  double max_gram_gap = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double brute = direct_kernel(map, custom, points[i] - points[j]);
      max_gram_gap =
          std::max(max_gram_gap, std::abs(gram.K(i, j) - brute) /
                                     std::max(1.0, std::abs(brute)));
    }

  // The factored Wishart residual matches an explicit feature outer product
  // in distribution (two-sample KS at level 0.01).
  const int draws = 2000;
  const long long dof = 200;
  std::vector<double> factored_diag, factored_off, explicit_diag, explicit_off;
  const SubGaussianFamily gaussian{FeatureFamily::gaussian, dof};
  for (int k = 0; k < draws; ++k) {
    const Eigen::MatrixXd w =
        sample_wishart_residual(5, dof, 1.0, static_cast<std::uint64_t>(k));
    factored_diag.push_back(w(2, 2));
    factored_off.push_back(w(0, 3));
    const Eigen::MatrixXd z = sample_subgaussian_features(
        gaussian, 5, 1, dof, static_cast<std::uint64_t>(k) + 1000003u);
    const Eigen::MatrixXd m = z * z.transpose();
    explicit_diag.push_back(m(2, 2));
    explicit_off.push_back(m(0, 3));
  }
  const double critical = 1.628 * std::sqrt(2.0 / draws);
  const double ks_diag = ks_distance(factored_diag, explicit_diag);
  const double ks_off = ks_distance(factored_off, explicit_off);

  const double elapsed = seconds_since(start);
  const bool pass = invariance_failures == 0 && max_gram_gap <= 1e-10 &&
                    ks_diag < critical && ks_off < critical;
  char detail[220];
  std::snprintf(detail, sizeof(detail),
                "%d invariance failures over 100 instances, gram oracle gap "
                "%.1e (<=1e-10), KS %.4f/%.4f (<%.4f)",
                invariance_failures, max_gram_gap, ks_diag, ks_off, critical);
  report(9, pass, elapsed, detail);
  return pass;
}

/// 10. The phase diagram is byte-identical for any worker count.
bool criterion_10() {
  const auto start = clock_type::now();
  if (!g_phase.ready) {
    report(10, false, seconds_since(start),
           "skipped: the phase diagram run did not complete");
    return false;
  }

  TrialConfig config = g_phase.config;
  config.workers = 3;
  const HeatmapResult rerun = heatmap(config, g_phase.r_grid, g_phase.q_grid);
  const std::string csv = render_heatmap_csv(rerun);
  const bool equal = csv == g_phase.csv;

  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "csv with 3 workers %s the 8-worker run (%zu bytes)",
                equal ? "is byte-identical to" : "DIFFERS from",
                g_phase.csv.size());
  report(10, equal, elapsed, detail);
  return equal;
}

}  // namespace

int main() {
  std::printf("acceptance suite: master seed 42, deterministic\n");
  std::fflush(stdout);

  int failed = 0;
  const std::function<bool()> criteria[] = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  int index = 1;
  for (const auto& criterion : criteria) {
    try {
      if (!criterion()) ++failed;
    } catch (const std::exception& error) {
      report(index, false, 0.0, std::string("unexpected exception: ") + error.what());
      ++failed;
    }
    ++index;
  }

  std::printf("result: %d/10 criteria passed\n", 10 - failed);
  return failed;
}
