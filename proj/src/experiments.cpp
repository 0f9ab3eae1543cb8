#include "svplab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "svplab/gram.hpp"
#include "svplab/rng.hpp"
#include "svplab/solvers.hpp"

namespace svplab {

namespace {

constexpr long long kMaxSweeps = 1000000;
constexpr double kCrossCheckRelTol = 1e-6;
constexpr double kTwoPi = 6.283185307179586476925286766559;

/// k(x, x') as a function of delta = x - x': the favored cosine sum plus the
/// flat residual tail in closed form. Matches the Gram assembly exactly.
double fourier_kernel_value(const FourierMap& map, const SpectrumModel& model,
                            double delta) {
  double value = model.eigenvalue(1);
  const std::complex<double> rotate(std::cos(kTwoPi * delta),
                                    std::sin(kTwoPi * delta));
  std::complex<double> phase = 1.0;
  for (long long ell = 1; ell <= map.p_half; ++ell) {
    phase *= rotate;
    value += 2.0 * model.eigenvalue(std::max<long long>(ell, 1)) * phase.real();
  }
  const double lambda_res = model.two_level() ? model.lambda_residual
                                              : model.eigenvalue(model.d);
  value += lambda_res * (dirichlet_sum(delta, map.d_half) -
                         dirichlet_sum(delta, map.p_half));
  return value;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
}

/// Static work distribution by atomic counter; slot writes are disjoint so
/// results are independent of the schedule. Worker exceptions are rethrown
/// on the calling thread.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const int used = static_cast<int>(std::min<std::size_t>(
      count, static_cast<std::size_t>(std::max(1, workers))));
  if (used == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  for (int w = 0; w < used; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double median_of(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("median_of: empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return rng::chain(rng::chain(master_seed, rng::StreamTag::trial), trial_index);
}

bool in_bos_region(double beta, double r, double q) {
  return q > 0.5 * (1.0 - r) && r < 2.0 / 3.0 && beta > 3.0;
}

bool in_subgaussian_region(double beta, double r, double q) {
  return q > 0.5 * (1.0 - r) &&
         beta > std::max(1.0, 3.0 - 2.0 * r - 2.0 * q);
}

TrialResult run_trial(const TrialConfig& config, std::uint64_t trial_index) {
  if (config.with_risk && config.family != FeatureFamily::fourier)
    throw std::invalid_argument(
        "run_trial: risk estimation needs pointwise targets; use the fourier "
        "family");

  const SpectrumModel model = build_bilevel(config.bilevel);
  const int n = config.bilevel.n;

  TrialResult result;
  result.trial_seed = trial_seed(config.master_seed, trial_index);
  const std::uint64_t seed = result.trial_seed;
  const std::uint64_t target_seed =
      config.fixed_target ? config.master_seed : seed;

  try {
    TargetFunction target;
    GramDecomposition gram;
    FourierMap map;
    std::vector<double> points;

    if (config.family == FeatureFamily::fourier) {
      map = fourier_map_from_spectrum(model, config.target_support_half);
      target =
          sample_target(target_seed, config.target_support_half, config.grid_size);
      points = sample_points(n, seed);
      result.sample = sample_labels(target, points, seed);
      gram = assemble_fourier_gram(map, model, points);
    } else {
      const SubGaussianFamily family{config.family, model.d};
      const int support = static_cast<int>(std::min<long long>(
          2LL * config.target_support_half + 1, model.p));
      const Eigen::MatrixXd leading =
          sample_subgaussian_features(family, n, 1, model.p, seed);
      target = sample_target_subgaussian(target_seed, support, leading);
      const Eigen::VectorXd coeff = Eigen::Map<const Eigen::VectorXd>(
          target.subgaussian_coeff.data(),
          static_cast<Eigen::Index>(target.subgaussian_coeff.size()));
      const Eigen::VectorXd eta = leading.leftCols(coeff.size()) * coeff;
      result.sample = sample_labels_from_eta(
          std::vector<double>(eta.data(), eta.data() + eta.size()), seed);

      if (config.wishart_residual) {
        Eigen::VectorXd head(model.p);
        for (long long ell = 1; ell <= model.p; ++ell)
          head(ell - 1) = model.eigenvalue(ell);
        gram.K_G = leading * head.asDiagonal() * leading.transpose();
        gram.K_R = sample_wishart_residual(n, model.d - model.p,
                                           model.lambda_residual, seed);
        gram.K = gram.K_G + gram.K_R;
        gram.V_G = leading.transpose().cast<std::complex<double>>();
      } else {
        gram = assemble_explicit_gram(family, model, n, seed,
                                      config.explicit_block_size);
      }
    }

    const Eigen::VectorXd y = to_vector(result.sample.y);
    const MniSolution mni = solve_mni(gram.K, y);
    result.beta_mni = mni.beta;
    result.verdict = detect_svp(mni, y, config.tau);

    std::optional<SvmSolution> svm;
    if (config.svm_cross_check) {
      const double tol =
          config.svm_tol > 0.0 ? config.svm_tol : default_svm_tol(gram.K);
      svm = solve_svm(gram.K, y, tol, kMaxSweeps, mni.beta);
      result.beta_svm = svm->beta;
      cross_check_solver(result.verdict, *svm, mni, kCrossCheckRelTol);
    }

    if (config.with_diagnostics || config.with_abc) {
      DiagnosticsReport report =
          measure_assumption1(gram, model, target, config.grid_size);
      if (config.with_abc) {
        const SurvivalProfile profile =
            survival_profile(model, report.alpha_bar, n);
        measure_abc(gram, result.sample, profile, target, report);
      }
      result.report = report;
    }

    if (config.with_risk) {
      auto predictor = [&](const Eigen::VectorXd& beta) {
        return [&map, &model, &points, beta](double x) {
          double value = 0.0;
          for (Eigen::Index i = 0; i < beta.size(); ++i)
            value += beta(i) * fourier_kernel_value(
                                   map, model,
                                   x - points[static_cast<std::size_t>(i)]);
          return value;
        };
      };
      result.risk_mni =
          excess_risk(predictor(mni.beta), target, config.mc_points, seed);
      if (svm) {
        const bool same = result.verdict.svp &&
                          result.verdict.solver_agreement.value_or(false);
        result.risk_svm =
            same ? result.risk_mni
                 : excess_risk(predictor(svm->beta), target, config.mc_points,
                               seed);
      }
    }
  } catch (const std::invalid_argument&) {
    throw;  // malformed configuration, not a numeric trial failure
  } catch (const std::exception& error) {
    result.error = error.what();
  }
  return result;
}

std::vector<Figure1Panel> figure1(const TrialConfig& config) {
  if (config.family != FeatureFamily::fourier)
    throw std::invalid_argument("figure1: fourier family only");
  constexpr double kPanelQ[3] = {-0.4, 0.4, 0.8};
  constexpr int kGridPoints = 1024;
  const int n = config.bilevel.n;

  // One target and one training set are shared across panels so the panels
  // differ only through the residual eigenvalue level.
  const std::uint64_t seed = trial_seed(config.master_seed, 0);
  const TargetFunction target = sample_target(
      config.master_seed, config.target_support_half, config.grid_size);
  const std::vector<double> points = sample_points(n, seed);
  const LabeledSample sample = sample_labels(target, points, seed);
  const Eigen::VectorXd y = to_vector(sample.y);

  std::vector<Figure1Panel> panels;
  for (const double q : kPanelQ) {
    BiLevelParams params = config.bilevel;
    params.q = q;
    const SpectrumModel model = build_bilevel(params);
    const FourierMap map =
        fourier_map_from_spectrum(model, config.target_support_half);
    const GramDecomposition gram = assemble_fourier_gram(map, model, points);

    const MniSolution mni = solve_mni(gram.K, y);
    SvpVerdict verdict = detect_svp(mni, y, config.tau);
    const double tol =
        config.svm_tol > 0.0 ? config.svm_tol : default_svm_tol(gram.K);
    const SvmSolution svm = solve_svm(gram.K, y, tol, kMaxSweeps, mni.beta);
    cross_check_solver(verdict, svm, mni, kCrossCheckRelTol);

    Figure1Panel panel;
    panel.q = q;
    panel.sample = sample;
    panel.svp = verdict.svp;
    panel.grid_x.resize(kGridPoints);
    panel.eta_star.resize(kGridPoints);
    panel.eta_mni.resize(kGridPoints);
    panel.eta_svm.resize(kGridPoints);
    for (int g = 0; g < kGridPoints; ++g) {
      const double x = static_cast<double>(g) / kGridPoints;
      panel.grid_x[static_cast<std::size_t>(g)] = x;
      panel.eta_star[static_cast<std::size_t>(g)] = target.evaluate(x);
      double value_mni = 0.0;
      double value_svm = 0.0;
      for (int i = 0; i < n; ++i) {
        const double k_xi = fourier_kernel_value(
            map, model, x - points[static_cast<std::size_t>(i)]);
        value_mni += mni.beta(i) * k_xi;
        value_svm += svm.beta(i) * k_xi;
      }
      panel.eta_mni[static_cast<std::size_t>(g)] = value_mni;
      panel.eta_svm[static_cast<std::size_t>(g)] = value_svm;
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

HeatmapResult heatmap(const TrialConfig& config,
                      const std::vector<double>& r_grid,
                      const std::vector<double>& q_grid) {
  if (r_grid.empty() || q_grid.empty())
    throw std::invalid_argument("heatmap: empty grid");
  if (config.trials < 1)
    throw std::invalid_argument("heatmap: trials must be >= 1");

  HeatmapResult out;
  out.r_grid = r_grid;
  out.q_grid = q_grid;
  out.cells.resize(r_grid.size() * q_grid.size());

  const double beta = config.bilevel.beta;
  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
      HeatmapCell& cell = out.cells[ri * q_grid.size() + qi];
      cell.r = r_grid[ri];
      cell.q = q_grid[qi];
      cell.valid = cell.r > 0.0 && cell.r < 1.0 && cell.q <= beta - cell.r;
      cell.in_predicted_region =
          config.family == FeatureFamily::fourier
              ? in_bos_region(beta, cell.r, cell.q)
              : in_subgaussian_region(beta, cell.r, cell.q);
    }
  }

  struct Item {
    std::size_t cell = 0;
    int trial = 0;
  };
  std::vector<Item> items;
  for (std::size_t cell = 0; cell < out.cells.size(); ++cell) {
    if (!out.cells[cell].valid) continue;
    for (int t = 0; t < config.trials; ++t) items.push_back({cell, t});
  }

  // 0 = not SVP, 1 = SVP, 2 = indeterminate.
  std::vector<signed char> outcome(items.size(), 0);
  parallel_for(items.size(), config.workers, [&](std::size_t idx) {
    const Item& item = items[idx];
    const HeatmapCell& cell = out.cells[item.cell];
    TrialConfig cfg = config;
    cfg.bilevel.r = cell.r;
    cfg.bilevel.q = cell.q;
    cfg.fixed_target = true;
    cfg.with_risk = false;
    const std::uint64_t global_index =
        static_cast<std::uint64_t>(item.cell) *
            static_cast<std::uint64_t>(config.trials) +
        static_cast<std::uint64_t>(item.trial);
    const TrialResult result = run_trial(cfg, global_index);
    if (!result.error.empty())
      throw std::runtime_error("heatmap: trial failed at r=" +
                               std::to_string(cell.r) + " q=" +
                               std::to_string(cell.q) + ": " + result.error);
    outcome[idx] = result.verdict.indeterminate
                       ? static_cast<signed char>(2)
                       : static_cast<signed char>(result.verdict.svp ? 1 : 0);
  });

  for (std::size_t idx = 0; idx < items.size(); ++idx) {
    HeatmapCell& cell = out.cells[items[idx].cell];
    ++cell.trials;
    if (outcome[idx] == 1) ++cell.svp_count;
    if (outcome[idx] == 2) ++cell.indeterminate_count;
  }
  return out;
}

RiskSweepResult risk_sweep(const TrialConfig& config,
                           const std::vector<int>& n_list) {
  if (n_list.empty()) throw std::invalid_argument("risk_sweep: empty n list");
  if (config.trials < 1)
    throw std::invalid_argument("risk_sweep: trials must be >= 1");

  RiskSweepResult out;
  out.rows.resize(n_list.size() * static_cast<std::size_t>(config.trials));

  parallel_for(out.rows.size(), config.workers, [&](std::size_t idx) {
    const std::size_t n_index = idx / static_cast<std::size_t>(config.trials);
    const int trial = static_cast<int>(idx % static_cast<std::size_t>(config.trials));
    TrialConfig cfg = config;
    cfg.bilevel.n = n_list[n_index];
    cfg.with_risk = true;
    // Trial t reuses the same seed at every sample size (and the point
    // stream is a prefix across sizes), so size-to-size comparisons share
    // their trial-level randomness instead of adding independent noise.
    const TrialResult result = run_trial(cfg, static_cast<std::uint64_t>(trial));
    if (!result.error.empty())
      throw std::runtime_error("risk_sweep: trial failed at n=" +
                               std::to_string(cfg.bilevel.n) + ": " +
                               result.error);
    RiskSweepRow& row = out.rows[idx];
    row.n = cfg.bilevel.n;
    row.trial = trial;
    row.excess_risk_mni = result.risk_mni->excess_risk;
    row.excess_risk_svm = result.risk_svm
                              ? result.risk_svm->excess_risk
                              : std::numeric_limits<double>::quiet_NaN();
    row.svp = result.verdict.svp;
  });

  for (std::size_t n_index = 0; n_index < n_list.size(); ++n_index) {
    std::vector<double> mni;
    std::vector<double> svm;
    for (int t = 0; t < config.trials; ++t) {
      const RiskSweepRow& row =
          out.rows[n_index * static_cast<std::size_t>(config.trials) +
                   static_cast<std::size_t>(t)];
      mni.push_back(row.excess_risk_mni);
      if (!std::isnan(row.excess_risk_svm)) svm.push_back(row.excess_risk_svm);
    }
    out.median_mni.push_back(median_of(mni));
    out.median_svm.push_back(svm.empty()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : median_of(svm));
  }
  return out;
}

double mann_kendall_decreasing_pvalue(const std::vector<double>& sequence) {
  const std::size_t n = sequence.size();
  if (n < 2)
    throw std::invalid_argument(
        "mann_kendall_decreasing_pvalue: need at least two values");

  long long s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sequence[j] > sequence[i]) ++s;
      if (sequence[j] < sequence[i]) --s;
    }

  // Tie-corrected variance of the S statistic under the null.
  std::vector<double> sorted(sequence);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  const double nn = static_cast<double>(n);
  const double variance =
      (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tie_term) / 18.0;
  if (variance <= 0.0) return 0.5;  // fully tied sequence: no evidence

  double z = 0.0;
  if (s > 0) z = (static_cast<double>(s) - 1.0) / std::sqrt(variance);
  if (s < 0) z = (static_cast<double>(s) + 1.0) / std::sqrt(variance);
  // P(S <= observed) under the null; small for decreasing sequences.
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace svplab
