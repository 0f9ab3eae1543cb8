#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svplab/diagnostics.hpp"
#include "svplab/features.hpp"
#include "svplab/spectrum.hpp"
#include "svplab/svp.hpp"

/**
 * Seeded trial harness: single trials, the three-panel function overlays,
 * the (r, q) SVP heatmap with predicted-region overlays, and risk sweeps.
 *
 * Trials are embarrassingly parallel. Every trial's seed is derived from the
 * master seed and the trial's global index before any work is distributed,
 * results land in preallocated slots, and aggregation order is fixed, so
 * outputs are identical for any worker count.
 */
namespace svplab {

struct TrialConfig {
  BiLevelParams bilevel;
  FeatureFamily family = FeatureFamily::fourier;
  int target_support_half = 3;
  std::uint64_t master_seed = 0;
  int trials = 25;
  double svm_tol = 0.0;  // 0: use default_svm_tol(K)
  double tau = kDefaultTau;
  bool fixed_target = false;    // one target for all trials (heatmap policy)
  bool svm_cross_check = true;  // solve the SVM and verify condition 1
  int grid_size = 8192;
  long long mc_points = 100000;       // risk estimation
  int explicit_block_size = 1024;     // explicit feature accumulation
  bool wishart_residual = true;       // gaussian family residual via Wishart
  bool with_diagnostics = false;      // assumption-1 measurement per trial
  bool with_abc = false;              // leave-one-out A/B/C terms per trial
  bool with_risk = false;
  int workers = 1;
};

struct TrialResult {
  SvpVerdict verdict;
  std::optional<DiagnosticsReport> report;
  std::optional<RiskEstimate> risk_mni;
  std::optional<RiskEstimate> risk_svm;
  LabeledSample sample;
  Eigen::VectorXd beta_mni;
  Eigen::VectorXd beta_svm;  // empty when the cross-check is disabled
  std::uint64_t trial_seed = 0;
  std::string error;  // nonempty: the trial failed and other fields are unset
};

/// Seed for trial `trial_index` under `master_seed` (stable public contract).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

TrialResult run_trial(const TrialConfig& config, std::uint64_t trial_index);

/// Predicted-region boundaries for the phase-diagram overlay.
bool in_bos_region(double beta, double r, double q);
bool in_subgaussian_region(double beta, double r, double q);

struct Figure1Panel {
  double q = 0.0;
  std::vector<double> grid_x;    // 1024 points
  std::vector<double> eta_star;
  std::vector<double> eta_mni;
  std::vector<double> eta_svm;
  LabeledSample sample;
  bool svp = false;
};

/**
 * The three-panel demonstration at (beta, r) = (3.2, 0.4),
 * q in {-0.4, 0.4, 0.8}: one target and one training set shared across
 * panels, MNI and SVM estimates evaluated on a 1024-point grid.
 */
std::vector<Figure1Panel> figure1(const TrialConfig& config);

struct HeatmapCell {
  double r = 0.0;
  double q = 0.0;
  int trials = 0;
  int svp_count = 0;
  int indeterminate_count = 0;
  bool in_predicted_region = false;
  bool valid = true;  // false: q > beta - r, cell not run
};

struct HeatmapResult {
  std::vector<double> r_grid;
  std::vector<double> q_grid;
  std::vector<HeatmapCell> cells;  // row-major over (r, q)
  const HeatmapCell& cell(int r_index, int q_index) const {
    return cells[static_cast<std::size_t>(r_index) * q_grid.size() + q_index];
  }
};

/**
 * `config.trials` seeded trials per (r, q) cell at fixed n, beta, and fixed
 * target. Indeterminate verdicts are excluded from svp_count and reported
 * separately. The predicted-region overlay uses the BOS region for the
 * fourier family and the sub-Gaussian region otherwise.
 */
HeatmapResult heatmap(const TrialConfig& config,
                      const std::vector<double>& r_grid,
                      const std::vector<double>& q_grid);

struct RiskSweepRow {
  int n = 0;
  int trial = 0;
  double excess_risk_mni = 0.0;
  double excess_risk_svm = 0.0;
  bool svp = false;
};

struct RiskSweepResult {
  std::vector<RiskSweepRow> rows;
  std::vector<double> median_mni;  // per n, in n_list order
  std::vector<double> median_svm;
};

/**
 * `config.trials` trials at every sample size in `n_list`. Trials are paired
 * across sizes: trial t derives from the same seed at each n, so the per-size
 * medians compare like against like.
 */
RiskSweepResult risk_sweep(const TrialConfig& config,
                           const std::vector<int>& n_list);

/**
 * One-sided Mann-Kendall p-value for a decreasing trend (normal
 * approximation with tie correction). Small values mean the sequence
 * significantly decreases; a non-decreasing acceptance check passes when
 * this is >= the level.
 */
double mann_kendall_decreasing_pvalue(const std::vector<double>& sequence);

}  // namespace svplab
