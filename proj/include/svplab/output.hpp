#pragma once

#include <string>
#include <vector>

#include "svplab/config.hpp"
#include "svplab/experiments.hpp"

/**
 * Bit-specified result files. CSV is the canonical record: header row,
 * comma separators, decimal points, floats at 17 significant digits so
 * values round-trip exactly. JSON carries per-trial structures. All writers
 * produce deterministic byte streams given identical inputs.
 */
namespace svplab {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest-exact formatting used in every writer: %.17g.
std::string format_real(double value);

void write_text_file(const std::string& path, const std::string& content);

/// beta.csv: index,x,y,beta_mni,beta_svm,sign_margin,loo_margin
std::string render_beta_csv(const TrialResult& result);

/// trial.json: verdict plus diagnostics for a single trial.
std::string render_trial_json(const TrialConfig& config,
                              const TrialResult& result);

/// overlay.csv: x,eta_star,eta_mni,eta_svm,panel
std::string render_overlay_csv(const std::vector<Figure1Panel>& panels);

/// heatmap.csv: r,q,trials,svp_count,indeterminate_count,in_predicted_region,validity
std::string render_heatmap_csv(const HeatmapResult& result);

/// risk.csv: n,trial,excess_risk_mni,excess_risk_svm,svp
std::string render_risk_csv(const RiskSweepResult& result);

/// Manifest: config echo, master seed, tool version, timestamps, parameters.
std::string render_manifest_json(const Config& config,
                                 const std::string& command,
                                 std::uint64_t master_seed,
                                 const std::string& started_at,
                                 const std::string& finished_at);

extern const char* const kToolVersion;

}  // namespace svplab
