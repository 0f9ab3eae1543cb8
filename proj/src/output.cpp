#include "svplab/output.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace svplab {

const char* const kToolVersion = "svplab 1.0.0";

namespace {

using OrderedJson = nlohmann::ordered_json;

const char* family_name(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::fourier:
      return "fourier";
    case FeatureFamily::gaussian:
      return "gaussian";
    case FeatureFamily::rademacher:
      return "rademacher";
  }
  return "unknown";
}

OrderedJson risk_json(const RiskEstimate& risk) {
  OrderedJson out;
  out["excess_risk"] = risk.excess_risk;
  out["mc_points"] = risk.mc_points;
  out["std_error"] = risk.std_error;
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw OutputError("write failed: " + path);
}

std::string render_beta_csv(const TrialResult& result) {
  std::ostringstream out;
  out << "index,x,y,beta_mni,beta_svm,sign_margin,loo_margin\n";
  const Eigen::Index n = result.beta_mni.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    const double x = u < result.sample.x.size() ? result.sample.x[u] : nan;
    const double beta_svm =
        i < result.beta_svm.size() ? result.beta_svm(i) : nan;
    out << i << ',' << format_real(x) << ','
        << format_real(result.sample.y[u]) << ','
        << format_real(result.beta_mni(i)) << ',' << format_real(beta_svm)
        << ',' << format_real(result.verdict.sign_margins(i)) << ','
        << format_real(result.verdict.loo_margins(i)) << '\n';
  }
  return out.str();
}

std::string render_trial_json(const TrialConfig& config,
                              const TrialResult& result) {
  OrderedJson out;
  out["svp"] = result.verdict.svp;
  out["trial_seed"] = result.trial_seed;
  out["n"] = config.bilevel.n;
  out["beta"] = config.bilevel.beta;
  out["r"] = config.bilevel.r;
  out["q"] = config.bilevel.q;
  out["family"] = family_name(config.family);
  if (!result.error.empty()) {
    out["error"] = result.error;
    return out.dump(2) + "\n";
  }
  out["min_sign_margin"] = result.verdict.min_sign_margin;
  out["max_loo_margin"] = result.verdict.max_loo_margin;
  out["indeterminate"] = result.verdict.indeterminate;
  out["indeterminate_indices"] = result.verdict.indeterminate_indices;
  if (result.verdict.solver_agreement)
    out["solver_agreement"] = *result.verdict.solver_agreement;
  else
    out["solver_agreement"] = nullptr;
  if (result.report) {
    OrderedJson diag;
    diag["alpha_L"] = result.report->alpha_L;
    diag["alpha_U"] = result.report->alpha_U;
    diag["ratio"] = result.report->ratio;
    diag["alpha_bar"] = result.report->alpha_bar;
    diag["c"] = result.report->c;
    diag["b"] = result.report->b;
    diag["survived_sup"] = result.report->survived_sup;
    diag["b_bound_flagged"] = result.report->b_bound_flagged;
    OrderedJson terms;
    terms["bos_interpolation"] = result.report->terms.bos_interpolation;
    terms["bos_ratio_term"] = result.report->terms.bos_ratio_term;
    terms["bos_covariance"] = result.report->terms.bos_covariance;
    terms["bos_sum"] = result.report->terms.bos_sum;
    terms["subg_interpolation"] = result.report->terms.subg_interpolation;
    terms["subg_ratio_term"] = result.report->terms.subg_ratio_term;
    terms["subg_residual"] = result.report->terms.subg_residual;
    terms["subg_covariance"] = result.report->terms.subg_covariance;
    terms["subg_sum"] = result.report->terms.subg_sum;
    diag["terms"] = terms;
    diag["a_max"] = result.report->a_max;
    diag["b_max"] = result.report->b_max;
    diag["c_max"] = result.report->c_max;
    out["diagnostics"] = diag;
  }
  if (result.risk_mni) out["risk_mni"] = risk_json(*result.risk_mni);
  if (result.risk_svm) out["risk_svm"] = risk_json(*result.risk_svm);
  return out.dump(2) + "\n";
}

std::string render_overlay_csv(const std::vector<Figure1Panel>& panels) {
  std::ostringstream out;
  out << "x,eta_star,eta_mni,eta_svm,panel\n";
  const char* names[] = {"a", "b", "c"};
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Figure1Panel& panel = panels[p];
    const std::string name =
        p < 3 ? names[p] : "panel" + std::to_string(p + 1);
    for (std::size_t g = 0; g < panel.grid_x.size(); ++g)
      out << format_real(panel.grid_x[g]) << ','
          << format_real(panel.eta_star[g]) << ','
          << format_real(panel.eta_mni[g]) << ','
          << format_real(panel.eta_svm[g]) << ',' << name << '\n';
  }
  return out.str();
}

std::string render_heatmap_csv(const HeatmapResult& result) {
  std::ostringstream out;
  out << "r,q,trials,svp_count,indeterminate_count,in_predicted_region,"
         "validity\n";
  for (std::size_t ri = 0; ri < result.r_grid.size(); ++ri) {
    for (std::size_t qi = 0; qi < result.q_grid.size(); ++qi) {
      const HeatmapCell& cell =
          result.cell(static_cast<int>(ri), static_cast<int>(qi));
      out << format_real(cell.r) << ',' << format_real(cell.q) << ','
          << cell.trials << ',' << cell.svp_count << ','
          << cell.indeterminate_count << ','
          << (cell.in_predicted_region ? "true" : "false") << ','
          << (cell.valid ? "valid" : "invalid") << '\n';
    }
  }
  return out.str();
}

std::string render_risk_csv(const RiskSweepResult& result) {
  std::ostringstream out;
  out << "n,trial,excess_risk_mni,excess_risk_svm,svp\n";
  for (const RiskSweepRow& row : result.rows)
    out << row.n << ',' << row.trial << ','
        << format_real(row.excess_risk_mni) << ','
        << format_real(row.excess_risk_svm) << ','
        << (row.svp ? "true" : "false") << '\n';
  return out.str();
}

std::string render_manifest_json(const Config& config,
                                 const std::string& command,
                                 std::uint64_t master_seed,
                                 const std::string& started_at,
                                 const std::string& finished_at) {
  OrderedJson out;
  out["tool"] = kToolVersion;
  out["command"] = command;
  out["master_seed"] = master_seed;
  out["started_at"] = started_at;
  out["finished_at"] = finished_at;
  OrderedJson echo;
  for (const auto& [section, entries] : config.sections()) {
    OrderedJson block;
    for (const auto& [key, value] : entries) block[key] = value;
    echo[section.empty() ? "(global)" : section] = block;
  }
  out["config"] = echo;
  return out.dump(2) + "\n";
}

}  // namespace svplab
