#include "svplab/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace svplab {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
    --end;
  return text.substr(begin, end - begin);
}

[[noreturn]] void fail_at(const std::string& origin, int line,
                          const std::string& message) {
  std::ostringstream out;
  out << origin << ":" << line << ": " << message;
  throw ConfigError(out.str());
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream input(path);
  if (!input)
    throw ConfigError("config file not found: " + path);
  std::ostringstream buffer;
  buffer << input.rdbuf();
  return parse_text(buffer.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config config;
  std::istringstream input(text);
  std::string raw;
  std::string section;
  int line_number = 0;
  while (std::getline(input, raw)) {
    ++line_number;
    const std::size_t comment = raw.find('#');
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail_at(origin, line_number, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        fail_at(origin, line_number, "empty section name");
      config.sections_[section];
      continue;
    }
    const std::size_t equals = line.find('=');
    if (equals == std::string::npos)
      fail_at(origin, line_number, "expected key = value");
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty()) fail_at(origin, line_number, "empty key");
    config.sections_[section][key] = value;
  }
  return config;
}

std::optional<std::string> Config::get(const std::string& section,
                                       const std::string& key) const {
  const auto in_section = sections_.find(section);
  if (in_section != sections_.end()) {
    const auto hit = in_section->second.find(key);
    if (hit != in_section->second.end()) return hit->second;
  }
  const auto global = sections_.find("");
  if (global != sections_.end()) {
    const auto hit = global->second.find(key);
    if (hit != global->second.end()) return hit->second;
  }
  return std::nullopt;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  const auto value = get(section, key);
  return value ? *value : fallback;
}

double Config::get_real(const std::string& section, const std::string& key,
                        double fallback) const {
  const auto value = get(section, key);
  if (!value) return fallback;
  errno = 0;
  char* end = nullptr;
  const double parsed = std::strtod(value->c_str(), &end);
  if (errno != 0 || end == value->c_str() || *end != '\0')
    throw ConfigError("key '" + key + "' is not a real number: " + *value);
  return parsed;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  const auto value = get(section, key);
  if (!value) return fallback;
  errno = 0;
  char* end = nullptr;
  const long long parsed = std::strtoll(value->c_str(), &end, 10);
  if (errno != 0 || end == value->c_str() || *end != '\0')
    throw ConfigError("key '" + key + "' is not an integer: " + *value);
  return parsed;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  const auto value = get(section, key);
  if (!value) return fallback;
  if (*value == "true" || *value == "1" || *value == "yes" || *value == "on")
    return true;
  if (*value == "false" || *value == "0" || *value == "no" || *value == "off")
    return false;
  throw ConfigError("key '" + key + "' is not a boolean: " + *value);
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = value;
}

TrialConfig trial_config_from(const Config& config,
                              const std::string& section) {
  TrialConfig trial;
  trial.bilevel.n =
      static_cast<int>(config.get_int(section, "n", 100));
  trial.bilevel.beta = config.get_real(section, "beta", 3.2);
  trial.bilevel.r = config.get_real(section, "r", 0.4);
  trial.bilevel.q = config.get_real(section, "q", 0.8);

  const std::string family = config.get_string(section, "family", "fourier");
  if (family == "fourier")
    trial.family = FeatureFamily::fourier;
  else if (family == "gaussian")
    trial.family = FeatureFamily::gaussian;
  else if (family == "rademacher")
    trial.family = FeatureFamily::rademacher;
  else
    throw ConfigError("unknown feature family: " + family);

  trial.target_support_half =
      static_cast<int>(config.get_int(section, "support_half", 3));
  trial.master_seed = static_cast<std::uint64_t>(
      config.get_int(section, "seed", 42));
  trial.trials = static_cast<int>(config.get_int(section, "trials", 25));
  trial.svm_tol = config.get_real(section, "svm_tol", 0.0);
  trial.tau = config.get_real(section, "tau", kDefaultTau);
  trial.fixed_target = config.get_bool(section, "fixed_target", false);
  trial.svm_cross_check = config.get_bool(section, "svm_cross_check", true);
  trial.grid_size =
      static_cast<int>(config.get_int(section, "grid_size", 8192));
  trial.mc_points = config.get_int(section, "mc_points", 100000);
  trial.explicit_block_size =
      static_cast<int>(config.get_int(section, "block_size", 1024));
  trial.wishart_residual = config.get_bool(section, "wishart_residual", true);
  trial.with_diagnostics = config.get_bool(section, "with_diagnostics", false);
  trial.with_abc = config.get_bool(section, "with_abc", false);
  trial.with_risk = config.get_bool(section, "with_risk", false);
  trial.workers = static_cast<int>(config.get_int(section, "workers", 1));
  return trial;
}

std::vector<double> arithmetic_grid(double start, double stop, double step) {
  if (!(step > 0.0))
    throw ConfigError("grid step must be positive");
  if (stop < start)
    throw ConfigError("grid stop must be >= start");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double value = start + static_cast<double>(k) * step;
    if (value > stop + 0.5 * step) break;
    grid.push_back(value);
  }
  return grid;
}

}  // namespace svplab
