#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svplab/experiments.hpp"

/**
 * Flat key = value configuration files with one [section] per subcommand.
 * Keys outside any section apply to every subcommand; section keys override
 * them, and command-line flags override both.
 */
namespace svplab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  /// Parses a file; syntax errors carry line numbers.
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text, const std::string& origin);

  /// Typed lookups in `section` with fallback to the global section.
  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key,
                  double fallback) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// TrialConfig for a subcommand from config + overrides already applied.
TrialConfig trial_config_from(const Config& config, const std::string& section);

/// Grid helper: {start, start+step, ...} up to stop inclusive (half-step slack).
std::vector<double> arithmetic_grid(double start, double stop, double step);

}  // namespace svplab
