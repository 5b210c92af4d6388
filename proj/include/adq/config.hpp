#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adq/quantizer.hpp"

namespace adq {

// Flat "key = value" experiment config; '#' starts a comment. Unknown keys
// and duplicate keys are errors. Keys and defaults are listed in README.md.
struct ExperimentConfig {
  std::string measure = "uniform1d";  // builtin name, inline JSON, or JSON file path
  double r = 2.0;
  std::vector<std::size_t> n_range{1, 2, 4, 8, 16};
  OptimizeConfig optimizer;
  std::optional<std::uint64_t> seed;

  int m = 2;
  double level_c = 4.0;
  int k_min = 0;
  int k_max = 10;
  std::size_t support_samples = 20000;
  std::size_t eval_samples = 200000;

  double band_min = 1.0 / 50.0;
  double band_max = 50.0;

  double probe_eps_min = 1e-4;
  double probe_eps_max = 0.1;
  std::size_t probe_scales = 12;
  std::size_t probe_centers = 1000;
  double probe_threshold = 100.0;

  std::string codebook_file;
  double structural_ratio_slack = 0.05;
  std::size_t structural_m_cap = 1000;
  double structural_band_cap = 50.0;

  std::size_t oracle_instances = 50;
  std::string out = "out";

  // Applies the seed override and checks cross-field rules.
  std::uint64_t require_seed() const;
  void validate() const;
};

// base_dir resolves relative measure_file / codebook_file paths.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

// "a:b" or "a:b:step" (inclusive) or a comma list; must be nonempty and
// strictly increasing.
std::vector<std::size_t> parse_n_range(const std::string& text);

// Canonical key=value listing of every effective setting.
std::string normalized_config(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

// "# config_hash=<16 hex> seed=<seed>\n"
std::string provenance_comment(const ExperimentConfig& config);

}  // namespace adq
