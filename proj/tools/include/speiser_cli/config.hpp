#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "speiser/family.hpp"

namespace speiser::cli {

/// Invalid configuration text or values; the CLI exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every experiment parameter with its default. The text form is one
/// `key = value` per line; `#` starts a comment.
struct ExperimentConfig {
  // map
  FamilyTag family = FamilyTag::FLambda;
  int p = 1;
  double eta = 0.25;
  int m = 47;  // smallest odd m accepted by select_m(1, 0.25)
  double lambda = 1.0;
  std::vector<double> lambda_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  // raster
  double center_re = 0.0;
  double center_im = 0.0;
  double half_width = 2.0;
  int resolution = 256;
  int max_iter = 500;
  double tolerance = 1e-6;
  bool scale_window = true;  // sweep: half_width / lambda
  std::vector<int> box_scales = {128, 64, 32, 16, 8, 4};
  unsigned threads = 0;

  // dimension
  double pole_radius = 1e4;
  std::vector<std::size_t> counts = {100, 1000, 10000};
  std::string bowen_mode = "both";  // measured, synthetic or both
  double synthetic_c = 2.0;
  std::size_t branches = 2000;
  double r0 = 0.4;
  double r1 = 1.5;

  // verify
  int verify_points = 100;
  std::uint64_t seed = 1;

  std::string out;

  /// The map described by the family keys (FLambda uses `lambda`).
  [[nodiscard]] MapFamily map() const;
  [[nodiscard]] MapFamily map_at(double lambda_value) const;
};

/// Parses config text; unknown keys, malformed values and parameter
/// violations throw ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Applies one `key = value` assignment.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Checks cross-field constraints (family parameters, grid sizes, radii).
void validate(const ExperimentConfig& config);

/// All keys in canonical order, one `key = value` line each.
std::string serialize(const ExperimentConfig& config);

/// The serialized config with every line prefixed by `prefix`.
std::string config_comment(const ExperimentConfig& config, const std::string& prefix = "# ");

std::vector<std::string> config_keys();

}  // namespace speiser::cli
