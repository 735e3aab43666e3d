#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "speiser/dimension.hpp"
#include "speiser/dynamics.hpp"
#include "speiser_cli/config.hpp"

namespace speiser::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

/// The invariant suite behind `verify`.
std::vector<CheckResult> run_checks(const ExperimentConfig& config);

/// Attracting fixed point when the family has one, otherwise the cycles of
/// period <= 3 found from the singular values and a seed grid over the window.
Attractor attractor_for(const MapFamily& family, const GridSpec& grid);

GridSpec grid_from(const ExperimentConfig& config, double scale = 1.0);

struct SweepRow {
  double lambda = 0.0;
  bool ok = false;
  std::string failure;
  FixedPointData fixed_point;
  DimensionEstimate box;
  double julia_fraction = 0.0;
  std::optional<Dilatation> dilatation;  // relative to the previous ok row
  std::optional<Interval> holder;
  std::optional<Interval> astala;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

std::vector<DimensionEstimate> run_dim_lower(const ExperimentConfig& config, std::ostream& log);
std::vector<DimensionEstimate> run_dim_upper(const ExperimentConfig& config, std::ostream& log);

// Subcommands. Each writes its file output to config.out (or a default
// name), prints a summary to `report` and returns the process exit status.
int cmd_verify(const ExperimentConfig& config, std::ostream& report);
int cmd_render(const ExperimentConfig& config, std::ostream& report);
int cmd_sweep(const ExperimentConfig& config, std::ostream& report);
int cmd_dim_lower(const ExperimentConfig& config, std::ostream& report);
int cmd_dim_upper(const ExperimentConfig& config, std::ostream& report);

}  // namespace speiser::cli
