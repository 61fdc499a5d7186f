#pragma once

#include <string>
#include <vector>

#include "tjflow/diagnostics.hpp"

namespace tjflow {

struct TrajectoryRow {
  double t = 0.0;
  double E = 0.0;
  double kappa_l2_sq = 0.0;
  double kappa_s_l2_sq = 0.0;
  double kappa_ss_l2_sq = 0.0;
  double px = 0.0;
  double py = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  double res_junction = 0.0;
  double res_flux = 0.0;
  double res_outer = 0.0;
  double res_perp = 0.0;
};

extern const char* const kTrajectoryHeader;

TrajectoryRow to_row(const DiagnosticsRecord& record);
std::vector<TrajectoryRow> to_rows(const std::vector<DiagnosticsRecord>& records);

std::string format_trajectory(const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> parse_trajectory(const std::string& text);

void write_trajectory(const std::vector<TrajectoryRow>& rows, const std::string& path);
std::vector<TrajectoryRow> read_trajectory(const std::string& path);

// Thresholds for the checks run by `verify`.
struct VerifyOptions {
  double energy_slack = 1e-12;
  // |dE/dt + ||kappa||^2| relative to max ||kappa||^2.
  double energy_law_rel = 0.05;
  // Junction, flux and Robin residuals relative to ||kappa|| + ||kappa_s|| +
  // ||kappa_ss|| of the same record (floored), on records after the first.
  double residual_rel = 0.1;
  double residual_floor = 1e-9;
  double perp_tol = 1e-6;
};

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

std::vector<VerifyCheck> verify_trajectory(const std::vector<TrajectoryRow>& rows, const VerifyOptions& options = {});

}  // namespace tjflow
