#include "tjflow/trajectory_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tjflow/config.hpp"
#include "tjflow/errors.hpp"

namespace tjflow {

const char* const kTrajectoryHeader =
    "t,E,kappa_l2_sq,kappa_s_l2_sq,kappa_ss_l2_sq,px,py,mu1,mu2,mu3,res_junction,res_flux,res_outer,res_perp";

namespace {

constexpr int kColumns = 14;

std::array<double*, kColumns> fields(TrajectoryRow& r) {
  return {&r.t,   &r.E,   &r.kappa_l2_sq, &r.kappa_s_l2_sq, &r.kappa_ss_l2_sq, &r.px,        &r.py,
          &r.mu1, &r.mu2, &r.mu3,         &r.res_junction,  &r.res_flux,       &r.res_outer, &r.res_perp};
}

}  // namespace

TrajectoryRow to_row(const DiagnosticsRecord& d) {
  TrajectoryRow r;
  r.t = d.t;
  r.E = d.E;
  r.kappa_l2_sq = d.kappa.l2_sq;
  r.kappa_s_l2_sq = d.kappa.s_l2_sq;
  r.kappa_ss_l2_sq = d.kappa.ss_l2_sq;
  r.px = d.p.x();
  r.py = d.p.y();
  r.mu1 = d.mu[0];
  r.mu2 = d.mu[1];
  r.mu3 = d.mu[2];
  r.res_junction = d.res.junction_kappa;
  r.res_flux = d.res.flux;
  r.res_outer = d.res.outer;
  r.res_perp = d.res.perp;
  return r;
}

std::vector<TrajectoryRow> to_rows(const std::vector<DiagnosticsRecord>& records) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_row(r));
  return rows;
}

std::string format_trajectory(const std::vector<TrajectoryRow>& rows) {
  std::string out = kTrajectoryHeader;
  out += "\n";
  char buf[40];
  for (auto row : rows) {
    const auto f = fields(row);
    for (int k = 0; k < kColumns; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", *f[static_cast<std::size_t>(k)]);
      if (k) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<TrajectoryRow> parse_trajectory(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::IoError, "trajectory is empty (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) throw Error(ErrorCode::IoError, "unexpected trajectory header");
  std::vector<TrajectoryRow> rows;
  int index = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TrajectoryRow row;
    auto f = fields(row);
    const char* p = line.c_str();
    for (int k = 0; k < kColumns; ++k) {
      char* end = nullptr;
      *f[static_cast<std::size_t>(k)] = std::strtod(p, &end);
      const char expect = k + 1 < kColumns ? ',' : '\0';
      if (end == p || *end != expect) {
        std::ostringstream msg;
        msg << "malformed trajectory row " << index << " (column " << k + 1 << ")";
        throw Error(ErrorCode::IoError, msg.str());
      }
      p = end + 1;
    }
    rows.push_back(row);
    ++index;
  }
  return rows;
}

void write_trajectory(const std::vector<TrajectoryRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << format_trajectory(rows);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::vector<TrajectoryRow> read_trajectory(const std::string& path) { return parse_trajectory(read_text_file(path)); }

std::vector<VerifyCheck> verify_trajectory(const std::vector<TrajectoryRow>& rows, const VerifyOptions& o) {
  std::vector<VerifyCheck> checks;
  double rise = 0.0;
  double kmax = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    kmax = std::max(kmax, rows[k].kappa_l2_sq);
    if (k) rise = std::max(rise, rows[k].E - rows[k - 1].E);
  }
  checks.push_back({"energy_monotone", rise, o.energy_slack, rise <= o.energy_slack});

  double law = 0.0;
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
    const double dt = rows[k + 1].t - rows[k - 1].t;
    if (!(dt > 0.0)) continue;
    law = std::max(law, std::abs((rows[k + 1].E - rows[k - 1].E) / dt + rows[k].kappa_l2_sq));
  }
  const double law_limit = o.energy_law_rel * kmax + 1e-12;
  checks.push_back({"energy_law", law, law_limit, law <= law_limit});

  double junction = 0.0, flux = 0.0, outer = 0.0, perp = 0.0;
  bool finite = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    // Curvature conditions hold along the flow, not for raw initial data.
    if (k > 0) {
      const double scale = std::max(std::sqrt(r.kappa_l2_sq) + std::sqrt(r.kappa_s_l2_sq) + std::sqrt(r.kappa_ss_l2_sq),
                                    o.residual_floor);
      junction = std::max(junction, r.res_junction / scale);
      flux = std::max(flux, r.res_flux / scale);
      outer = std::max(outer, r.res_outer / scale);
    }
    perp = std::max(perp, r.res_perp);
    TrajectoryRow copy = r;
    for (double* f : fields(copy)) finite = finite && std::isfinite(*f);
  }
  checks.push_back({"finite_values", finite ? 0.0 : 1.0, 0.0, finite});
  checks.push_back({"junction_residual", junction, o.residual_rel, junction <= o.residual_rel});
  checks.push_back({"flux_residual", flux, o.residual_rel, flux <= o.residual_rel});
  checks.push_back({"robin_residual", outer, o.residual_rel, outer <= o.residual_rel});
  checks.push_back({"perpendicularity", perp, o.perp_tol, perp <= o.perp_tol});
  return checks;
}

}  // namespace tjflow
