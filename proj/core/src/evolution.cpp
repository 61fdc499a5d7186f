#include "tjflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tjflow/errors.hpp"

namespace tjflow {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr double kFdStep = 1e-7;

Vec6 bc_vector(const GraphModel& model, const GraphState& s) {
  const auto& net = model.network();
  const Vec3 rho0 = s.rho0();
  const Vec3 mu = net.q.q * rho0;
  Vec3 slope0;
  for (int i = 0; i < 3; ++i) slope0[i] = d1_start(s.rho[static_cast<std::size_t>(i)], model.spacing(i, s.n));
  Vec6 f;
  f[0] = net.tensions.vec().dot(rho0);
  f.segment<2>(1) = model.junction_residuals(rho0, slope0, mu);
  for (int i = 0; i < 3; ++i) {
    const auto& r = s.rho[static_cast<std::size_t>(i)];
    f[3 + i] = model.chart(i).outer_residual(r.back(), d1_end(r, model.spacing(i, s.n)), mu[i]);
  }
  return f;
}

double& boundary_value(GraphState& s, int k) {
  auto& r = s.rho[static_cast<std::size_t>(k % 3)];
  return k < 3 ? r.front() : r.back();
}

void project_constraint(const StationaryNetwork& net, GraphState& s) {
  const Vec3 g = net.tensions.vec();
  const Vec3 rho0 = s.rho0();
  const Vec3 fixed = rho0 - (g.dot(rho0) / g.squaredNorm()) * g;
  for (std::size_t i = 0; i < 3; ++i) s.rho[i].front() = fixed[static_cast<Eigen::Index>(i)];
  s.mu = net.q.q * fixed;
}

// Smooth first-order fix of raw initial data: the constraint shift uses a
// weight that is flat at both ends, the outer condition rho_s + h rho = 0 a
// bump with zero value and slope at the junction. The boundary Newton sweep
// then only removes second-order remainders, so no grid-scale kink appears.
void make_compatible(const GraphModel& model, GraphState& s) {
  const auto& net = model.network();
  const std::size_t m = static_cast<std::size_t>(s.n) + 1;
  const Vec3 g = net.tensions.vec();
  const Vec3 shift = (g.dot(s.rho0()) / g.squaredNorm()) * g;
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double l = net.length[ii];
    const double h = model.spacing(i, s.n);
    std::vector<double> bump(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double x = std::numbers::pi * static_cast<double>(j) / s.n;
      s.rho[ii][j] -= shift[i] * 0.5 * (1.0 + std::cos(x));
      bump[j] = (static_cast<double>(j) * h - l) * 0.5 * (1.0 - std::cos(x));
    }
    const double hb = net.h[ii];
    const double r = d1_end(s.rho[ii], h) + hb * s.rho[ii].back();
    const double rb = d1_end(bump, h) + hb * bump.back();
    for (std::size_t j = 0; j < m; ++j) s.rho[ii][j] -= (r / rb) * bump[j];
  }
}

// Thomas algorithm; lower[0] and upper[m-1] are ignored.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t m = diag.size();
  std::vector<double> c(m), d(m);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t j = 1; j < m; ++j) {
    const double den = diag[j] - lower[j] * c[j - 1];
    c[j] = (j + 1 < m) ? upper[j] / den : 0.0;
    d[j] = (rhs[j] - lower[j] * d[j - 1]) / den;
  }
  rhs[m - 1] = d[m - 1];
  for (std::size_t j = m - 1; j-- > 0;) rhs[j] = d[j] - c[j] * rhs[j + 1];
}

}  // namespace

double boundary_residual(const GraphModel& model, const GraphState& state) {
  return bc_vector(model, state).lpNorm<Eigen::Infinity>();
}

bool enforce_boundary_conditions(const GraphModel& model, GraphState& state, double tol, int max_iter) {
  const auto& net = model.network();
  Vec6 f = bc_vector(model, state);
  for (int it = 0; it <= max_iter; ++it) {
    if (f.lpNorm<Eigen::Infinity>() <= tol) {
      project_constraint(net, state);
      return true;
    }
    if (it == max_iter) break;
    Mat6 jac;
    for (int k = 0; k < 6; ++k) {
      GraphState probe = state;
      boundary_value(probe, k) += kFdStep;
      jac.col(k) = (bc_vector(model, probe) - f) / kFdStep;
    }
    const Vec6 dx = -jac.partialPivLu().solve(f);
    if (!dx.allFinite()) return false;
    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 10 && !accepted; ++half, alpha *= 0.5) {
      GraphState trial = state;
      for (int k = 0; k < 6; ++k) boundary_value(trial, k) += alpha * dx[k];
      try {
        const Vec6 ft = bc_vector(model, trial);
        if (ft.lpNorm<Eigen::Infinity>() < f.lpNorm<Eigen::Infinity>()) {
          state = std::move(trial);
          f = ft;
          accepted = true;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) return false;
  }
  return false;
}

Perturbation eigenmode_perturbation(const StationaryNetwork& network, int n, double amplitude) {
  Perturbation p;
  p.kind = Perturbation::Kind::Profile;
  p.amplitude = amplitude;
  p.profile = max_eigenvalue(network, n).eigenfunction;
  return p;
}

GraphState initial_state(const GraphModel& model, const Perturbation& perturbation, const EvolveConfig& config) {
  const auto& net = model.network();
  const int n = config.n;
  if (n < 4) throw Error(ErrorCode::ValidationError, "need at least 4 intervals per branch");
  GraphState s = GraphState::zero(n);
  if (perturbation.kind == Perturbation::Kind::Cosine) {
    for (std::size_t i = 0; i < 3; ++i) {
      const double l = net.length[i];
      for (std::size_t j = 0; j <= static_cast<std::size_t>(n); ++j) {
        const double sigma = l * static_cast<double>(j) / n;
        double v = 0.0;
        for (std::size_t k = 0; k < perturbation.cosine[i].size(); ++k)
          v += perturbation.cosine[i][k] * std::cos(static_cast<double>(k) * std::numbers::pi * sigma / l);
        s.rho[i][j] = perturbation.amplitude * v;
      }
    }
  } else if (perturbation.kind == Perturbation::Kind::Profile) {
    double peak = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (perturbation.profile[i].size() != static_cast<std::size_t>(n) + 1)
        throw Error(ErrorCode::ValidationError, "perturbation profile does not match the grid");
      for (double v : perturbation.profile[i]) peak = std::max(peak, std::abs(v));
    }
    if (!(peak > 0.0)) throw Error(ErrorCode::ValidationError, "perturbation profile is zero");
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j <= static_cast<std::size_t>(n); ++j)
        s.rho[i][j] = perturbation.amplitude * perturbation.profile[i][j] / peak;
  }
  if (perturbation.kind == Perturbation::Kind::Cosine) make_compatible(model, s);
  project_constraint(net, s);
  if (perturbation.kind != Perturbation::Kind::None &&
      !enforce_boundary_conditions(model, s, config.newton_tol, config.newton_max))
    throw Error(ErrorCode::CompatibilityFailed, "boundary Newton correction of the initial data did not converge");
  model.coefficients(s, config.det_m_floor);
  return s;
}

double step_limit(const GraphModel& model, const GraphState& state, double det_floor) {
  const Coefficients co = model.coefficients(state, det_floor);
  double lim = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double h = model.spacing(i, state.n);
    const double amax = *std::max_element(co.a[static_cast<std::size_t>(i)].begin(), co.a[static_cast<std::size_t>(i)].end());
    lim = std::min(lim, 0.5 * h * h / amax);
  }
  return lim;
}

GraphState step(const GraphModel& model, const GraphState& state, const EvolveConfig& config) {
  const auto& net = model.network();
  const int n = state.n;
  const double dt = config.dt;
  if (n < 4) throw Error(ErrorCode::ValidationError, "need at least 4 intervals per branch");
  const Coefficients co = model.coefficients(state, config.det_m_floor);

  for (int i = 0; i < 3; ++i) {
    const double h = model.spacing(i, n);
    const auto& a = co.a[static_cast<std::size_t>(i)];
    const double amax = *std::max_element(a.begin(), a.end());
    if (dt > 0.5 * h * h / amax * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "dt = " << dt << " exceeds the step-size guard " << 0.5 * h * h / amax;
      throw Error(ErrorCode::CflViolation, msg.str());
    }
  }

  Vec3 lk0;
  for (std::size_t i = 0; i < 3; ++i) lk0[static_cast<Eigen::Index>(i)] = co.L[i][0] * co.kappa[i][0];
  const Vec3 mu_t = net.q.q * co.M.partialPivLu().solve(lk0);

  const std::size_t m = static_cast<std::size_t>(n);
  std::array<std::vector<double>, 3> w, z;
  Vec3 alpha, beta, slope_old;
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto& rho = state.rho[ii];
    const double h = model.spacing(i, n);
    const double ih2 = 1.0 / (h * h);
    const GridDerivatives d = grid_derivatives(rho, h);
    slope_old[i] = d.d1[0];

    // Unknowns u_1..u_n stored at index j - 1.
    std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0), rw(m, 0.0), rz(m, 0.0);
    for (std::size_t j = 1; j < m; ++j) {
      const double aj = co.a[ii][j];
      const double explicit_part = co.L[ii][j] * co.kappa[ii][j] - aj * d.d2[j] + co.Lambda[ii][j] * mu_t[i];
      const double c = dt * aj * ih2;
      lower[j - 1] = -c;
      diag[j - 1] = 1.0 + 2.0 * c;
      upper[j - 1] = -c;
      rw[j - 1] = rho[j] + dt * explicit_part;
    }
    // The junction value enters row 1 through lower[0].
    rz[0] = -lower[0];

    // Outer condition linearized about the current state.
    const auto& chart = model.chart(i);
    const double mu_i = state.mu[i];
    const double r0 = chart.outer_residual(rho[m], d.d1[m], mu_i);
    const double r_rho = (chart.outer_residual(rho[m] + kFdStep, d.d1[m], mu_i) - r0) / kFdStep;
    const double r_slope = (chart.outer_residual(rho[m], d.d1[m] + kFdStep, mu_i) - r0) / kFdStep;
    double cn = r_rho + 3.0 * r_slope / (2.0 * h);
    double cn1 = -4.0 * r_slope / (2.0 * h);
    const double cn2 = r_slope / (2.0 * h);
    double rhs_n = -r0 + r_rho * rho[m] + r_slope * d.d1[m];
    double rhs_nz = 0.0;
    // Remove u_{n-2} with row n-1 to keep the system tridiagonal.
    const double f = cn2 / lower[m - 2];
    cn1 -= f * diag[m - 2];
    cn -= f * upper[m - 2];
    rhs_n -= f * rw[m - 2];
    rhs_nz -= f * rz[m - 2];
    lower[m - 1] = cn1;
    diag[m - 1] = cn;
    rw[m - 1] = rhs_n;
    rz[m - 1] = rhs_nz;

    solve_tridiagonal(lower, diag, upper, rw);
    solve_tridiagonal(lower, diag, upper, rz);
    w[ii] = std::move(rw);
    z[ii] = std::move(rz);
    alpha[i] = (4.0 * w[ii][0] - w[ii][1]) / (2.0 * h);
    beta[i] = (-3.0 + 4.0 * z[ii][0] - z[ii][1]) / (2.0 * h);
  }

  // Junction values from the linearized junction conditions.
  const Vec3 s0 = state.rho0();
  const auto g_of = [&](const Vec3& r0, const Vec3& sl) { return model.junction_residuals(r0, sl, net.q.q * r0); };
  const Vec2 g0 = g_of(s0, slope_old);
  Eigen::Matrix<double, 2, 3> j_rho, j_slope;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = kFdStep;
    j_rho.col(k) = (g_of(s0 + e, slope_old) - g0) / kFdStep;
    j_slope.col(k) = (g_of(s0, slope_old + e) - g0) / kFdStep;
  }
  Mat3 a;
  Vec3 b;
  a.row(0) = net.tensions.vec().transpose();
  b[0] = 0.0;
  a.bottomRows<2>() = j_rho + j_slope * beta.asDiagonal();
  b.tail<2>() = -g0 + j_rho * s0 - j_slope * (alpha - slope_old);
  const Vec3 sj = a.fullPivLu().solve(b);
  if (!sj.allFinite()) throw Error(ErrorCode::NewtonDiverged, "singular linearized junction system");

  GraphState next = GraphState::zero(n);
  for (std::size_t i = 0; i < 3; ++i) {
    const double si = sj[static_cast<Eigen::Index>(i)];
    next.rho[i][0] = si;
    for (std::size_t j = 1; j <= m; ++j) next.rho[i][j] = w[i][j - 1] + si * z[i][j - 1];
  }
  next.mu = net.q.q * next.rho0();
  next.t = state.t + dt;
  if (!enforce_boundary_conditions(model, next, config.newton_tol, config.newton_max))
    throw Error(ErrorCode::NewtonDiverged, "boundary Newton sweep did not reach newton_tol");
  return next;
}

JunctionVelocities junction_kinematics(const GraphModel& model, const GraphState& before, const GraphState& after) {
  const auto junction = [&](const GraphState& s) {
    Vec2 p = Vec2::Zero();
    for (int i = 0; i < 3; ++i) p += model.chart(i).map(0.0, s.rho[static_cast<std::size_t>(i)].front(), s.mu[i]);
    return Vec2(p / 3.0);
  };
  JunctionVelocities jv;
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) return jv;
  jv.p_rate = (junction(after) - junction(before)) / dt;
  for (int i = 0; i < 3; ++i) {
    const auto& r = after.rho[static_cast<std::size_t>(i)];
    const Vec2 t = model.chart(i).curve_velocity(0.0, r.front(), d1_start(r, model.spacing(i, after.n)), after.mu[i]).normalized();
    jv.V[i] = jv.p_rate.dot(rot90(t));
    jv.v[i] = jv.p_rate.dot(t);
  }
  return jv;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::DetMFloor: return "DetMFloor";
    case RunStatus::AmplitudeCap: return "AmplitudeCap";
    case RunStatus::DegenerateMetric: return "DegenerateMetric";
    case RunStatus::NewtonFailure: return "NewtonFailure";
  }
  return "Unknown";
}

Trajectory run(const GraphModel& model, const GraphState& init, const EvolveConfig& config) {
  if (!(config.dt > 0.0)) throw Error(ErrorCode::ValidationError, "dt must be positive");
  if (config.output_every < 1) throw Error(ErrorCode::ValidationError, "output_every must be at least 1");
  Trajectory tr;
  tr.states.push_back(init);
  tr.records.push_back(make_record(model, init));
  const long total = std::lround(config.t_end / config.dt);
  GraphState prev = init;
  GraphState cur = init;
  bool recorded = true;
  const auto record = [&]() {
    const JunctionVelocities kin = junction_kinematics(model, prev, cur);
    tr.states.push_back(cur);
    tr.records.push_back(make_record(model, cur, &kin));
    recorded = true;
  };
  for (long k = 1; k <= total; ++k) {
    GraphState next;
    try {
      next = step(model, cur, config);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::MatrixMNotInvertible: tr.status = RunStatus::DetMFloor; break;
        case ErrorCode::DegenerateMetric:
        case ErrorCode::OffsetMissesBoundary: tr.status = RunStatus::DegenerateMetric; break;
        case ErrorCode::NewtonDiverged: tr.status = RunStatus::NewtonFailure; break;
        default: throw;
      }
      tr.message = e.what();
      if (!recorded) record();
      return tr;
    }
    prev = std::move(cur);
    cur = std::move(next);
    recorded = false;
    tr.steps = k;
    if (cur.max_abs() > config.max_amplitude) {
      tr.status = RunStatus::AmplitudeCap;
      std::ostringstream msg;
      msg << "max |rho| = " << cur.max_abs() << " exceeded the amplitude cap " << config.max_amplitude << " at t = " << cur.t;
      tr.message = msg.str();
      record();
      return tr;
    }
    if (k % config.output_every == 0 || k == total) record();
  }
  tr.status = RunStatus::Completed;
  return tr;
}

}  // namespace tjflow
