#pragma once

#include <string>
#include <vector>

#include "tjflow/diagnostics.hpp"
#include "tjflow/linear_stability.hpp"

namespace tjflow {

struct EvolveConfig {
  double dt = 0.0;
  double t_end = 0.0;
  int n = 200;
  double newton_tol = 1e-10;
  int newton_max = 20;
  int output_every = 100;
  double det_m_floor = 0.5;
  // Run stops once max |rho| exceeds this value.
  double max_amplitude = 0.25;
};

struct Perturbation {
  enum class Kind { None, Cosine, Profile };
  Kind kind = Kind::None;
  double amplitude = 0.0;
  // Coefficients c_k of sum_k c_k cos(k pi sigma / l), per branch.
  std::array<std::vector<double>, 3> cosine;
  // Nodal profile scaled to unit maximum before applying the amplitude.
  BranchValues profile;
};

// Eigenfunction of the linearized problem on the evolution grid.
Perturbation eigenmode_perturbation(const StationaryNetwork& network, int n, double amplitude);

GraphState initial_state(const GraphModel& model, const Perturbation& perturbation, const EvolveConfig& config);

// Largest stable step for the explicit parts at this state.
double step_limit(const GraphModel& model, const GraphState& state, double det_floor = 0.5);

GraphState step(const GraphModel& model, const GraphState& state, const EvolveConfig& config);

// Drives the six boundary conditions to tolerance by adjusting rho^i(0) and
// rho^i(l^i); returns false when Newton fails.
bool enforce_boundary_conditions(const GraphModel& model, GraphState& state, double tol, int max_iter);

// max over Sigma gamma rho(0), g12, g13 and the three outer residuals.
double boundary_residual(const GraphModel& model, const GraphState& state);

enum class RunStatus { Completed, DetMFloor, AmplitudeCap, DegenerateMetric, NewtonFailure };

const char* to_string(RunStatus s);

struct Trajectory {
  std::vector<GraphState> states;
  std::vector<DiagnosticsRecord> records;
  RunStatus status = RunStatus::Completed;
  std::string message;
  long steps = 0;
};

// Integrates to t_end with a record every output_every steps, stopping early
// with a typed status when the state leaves the admissible vicinity.
Trajectory run(const GraphModel& model, const GraphState& init, const EvolveConfig& config);

// Junction velocity by differencing Phi(0) between two states.
JunctionVelocities junction_kinematics(const GraphModel& model, const GraphState& before, const GraphState& after);

}  // namespace tjflow
