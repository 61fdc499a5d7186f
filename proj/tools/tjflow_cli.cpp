#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tjflow/config.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/evolution.hpp"
#include "tjflow/linear_stability.hpp"
#include "tjflow/network_io.hpp"
#include "tjflow/stationary.hpp"
#include "tjflow/trajectory_io.hpp"

namespace {

using namespace tjflow;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitViolation = 3;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

StationaryNetwork solve_network(const RunConfig& config, const ImplicitDomain& domain, SteadyReport* report) {
  SteadyGuess guess;
  guess.p = config.guess;
  guess.phi = config.phi;
  guess.gauge = config.gauge;
  SteadyOptions options;
  options.tol = config.steady_tol;
  options.max_iter = config.steady_max_iter;
  return find_stationary(domain, config.tensions, guess, options, report);
}

void print_spectrum(const StationaryNetwork& net, const SpectrumResult& spec) {
  const auto verdict = stability_criterion(net.length, net.h, net.tensions);
  std::cout << "lambda_max = " << num(spec.lambda_max) << "\n";
  std::cout << "n = " << spec.n << "\n";
  std::cout << "criterion_value = " << num(verdict.criterion_value) << "\n";
  std::cout << "criterion_case = " << to_string(verdict.which) << "\n";
  std::cout << "verdict = " << to_string(verdict.verdict) << "\n";
}

int cmd_steady(const std::string& path, const std::string& out) {
  const RunConfig config = load_config(path);
  const ImplicitDomain domain = make_domain(config.domain);
  SteadyReport report;
  const StationaryNetwork net = solve_network(config, domain, &report);
  const NetworkCheck check = check_network(net, domain);
  std::cout << format_network(net);
  std::cout << "[report]\n";
  std::cout << "iterations = " << report.iterations << "\n";
  std::cout << "residual = " << num(report.residual) << "\n";
  std::cout << "force_balance = " << num(check.force_balance) << "\n";
  std::cout << "endpoint_psi = " << num(check.endpoint_psi) << "\n";
  std::cout << "perpendicularity = " << num(check.perpendicularity) << "\n";
  if (!out.empty()) write_network(net, out);
  return kExitOk;
}

int cmd_spectrum(const std::string& path, int n, const std::string& eig_path) {
  const std::string text = read_text_file(path);
  StationaryNetwork net;
  int grid = n;
  if (is_network_text(text)) {
    net = parse_network(text);
    if (grid <= 0) grid = 400;
  } else {
    const RunConfig config = parse_config(text);
    net = solve_network(config, make_domain(config.domain), nullptr);
    if (grid <= 0) grid = config.spectrum_n;
  }
  const SpectrumResult spec = max_eigenvalue(net, grid);
  print_spectrum(net, spec);
  if (!eig_path.empty()) {
    write_eigenfunction(net, spec.eigenfunction, eig_path);
    std::cout << "eigenfunction = " << eig_path << "\n";
  }
  return kExitOk;
}

int cmd_evolve(const std::string& path, const std::string& out_override) {
  RunConfig config = load_config(path);
  const ImplicitDomain domain = make_domain(config.domain);
  const StationaryNetwork net = solve_network(config, domain, nullptr);
  const GraphModel model(net, domain);
  config.evolve.dt = resolve_dt(config, net);
  const GraphState init = initial_state(model, make_perturbation(config, net), config.evolve);
  const Trajectory traj = run(model, init, config.evolve);
  const std::string out = out_override.empty() ? config.output_path : out_override;
  write_trajectory(to_rows(traj.records), out);
  std::cout << "status = " << to_string(traj.status) << "\n";
  if (!traj.message.empty()) std::cout << "message = " << traj.message << "\n";
  std::cout << "steps = " << traj.steps << "\n";
  std::cout << "dt = " << num(config.evolve.dt) << "\n";
  std::cout << "t = " << num(traj.records.empty() ? 0.0 : traj.records.back().t) << "\n";
  std::cout << "records = " << traj.records.size() << "\n";
  std::cout << "trajectory = " << out << "\n";
  return traj.status == RunStatus::Completed ? kExitOk : kExitNumerical;
}

int cmd_verify(const std::string& path, const VerifyOptions& options) {
  const auto rows = read_trajectory(path);
  const auto checks = verify_trajectory(rows, options);
  bool ok = true;
  std::cout << "records = " << rows.size() << "\n";
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << num(c.value) << " limit=" << num(c.limit)
              << "\n";
    ok = ok && c.pass;
  }
  return ok ? kExitOk : kExitViolation;
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto a = tok.find_first_not_of(" \t");
    const auto b = tok.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values, int n) {
  const std::string text = read_text_file(path);
  const auto list = split_values(values);
  if (list.empty()) throw Error(ErrorCode::ValidationError, "--values: empty list");
  int code = kExitOk;
  std::cout << "value,lambda_max,criterion_value,verdict,status\n";
  for (const auto& v : list) {
    const RunConfig config = parse_config(override_config_value(text, param, v));
    try {
      const StationaryNetwork net = solve_network(config, make_domain(config.domain), nullptr);
      const SpectrumResult spec = max_eigenvalue(net, n > 0 ? n : config.spectrum_n);
      const auto verdict = stability_criterion(net.length, net.h, net.tensions);
      std::cout << v << "," << num(spec.lambda_max) << "," << num(verdict.criterion_value) << ","
                << to_string(verdict.verdict) << ",ok\n";
    } catch (const Error& e) {
      if (is_input_error(e.code())) throw;
      std::cout << v << ",nan,nan,-," << to_string(e.code()) << "\n";
      code = kExitNumerical;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triple-junction curvature flow in planar domains"};
  app.require_subcommand(1);

  std::string config_path, network_out, eig_path, traj_out, traj_path, param, values;
  int spectrum_n = 0;
  VerifyOptions verify_opts;

  auto* steady = app.add_subcommand("steady", "Solve for the stationary network");
  steady->add_option("config", config_path, "Config file")->required();
  steady->add_option("--out", network_out, "Write the network block to this file");

  auto* spectrum = app.add_subcommand("spectrum", "Largest eigenvalue of the linearized problem");
  spectrum->add_option("input", config_path, "Config file or network block")->required();
  spectrum->add_option("--n", spectrum_n, "Elements per branch");
  eig_path = "eigenfunction.csv";
  spectrum->add_option("--eigenfunction", eig_path, "Eigenfunction CSV path")->capture_default_str();

  auto* evolve = app.add_subcommand("evolve", "Evolve a perturbed stationary network");
  evolve->add_option("config", config_path, "Config file")->required();
  evolve->add_option("--out", traj_out, "Trajectory CSV path (overrides output.path)");

  auto* verify = app.add_subcommand("verify", "Check a trajectory CSV");
  verify->add_option("trajectory", traj_path, "Trajectory CSV")->required();
  verify
      ->add_option("--residual-rel", verify_opts.residual_rel,
                   "Junction, flux and Robin residual limit relative to the curvature scale")
      ->capture_default_str();
  verify->add_option("--perp-tol", verify_opts.perp_tol, "Perpendicularity limit")->capture_default_str();
  verify->add_option("--energy-law-rel", verify_opts.energy_law_rel, "Energy law limit relative to max ||kappa||^2")
      ->capture_default_str();
  verify->add_option("--energy-slack", verify_opts.energy_slack, "Allowed energy increase between records")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Spectrum and verdict over a parameter list");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("--param", param, "section.key or section.key[index]")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--n", spectrum_n, "Elements per branch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (steady->parsed()) return cmd_steady(config_path, network_out);
    if (spectrum->parsed()) return cmd_spectrum(config_path, spectrum_n, eig_path);
    if (evolve->parsed()) return cmd_evolve(config_path, traj_out);
    if (verify->parsed()) return cmd_verify(traj_path, verify_opts);
    if (sweep->parsed()) return cmd_sweep(config_path, param, values, spectrum_n);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInput : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
