#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tjflow/evolution.hpp"

namespace tjflow {

// One `key = value` line of a sectioned text file.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

// Splits text into entries. `[name]` opens a section; `a.b = v` outside a
// section is read as key b of section a. `#` starts a comment.
std::vector<ConfigEntry> parse_entries(const std::string& text);

struct DomainSpec {
  std::string type = "circle";
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  std::vector<PolynomialTerm> terms;
  std::optional<BoundingBox> bbox;
};

ImplicitDomain make_domain(const DomainSpec& spec);

struct PerturbationSpec {
  // none, cosine, eigenmode or random
  std::string mode = "none";
  double amplitude = 0.0;
  std::array<std::vector<double>, 3> cosine;
  int modes = 4;
};

struct RunConfig {
  DomainSpec domain;
  SurfaceTensions tensions;
  Vec2 guess = Vec2::Zero();
  double phi = 0.0;
  std::optional<double> gauge;
  double steady_tol = 1e-10;
  int steady_max_iter = 50;
  int spectrum_n = 400;
  // dt = 0 selects dt_factor * min(l^i / n)^2 once the network is known.
  EvolveConfig evolve;
  double dt_factor = 0.25;
  PerturbationSpec perturbation;
  std::string output_path = "trajectory.csv";
  std::uint64_t seed = 42;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string read_text_file(const std::string& path);

// Replaces the value of `section.key` (or element k of a list value with
// `section.key[k]`) and returns the edited text; appends the key when absent.
std::string override_config_value(const std::string& text, const std::string& name, const std::string& value);

// Builds the perturbation for the evolution grid; `random` draws cosine
// coefficients from the configured seed.
Perturbation make_perturbation(const RunConfig& config, const StationaryNetwork& network);

// dt from the config or from dt_factor and the grid.
double resolve_dt(const RunConfig& config, const StationaryNetwork& network);

}  // namespace tjflow
