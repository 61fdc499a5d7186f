#pragma once

#include <string>

#include "tjflow/linear_stability.hpp"
#include "tjflow/network.hpp"

namespace tjflow {

// Text block `[stationary_network]` with tensions, p, phi, length, h and
// endpoints; floats carry 17 significant digits.
std::string format_network(const StationaryNetwork& network);

// Angles, Q, tangents and normals are rebuilt from tensions and phi.
StationaryNetwork parse_network(const std::string& text);

bool is_network_text(const std::string& text);

void write_network(const StationaryNetwork& network, const std::string& path);
StationaryNetwork read_network(const std::string& path);

// Columns branch, sigma, phi.
void write_eigenfunction(const StationaryNetwork& network, const BranchValues& phi, const std::string& path);

}  // namespace tjflow
