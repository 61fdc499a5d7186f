#include <algorithm>
#include <cmath>

#include "tjflow/errors.hpp"
#include "tjflow/network.hpp"

namespace tjflow {

StationaryNetwork abstract_network(const SurfaceTensions& tensions, const std::array<double, 3>& length,
                                   const std::array<double, 3>& h) {
  StationaryNetwork net;
  net.tensions = tensions;
  net.angles = young_angles(tensions);
  net.q = junction_matrix(net.angles);
  net.tangent = junction_tangents(net.angles, 0.0);
  for (int i = 0; i < 3; ++i) {
    if (!(length[i] > 0.0)) throw Error(ErrorCode::ValidationError, "branch lengths must be positive");
    net.normal[i] = rot90(net.tangent[i]);
    net.length[i] = length[i];
    net.h[i] = h[i];
    net.endpoint[i] = net.reference_point(i, length[i]);
  }
  return net;
}

NetworkCheck check_network(const StationaryNetwork& network, const ImplicitDomain& domain) {
  NetworkCheck c;
  c.force_balance = force_balance_residual(network.tangent, network.tensions);
  for (int i = 0; i < 3; ++i) {
    const Vec2 x = network.reference_point(i, network.length[i]);
    const LevelSetJet j = domain.jet(x);
    c.endpoint_psi = std::max(c.endpoint_psi, std::abs(j.value));
    c.perpendicularity = std::max(c.perpendicularity, std::abs(network.normal[i].dot(j.grad / j.grad.norm())));
    const int a = (i + 1) % 3;
    const int b = (i + 2) % 3;
    const double angle = std::acos(std::clamp(network.tangent[a].dot(network.tangent[b]), -1.0, 1.0));
    c.angle_error = std::max(c.angle_error, std::abs(angle - network.angles.theta[i]));
  }
  return c;
}

GraphState GraphState::zero(int n) {
  GraphState s;
  s.n = n;
  for (auto& r : s.rho) r.assign(static_cast<std::size_t>(n) + 1, 0.0);
  return s;
}

double GraphState::max_abs() const {
  double m = 0.0;
  for (const auto& r : rho)
    for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

double d1_start(const std::vector<double>& f, double h) { return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h); }

double d1_end(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  return (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
}

double d2_start(const std::vector<double>& f, double h) {
  return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
}

double d2_end(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  return (2.0 * f[n] - 5.0 * f[n - 1] + 4.0 * f[n - 2] - f[n - 3]) / (h * h);
}

GridDerivatives grid_derivatives(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  if (m < 4) throw Error(ErrorCode::ValidationError, "grid needs at least 4 nodes");
  GridDerivatives d;
  d.d1.resize(m);
  d.d2.resize(m);
  const double ih2 = 1.0 / (h * h);
  for (std::size_t j = 1; j + 1 < m; ++j) {
    d.d1[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    d.d2[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) * ih2;
  }
  d.d1[0] = d1_start(f, h);
  d.d2[0] = d2_start(f, h);
  d.d1[m - 1] = d1_end(f, h);
  d.d2[m - 1] = d2_end(f, h);
  return d;
}

}  // namespace tjflow
