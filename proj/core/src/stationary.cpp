#include "tjflow/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tjflow/errors.hpp"

namespace tjflow {

Vec3 steady_residual(const ImplicitDomain& domain, const SurfaceTensions& tensions, const Vec2& p, double phi) {
  const auto tangents = junction_tangents(young_angles(tensions), phi);
  Vec3 r;
  for (int i = 0; i < 3; ++i) {
    const BoundaryHit hit = boundary_hit(domain, p, tangents[static_cast<std::size_t>(i)]);
    const Vec2 g = domain.grad(hit.point);
    r[i] = rot90(tangents[static_cast<std::size_t>(i)]).dot(g / g.norm());
  }
  return r;
}

Vec3 steady_residual(const ImplicitDomain& domain, const SurfaceTensions& tensions, const SteadyGuess& guess) {
  return steady_residual(domain, tensions, guess.p, guess.gauge.value_or(guess.phi));
}

StationaryNetwork build_network(const ImplicitDomain& domain, const SurfaceTensions& tensions, const Vec2& p,
                                double phi) {
  StationaryNetwork net;
  net.tensions = tensions;
  net.angles = young_angles(tensions);
  net.q = junction_matrix(net.angles);
  net.p_star = p;
  net.phi = phi;
  net.tangent = junction_tangents(net.angles, phi);
  for (std::size_t i = 0; i < 3; ++i) {
    net.normal[i] = rot90(net.tangent[i]);
    const BoundaryHit hit = boundary_hit(domain, p, net.tangent[i]);
    net.length[i] = hit.distance;
    net.endpoint[i] = hit.point;
    net.h[i] = boundary_curvature(domain, hit.point);
  }
  return net;
}

namespace {

struct Unknowns {
  bool gauged = false;
  double gauge = 0.0;

  Eigen::VectorXd pack(const SteadyGuess& g) const {
    Eigen::VectorXd x(gauged ? 2 : 3);
    x[0] = g.p.x();
    x[1] = g.p.y();
    if (!gauged) x[2] = g.phi;
    return x;
  }
  Vec2 point(const Eigen::VectorXd& x) const { return {x[0], x[1]}; }
  double angle(const Eigen::VectorXd& x) const { return gauged ? gauge : x[2]; }
};

}  // namespace

StationaryNetwork find_stationary(const ImplicitDomain& domain, const SurfaceTensions& tensions,
                                  const SteadyGuess& guess, const SteadyOptions& options, SteadyReport* report) {
  validate_tensions(tensions);
  Unknowns u;
  u.gauged = guess.gauge.has_value();
  u.gauge = guess.gauge.value_or(0.0);
  Eigen::VectorXd x = u.pack(guess);
  const auto eval = [&](const Eigen::VectorXd& v) { return steady_residual(domain, tensions, u.point(v), u.angle(v)); };

  Vec3 r = eval(x);
  SteadyReport rep;
  for (int it = 0; it <= options.max_iter; ++it) {
    Eigen::MatrixXd jac(3, x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      Eigen::VectorXd xp = x;
      xp[k] += options.fd_step;
      jac.col(k) = (eval(xp) - r) / options.fd_step;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    rep.sigma_max = sv[0];
    rep.sigma_min = sv[sv.size() - 1];
    rep.iterations = it;
    rep.residual = r.lpNorm<Eigen::Infinity>();
    // Columns below the finite-difference noise floor count as zero.
    if (rep.sigma_min < std::max(1e-10 * rep.sigma_max, 1e-8)) {
      std::ostringstream msg;
      msg << "Jacobian is rank deficient (sigma_min = " << rep.sigma_min << ", sigma_max = " << rep.sigma_max
          << "); fix the rotation gauge";
      throw Error(ErrorCode::SingularJacobian, msg.str());
    }
    if (rep.residual < options.tol) {
      if (report) *report = rep;
      return build_network(domain, tensions, u.point(x), u.angle(x));
    }
    if (it == options.max_iter) break;
    const Eigen::VectorXd dx = -svd.solve(r);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= std::ldexp(1.0, -10)) {
      const Eigen::VectorXd trial = x + alpha * dx;
      try {
        const Vec3 rt = eval(trial);
        if (rt.norm() < r.norm()) {
          x = trial;
          r = rt;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoIntersection) throw;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "no convergence after " << rep.iterations << " iterations, residual " << r.lpNorm<Eigen::Infinity>();
  throw Error(ErrorCode::NoConvergence, msg.str());
}

namespace {

double trapezoid_sq(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = (j == 0 || j + 1 == f.size()) ? 0.5 : 1.0;
    s += w * f[j] * f[j];
  }
  return s * h;
}

}  // namespace

double h2_norm(const StationaryNetwork& network, const GraphState& state) {
  double l2 = 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double h = network.length[i] / state.n;
    const double g = network.tensions.gamma[i];
    l2 += g * trapezoid_sq(state.rho[i], h);
    ss += g * trapezoid_sq(grid_derivatives(state.rho[i], h).d2, h);
  }
  return std::sqrt(l2) + std::sqrt(ss);
}

std::vector<RatioSample> h2_ratio_series(const GraphModel& model, const std::vector<GraphState>& states) {
  std::vector<RatioSample> out;
  const auto& net = model.network();
  for (const auto& s : states) {
    const Coefficients co = model.coefficients(s, -std::numeric_limits<double>::infinity());
    double k2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double h = net.length[i] / s.n;
      double acc = 0.0;
      for (std::size_t j = 0; j < co.kappa[i].size(); ++j) {
        const double w = (j == 0 || j + 1 == co.kappa[i].size()) ? 0.5 : 1.0;
        acc += w * co.kappa[i][j] * co.kappa[i][j] * co.J[i][j];
      }
      k2 += net.tensions.gamma[i] * acc * h;
    }
    const double k = std::sqrt(k2);
    if (k <= 1e-12) continue;
    out.push_back({s.t, h2_norm(net, s) / k});
  }
  return out;
}

double h2_bound_check(const GraphModel& model, const std::vector<GraphState>& states) {
  double sup = 0.0;
  for (const auto& r : h2_ratio_series(model, states)) sup = std::max(sup, r.ratio);
  return sup;
}

}  // namespace tjflow
