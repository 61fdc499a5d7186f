#include "tjflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "tjflow/errors.hpp"

namespace tjflow {

namespace {

using boost::math::interpolators::cardinal_cubic_b_spline;
using boost::math::interpolators::pchip;

void fd_first_second(const std::vector<double>& f, double h, std::vector<double>& d1, std::vector<double>& d2) {
  const GridDerivatives d = grid_derivatives(f, h);
  d1 = d.d1;
  d2 = d.d2;
}

// Fourth-order one-sided derivative in the index parameter at either end.
double end_slope(const std::vector<double>& f, bool right) {
  const std::size_t m = f.size();
  const auto at = [&](std::size_t k) { return right ? f[m - 1 - k] : f[k]; };
  const double d = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / 12.0;
  return right ? -d : d;
}

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += (j == 0 || j + 1 == f.size()) ? 0.5 * f[j] : f[j];
  return s * h;
}

}  // namespace

CurveSample resample(const std::vector<Vec2>& points, int nodes) {
  const std::size_t m = points.size();
  if (m < 5) throw Error(ErrorCode::DegenerateCurve, "need at least 5 points to resample");
  std::vector<double> xs(m), ys(m);
  for (std::size_t j = 0; j < m; ++j) {
    xs[j] = points[j].x();
    ys[j] = points[j].y();
  }
  const cardinal_cubic_b_spline<double> sx(xs.data(), m, 0.0, 1.0, end_slope(xs, false), end_slope(xs, true));
  const cardinal_cubic_b_spline<double> sy(ys.data(), m, 0.0, 1.0, end_slope(ys, false), end_slope(ys, true));
  const auto speed = [&](double u) { return std::hypot(sx.prime(u), sy.prime(u)); };

  double chord = 0.0;
  for (std::size_t j = 1; j < m; ++j) chord += (points[j] - points[j - 1]).norm();
  if (!(chord > 0.0)) throw Error(ErrorCode::DegenerateCurve, "curve has zero length");

  std::vector<double> cum(m, 0.0), par(m, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    const double a = static_cast<double>(j - 1);
    cum[j] = cum[j - 1] + boost::math::quadrature::gauss<double, 7>::integrate(speed, a, a + 1.0);
    par[j] = static_cast<double>(j);
    if (!(cum[j] - cum[j - 1] > 1e-8 * chord / static_cast<double>(m)))
      throw Error(ErrorCode::DegenerateCurve, "curve parameterization degenerates");
  }
  const double r = cum.back();
  const double end_speed_0 = speed(0.0);
  const double end_speed_1 = speed(static_cast<double>(m - 1));
  const pchip<std::vector<double>> inverse(std::vector<double>(cum), std::vector<double>(par), 1.0 / end_speed_0,
                                           1.0 / end_speed_1);

  const std::size_t k = nodes > 0 ? static_cast<std::size_t>(nodes) : m;
  if (k < 5) throw Error(ErrorCode::DegenerateCurve, "need at least 5 output nodes");
  CurveSample out;
  out.r = r;
  out.ds = r / static_cast<double>(k - 1);
  out.s.resize(k);
  out.x.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    out.s[j] = out.ds * static_cast<double>(j);
    if (j == 0) {
      out.x[j] = points.front();
    } else if (j + 1 == k) {
      out.s[j] = r;
      out.x[j] = points.back();
    } else {
      const double u = inverse(out.s[j]);
      out.x[j] = {sx(u), sy(u)};
    }
  }

  std::vector<double> px(k), py(k);
  for (std::size_t j = 0; j < k; ++j) {
    px[j] = out.x[j].x();
    py[j] = out.x[j].y();
  }
  std::vector<double> dx, ddx, dy, ddy;
  fd_first_second(px, out.ds, dx, ddx);
  fd_first_second(py, out.ds, dy, ddy);
  out.tangent.resize(k);
  out.normal.resize(k);
  out.kappa.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Vec2 d1(dx[j], dy[j]);
    const Vec2 d2(ddx[j], ddy[j]);
    const double sp = d1.norm();
    if (!(sp > 1e-8)) throw Error(ErrorCode::DegenerateCurve, "vanishing tangent after resampling");
    out.tangent[j] = d1 / sp;
    out.normal[j] = rot90(out.tangent[j]);
    out.kappa[j] = cross(d1, d2) / (sp * sp * sp);
  }
  fd_first_second(out.kappa, out.ds, out.kappa_s, out.kappa_ss);
  return out;
}

NetworkSample sample_network(const GraphModel& model, const GraphState& state) {
  const auto curves = model.curve(state);
  NetworkSample s;
  for (std::size_t i = 0; i < 3; ++i) s[i] = resample(curves[i]);
  return s;
}

double energy(const NetworkSample& sample, const SurfaceTensions& tensions) {
  double e = 0.0;
  for (std::size_t i = 0; i < 3; ++i) e += tensions.gamma[i] * sample[i].r;
  return e;
}

CurvatureNorms curvature_norms(const NetworkSample& sample, const SurfaceTensions& tensions) {
  CurvatureNorms c;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& cs = sample[i];
    const double g = tensions.gamma[i];
    std::vector<double> k2(cs.kappa.size()), k4(cs.kappa.size()), ks2(cs.kappa.size()), kss2(cs.kappa.size());
    for (std::size_t j = 0; j < cs.kappa.size(); ++j) {
      const double k = cs.kappa[j];
      k2[j] = k * k;
      k4[j] = k2[j] * k2[j];
      ks2[j] = cs.kappa_s[j] * cs.kappa_s[j];
      kss2[j] = cs.kappa_ss[j] * cs.kappa_ss[j];
      c.linf = std::max(c.linf, std::abs(k));
    }
    c.l2_sq += g * trapezoid(k2, cs.ds);
    c.l4_4 += g * trapezoid(k4, cs.ds);
    c.s_l2_sq += g * trapezoid(ks2, cs.ds);
    c.ss_l2_sq += g * trapezoid(kss2, cs.ds);
  }
  return c;
}

JunctionVelocities velocities_from_curvature(const NetworkSample& sample) {
  Eigen::Matrix<double, 3, 2> a;
  Vec3 b;
  for (int i = 0; i < 3; ++i) {
    const auto& cs = sample[static_cast<std::size_t>(i)];
    a.row(i) = cs.normal.front().transpose();
    b[i] = cs.kappa.front();
  }
  JunctionVelocities jv;
  jv.p_rate = a.colPivHouseholderQr().solve(b);
  for (int i = 0; i < 3; ++i) {
    const auto& cs = sample[static_cast<std::size_t>(i)];
    jv.V[i] = cs.kappa.front();
    jv.v[i] = jv.p_rate.dot(cs.tangent.front());
  }
  return jv;
}

ResidualBlock junction_and_robin_residuals(const NetworkSample& sample, const SurfaceTensions& tensions,
                                           const ImplicitDomain& domain, const JunctionVelocities& velocities) {
  ResidualBlock r;
  double sk = 0.0;
  double sv = 0.0;
  std::array<double, 3> flux{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& cs = sample[i];
    const auto ii = static_cast<Eigen::Index>(i);
    sk += tensions.gamma[i] * cs.kappa.front();
    sv += tensions.gamma[i] * velocities.v[ii];
    flux[i] = cs.kappa_s.front() + cs.kappa.front() * velocities.v[ii];
    const Vec2 end = cs.x.back();
    const double h = boundary_curvature(domain, end);
    r.outer = std::max(r.outer, std::abs(cs.kappa_s.back() + h * cs.kappa.back()));
    const Vec2 g = domain.grad(end);
    r.perp = std::max(r.perp, std::abs(cs.normal.back().dot(g / g.norm())));
  }
  r.junction_kappa = std::abs(sk);
  r.sum_v = std::abs(sv);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) r.flux = std::max(r.flux, std::abs(flux[i] - flux[j]));
  return r;
}

DiagnosticsRecord make_record(const GraphModel& model, const GraphState& state, const JunctionVelocities* kinematic) {
  const auto& net = model.network();
  const NetworkSample sample = sample_network(model, state);
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.E = energy(sample, net.tensions);
  rec.kappa = curvature_norms(sample, net.tensions);
  rec.res = junction_and_robin_residuals(sample, net.tensions, model.domain(), velocities_from_curvature(sample));
  if (kinematic) {
    // Kinematic tangential speeds against Q applied to the flow law V = kappa.
    Vec3 v_flow;
    for (int i = 0; i < 3; ++i) v_flow[i] = sample[static_cast<std::size_t>(i)].kappa.front();
    rec.vqv = (kinematic->v - net.q.q * v_flow).norm();
  }
  rec.p = sample[0].x.front();
  for (int i = 0; i < 3; ++i) rec.h[i] = boundary_curvature(model.domain(), sample[static_cast<std::size_t>(i)].x.back());
  rec.mu = state.mu;
  return rec;
}

std::vector<double> energy_law_residual(const std::vector<DiagnosticsRecord>& records) {
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 < records.size(); ++k) {
    const double dt = records[k + 1].t - records[k - 1].t;
    if (!(dt > 0.0)) continue;
    const double de = (records[k + 1].E - records[k - 1].E) / dt;
    out.push_back(std::abs(de + records[k].kappa.l2_sq));
  }
  return out;
}

namespace {

DecayFit fit_points(const std::vector<double>& t, const std::vector<double>& y) {
  const int n = static_cast<int>(t.size());
  if (n < 2) throw Error(ErrorCode::NonPositiveSeries, "fewer than two positive samples in the fit window");
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k) {
    a(k, 0) = 1.0;
    a(k, 1) = t[static_cast<std::size_t>(k)];
    b[k] = std::log(y[static_cast<std::size_t>(k)]);
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = b - a * c;
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  DecayFit f;
  f.intercept = c[0];
  f.rate = c[1];
  f.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  f.points = n;
  return f;
}

}  // namespace

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& series, double window) {
  if (t.size() != series.size()) throw Error(ErrorCode::ValidationError, "time and series lengths differ");
  std::vector<double> tt, yy;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (series[k] > 1e-12) {
      tt.push_back(t[k]);
      yy.push_back(series[k]);
    }
  const std::size_t keep = static_cast<std::size_t>(std::ceil(window * static_cast<double>(tt.size())));
  const std::size_t start = tt.size() - std::min(keep, tt.size());
  return fit_points(std::vector<double>(tt.begin() + static_cast<std::ptrdiff_t>(start), tt.end()),
                    std::vector<double>(yy.begin() + static_cast<std::ptrdiff_t>(start), yy.end()));
}

DecayFit decay_fit_range(const std::vector<double>& t, const std::vector<double>& series, double t0, double t1) {
  std::vector<double> tt, yy;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= t0 && t[k] <= t1) {
      if (!(series[k] > 0.0)) throw Error(ErrorCode::NonPositiveSeries, "non-positive value in the fit window");
      tt.push_back(t[k]);
      yy.push_back(series[k]);
    }
  return fit_points(tt, yy);
}

}  // namespace tjflow
