#include "tjflow/linear_stability.hpp"

#include <cmath>
#include <limits>

#include "tjflow/errors.hpp"

namespace tjflow {

StabilityForms assemble_forms(const StationaryNetwork& network, int n) {
  if (n < 1) throw Error(ErrorCode::ValidationError, "need at least one element per branch");
  const int m = n + 1;
  StabilityForms f;
  f.n = n;
  f.K.resize(3 * m, 3 * m);
  f.B.resize(3 * m, 3 * m);
  f.constraint = Eigen::RowVectorXd::Zero(3 * m);
  std::vector<Eigen::Triplet<double>> kt;
  std::vector<Eigen::Triplet<double>> bt;
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double g = network.tensions.gamma[ii];
    const double h = network.length[ii] / n;
    const int base = i * m;
    for (int e = 0; e < n; ++e) {
      const int a = base + e;
      const int b = a + 1;
      const double k = g / h;
      const double md = g * h / 3.0;
      const double mo = g * h / 6.0;
      kt.emplace_back(a, a, k);
      kt.emplace_back(b, b, k);
      kt.emplace_back(a, b, -k);
      kt.emplace_back(b, a, -k);
      bt.emplace_back(a, a, md);
      bt.emplace_back(b, b, md);
      bt.emplace_back(a, b, mo);
      bt.emplace_back(b, a, mo);
    }
    kt.emplace_back(base + n, base + n, g * network.h[ii]);
    f.constraint[base] = g;
  }
  f.K.setFromTriplets(kt.begin(), kt.end());
  f.B.setFromTriplets(bt.begin(), bt.end());
  return f;
}

namespace {

// Tridiagonal pencil K - mu B on one branch: diag[j], off[j] couples j and j + 1.
struct BranchPencil {
  std::vector<double> kd, ko, bd, bo;
};

struct TreePencil {
  std::array<BranchPencil, 3> branch;
  Eigen::Matrix<double, 3, 2> z;
  int n = 0;
};

TreePencil build_pencil(const StationaryNetwork& network, int n) {
  TreePencil p;
  p.n = n;
  for (std::size_t i = 0; i < 3; ++i) {
    const double g = network.tensions.gamma[i];
    const double h = network.length[i] / n;
    auto& b = p.branch[i];
    b.kd.assign(static_cast<std::size_t>(n) + 1, 2.0 * g / h);
    b.bd.assign(static_cast<std::size_t>(n) + 1, 4.0 * g * h / 6.0);
    b.ko.assign(static_cast<std::size_t>(n), -g / h);
    b.bo.assign(static_cast<std::size_t>(n), g * h / 6.0);
    b.kd.front() = b.kd.back() = g / h;
    b.bd.front() = b.bd.back() = 2.0 * g * h / 6.0;
    b.kd.back() += g * network.h[i];
  }
  // Orthonormal basis of the plane gamma . x = 0.
  const Vec3 gv = network.tensions.vec().normalized();
  Vec3 seed = Vec3::UnitX();
  if (std::abs(gv.dot(seed)) > 0.9) seed = Vec3::UnitY();
  const Vec3 e1 = (seed - seed.dot(gv) * gv).normalized();
  const Vec3 e2 = gv.cross(e1);
  p.z.col(0) = e1;
  p.z.col(1) = e2;
  return p;
}

double safe_pivot(double d, double scale) {
  const double tiny = 1e-300 + std::numeric_limits<double>::epsilon() * scale;
  if (std::abs(d) < tiny) return d < 0.0 ? -tiny : tiny;
  return d;
}

int negatives_2x2(const Eigen::Matrix2d& s) {
  const double tr = s.trace();
  const double det = s.determinant();
  if (det < 0.0) return 1;
  if (det > 0.0) return tr < 0.0 ? 2 : 0;
  return tr < 0.0 ? 1 : 0;
}

// Eliminates each branch from its outer end and returns the junction Schur
// diagonal; counts negative pivots on the way.
int sturm_count(const TreePencil& p, double mu) {
  int count = 0;
  Vec3 s;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& b = p.branch[i];
    const std::size_t n = static_cast<std::size_t>(p.n);
    const double scale = std::abs(b.kd[1]) + std::abs(mu * b.bd[1]);
    double d = safe_pivot(b.kd[n] - mu * b.bd[n], scale);
    if (d < 0.0) ++count;
    for (std::size_t j = n - 1; j >= 1; --j) {
      const double off = b.ko[j] - mu * b.bo[j];
      d = safe_pivot(b.kd[j] - mu * b.bd[j] - off * off / d, scale);
      if (d < 0.0) ++count;
    }
    const double off0 = b.ko[0] - mu * b.bo[0];
    s[static_cast<Eigen::Index>(i)] = b.kd[0] - mu * b.bd[0] - off0 * off0 / d;
  }
  const Eigen::Matrix2d schur = p.z.transpose() * s.asDiagonal() * p.z;
  return count + negatives_2x2(schur);
}

// Solves (K - mu B) x = r on the constrained space; r is given in full
// coordinates and only its projection acts at the junction.
BranchValues constrained_solve(const TreePencil& p, double mu, const BranchValues& r) {
  const std::size_t n = static_cast<std::size_t>(p.n);
  std::array<std::vector<double>, 3> dpiv, y;
  Vec3 s, t;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& b = p.branch[i];
    const double scale = std::abs(b.kd[1]) + std::abs(mu * b.bd[1]);
    dpiv[i].assign(n + 1, 0.0);
    y[i].assign(n + 1, 0.0);
    dpiv[i][n] = safe_pivot(b.kd[n] - mu * b.bd[n], scale);
    y[i][n] = r[i][n];
    for (std::size_t j = n - 1; j >= 1; --j) {
      const double off = b.ko[j] - mu * b.bo[j];
      dpiv[i][j] = safe_pivot(b.kd[j] - mu * b.bd[j] - off * off / dpiv[i][j + 1], scale);
      y[i][j] = r[i][j] - off * y[i][j + 1] / dpiv[i][j + 1];
    }
    const double off0 = b.ko[0] - mu * b.bo[0];
    s[static_cast<Eigen::Index>(i)] = b.kd[0] - mu * b.bd[0] - off0 * off0 / dpiv[i][1];
    t[static_cast<Eigen::Index>(i)] = r[i][0] - off0 * y[i][1] / dpiv[i][1];
  }
  const Eigen::Matrix2d schur = p.z.transpose() * s.asDiagonal() * p.z;
  const Eigen::Vector2d rhs = p.z.transpose() * t;
  Eigen::Vector2d yj = schur.fullPivLu().solve(rhs);
  if (!yj.allFinite()) yj = schur.completeOrthogonalDecomposition().solve(rhs);
  const Vec3 x0 = p.z * yj;
  BranchValues x;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& b = p.branch[i];
    x[i].assign(n + 1, 0.0);
    x[i][0] = x0[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 1; j <= n; ++j) {
      const double off = b.ko[j - 1] - mu * b.bo[j - 1];
      x[i][j] = (y[i][j] - off * x[i][j - 1]) / dpiv[i][j];
    }
  }
  return x;
}

BranchValues apply_tridiag(const TreePencil& p, const BranchValues& x, bool mass) {
  BranchValues out;
  const std::size_t n = static_cast<std::size_t>(p.n);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& b = p.branch[i];
    const auto& d = mass ? b.bd : b.kd;
    const auto& o = mass ? b.bo : b.ko;
    out[i].assign(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
      double v = d[j] * x[i][j];
      if (j > 0) v += o[j - 1] * x[i][j - 1];
      if (j < n) v += o[j] * x[i][j + 1];
      out[i][j] = v;
    }
  }
  return out;
}

double inner(const BranchValues& a, const BranchValues& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) s += a[i][j] * b[i][j];
  return s;
}

void scale(BranchValues& a, double c) {
  for (auto& v : a)
    for (double& x : v) x *= c;
}

}  // namespace

int eigenvalue_count_below(const StationaryNetwork& network, int n, double mu) {
  return sturm_count(build_pencil(network, n), mu);
}

SpectrumResult max_eigenvalue(const StationaryNetwork& network, int n) {
  if (n < 8) throw Error(ErrorCode::ValidationError, "need at least 8 elements per branch");
  const TreePencil p = build_pencil(network, n);

  double lo = -1.0;
  double hi = 1.0;
  int guard = 0;
  while (sturm_count(p, lo) > 0) {
    lo *= 2.0;
    if (++guard > 200) throw Error(ErrorCode::EigenSolveFailed, "no lower bound for the spectrum");
  }
  guard = 0;
  while (sturm_count(p, hi) < 1) {
    hi = 2.0 * hi + 1.0;
    if (++guard > 200) throw Error(ErrorCode::EigenSolveFailed, "no upper bound for the spectrum");
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(p, mid) >= 1) hi = mid; else lo = mid;
  }
  const double mu1 = 0.5 * (lo + hi);

  // Inverse iteration at the bisected shift.
  BranchValues x;
  for (std::size_t i = 0; i < 3; ++i) {
    x[i].assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t j = 0; j <= static_cast<std::size_t>(n); ++j)
      x[i][j] = 1.0 + 0.37 * static_cast<double>(i) + 0.11 * std::cos(0.7 * static_cast<double>(j + 3 * i));
  }
  for (int it = 0; it < 6; ++it) {
    x = constrained_solve(p, mu1, apply_tridiag(p, x, true));
    const double nb = std::sqrt(inner(x, apply_tridiag(p, x, true)));
    if (!(nb > 0.0) || !std::isfinite(nb)) throw Error(ErrorCode::EigenSolveFailed, "inverse iteration broke down");
    scale(x, 1.0 / nb);
  }
  double largest = 0.0;
  for (const auto& v : x)
    for (double e : v)
      if (std::abs(e) > std::abs(largest)) largest = e;
  if (largest < 0.0) scale(x, -1.0);

  SpectrumResult out;
  out.n = n;
  out.lambda_max = -mu1;
  out.eigenfunction = x;
  out.rayleigh = -inner(x, apply_tridiag(p, x, false)) / inner(x, apply_tridiag(p, x, true));
  if (!std::isfinite(out.lambda_max) || !std::isfinite(out.rayleigh))
    throw Error(ErrorCode::EigenSolveFailed, "non-finite eigenvalue");
  return out;
}

double criterion_expression(const std::array<double, 3>& l, const std::array<double, 3>& h,
                            const SurfaceTensions& tensions) {
  double v = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3;
    const std::size_t k = (i + 2) % 3;
    v += tensions.gamma[i] * (1.0 + l[i] * h[i]) * h[j] * h[k];
  }
  return v;
}

StabilityVerdict stability_criterion(const std::array<double, 3>& l, const std::array<double, 3>& h,
                                     const SurfaceTensions& tensions, double marginal_band) {
  for (double li : l)
    if (!(li > 0.0)) throw Error(ErrorCode::ValidationError, "branch lengths must be positive");
  StabilityVerdict v;
  v.marginal_band = marginal_band;
  v.criterion_value = criterion_expression(l, h, tensions);
  int non_positive = 0;
  for (double hi : h)
    if (hi <= 0.0) ++non_positive;
  if (non_positive == 0) {
    v.which = CriterionCase::AllPositive;
    v.verdict = Verdict::Stable;
  } else if (non_positive == 1) {
    v.which = CriterionCase::OneNonPositive;
    if (v.criterion_value > marginal_band) v.verdict = Verdict::Stable;
    else if (v.criterion_value < -marginal_band) v.verdict = Verdict::Unstable;
    else v.verdict = Verdict::Marginal;
  } else {
    v.which = CriterionCase::TwoOrMoreNonPositive;
    v.verdict = Verdict::Unstable;
  }
  return v;
}

double rayleigh_quotient(const StationaryNetwork& network, const BranchValues& phi) {
  const int n = static_cast<int>(phi[0].size()) - 1;
  if (n < 1 || phi[1].size() != phi[0].size() || phi[2].size() != phi[0].size())
    throw Error(ErrorCode::ValidationError, "branch profiles must share one grid size");
  const TreePencil p = build_pencil(network, n);
  const double den = inner(phi, apply_tridiag(p, phi, true));
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroFunction, "phi has zero L2 norm");
  return inner(phi, apply_tridiag(p, phi, false)) / den;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Marginal: return "Marginal";
  }
  return "Unknown";
}

const char* to_string(CriterionCase c) {
  switch (c) {
    case CriterionCase::AllPositive: return "all_positive";
    case CriterionCase::OneNonPositive: return "one_non_positive";
    case CriterionCase::TwoOrMoreNonPositive: return "two_or_more_non_positive";
  }
  return "unknown";
}

}  // namespace tjflow
