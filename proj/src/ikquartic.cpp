#include "ortho3r/ikquartic.hpp"

#include "ortho3r/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ortho3r {

double Quartic::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), std::abs(e)});
}

double Root::theta3() const {
  return at_infinity ? std::numbers::pi : normalize_angle(2.0 * std::atan(t));
}

int RootSet::total_multiplicity() const {
  int total = 0;
  for (const Root& r : roots) total += r.multiplicity;
  return total;
}

bool RootSet::has_repeated() const {
  return std::any_of(roots.begin(), roots.end(), [](const Root& r) { return r.multiplicity > 1; });
}

Quartic quartic_at(const DesignParams& p, double rho2, double z) {
  if (p.d2 == 0.0) throw DegenerateElimination("quartic elimination divides by 2 d2; use theta3_candidates for d2 = 0");

  const double k_base = rho2 + z * z - p.d2 * p.d2 - p.r3 * p.r3 - p.d3 * p.d3 - p.d4 * p.d4 - p.r2 * p.r2;
  // K (1 + t^2) with K = k_base - 2 d4 (d3 cos + r2 sin)
  const double k2 = k_base + 2.0 * p.d4 * p.d3;
  const double k1 = -4.0 * p.d4 * p.r2;
  const double k0 = k_base - 2.0 * p.d4 * p.d3;
  // L (1 + t^2)
  const double l2 = p.d3 - p.d4;
  const double l0 = p.d3 + p.d4;
  const double m = p.r3 * p.r3 - z * z;
  const double w = 4.0 * p.d2 * p.d2;

  Quartic q;
  q.a = k2 * k2 - w * (l2 * l2 + m);
  q.b = 2.0 * k2 * k1;
  q.c = k1 * k1 + 2.0 * k2 * k0 - w * (2.0 * l2 * l0 + 2.0 * m);
  q.d = 2.0 * k1 * k0;
  q.e = k0 * k0 - w * (l0 * l0 + m);
  return q;
}

namespace {

bool close_roots(double a, double b) {
  return std::abs(a - b) <= tolerance::kRootCluster * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Merges sorted finite candidates into clusters.
std::vector<Root> cluster(std::vector<Root> roots) {
  std::sort(roots.begin(), roots.end(), [](const Root& l, const Root& r) { return l.t < r.t; });
  std::vector<Root> merged;
  for (const Root& r : roots) {
    if (!merged.empty() && close_roots(merged.back().t, r.t)) {
      Root& m = merged.back();
      const double total = m.multiplicity + r.multiplicity;
      m.t = (m.t * m.multiplicity + r.t * r.multiplicity) / total;
      m.multiplicity += r.multiplicity;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

// Real roots of c[0] x^n + ... + c[n] (leading coefficient nonzero) with
// near-real complex pairs folded onto the real axis.
std::vector<double> polynomial_real_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) {
    out.push_back(-c[1] / c[0]);
    return out;
  }
  if (n == 2) {
    const double disc = c[1] * c[1] - 4.0 * c[0] * c[2];
    const double centre = -c[1] / (2.0 * c[0]);
    const double half_gap = std::sqrt(std::abs(disc)) / (2.0 * std::abs(c[0]));
    if (disc < 0.0) {
      if (half_gap <= 0.5 * tolerance::kRootCluster * (1.0 + std::abs(centre))) {
        out.push_back(centre);
        out.push_back(centre);
      }
      return out;
    }
    // Cancellation-free form.
    const double qv = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
    if (qv == 0.0) {
      out.push_back(0.0);
      out.push_back(0.0);
      return out;
    }
    out.push_back(qv / c[0]);
    out.push_back(c[2] / qv);
    return out;
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -c[j + 1] / c[0];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& ev = solver.eigenvalues();

  auto eval = [&](double x) {
    double v = 0.0;
    for (double coef : c) v = v * x + coef;
    return v;
  };
  auto deriv = [&](double x) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v = v * x + c[i] * (n - i);
    return v;
  };

  for (int i = 0; i < n; ++i) {
    const double re = ev[i].real();
    const double im = ev[i].imag();
    // Complex pairs this close to the axis are a perturbed repeated real root.
    if (std::abs(im) > std::sqrt(tolerance::kRootCluster) * (1.0 + std::abs(re))) continue;
    double x = re;
    double fx = eval(x);
    for (int it = 0; it < 6; ++it) {
      const double dfx = deriv(x);
      if (dfx == 0.0) break;
      const double nx = x - fx / dfx;
      const double nf = eval(nx);
      if (!(std::abs(nf) < std::abs(fx))) break;
      x = nx;
      fx = nf;
    }
    if (std::abs(im) > 0.0) {
      // Keep the pair only if the real part is (nearly) a real root.
      double scale = 0.0;
      double xp = 1.0;
      for (int k = n; k >= 0; --k) {
        scale += std::abs(c[k]) * xp;
        xp *= std::abs(x);
      }
      if (std::abs(fx) > 1e-10 * scale) continue;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

RootSet real_roots(const Quartic& q) {
  RootSet set;
  const double scale = q.max_abs();
  if (scale == 0.0) {
    set.all_theta3 = true;
    return set;
  }
  const double degenerate = tolerance::kLeadingDegeneracy * scale;
  std::vector<Root> finite;
  int at_infinity = 0;

  if (q.even()) {
    // a u^2 + c u + e with u = t^2
    std::vector<double> coeffs{q.a / scale, q.c / scale, q.e / scale};
    while (coeffs.size() > 1 && std::abs(coeffs.front()) * scale <= degenerate) {
      coeffs.erase(coeffs.begin());
      at_infinity += 2;
    }
    for (double u : polynomial_real_roots(coeffs)) {
      const double half_gap = 0.5 * tolerance::kRootCluster;
      if (u > 0.0) {
        const double t = std::sqrt(u);
        finite.push_back({t, false, 1});
        finite.push_back({-t, false, 1});
      } else if (std::sqrt(-u) <= half_gap) {
        finite.push_back({0.0, false, 2});
      }
    }
  } else {
    std::vector<double> coeffs{q.a / scale, q.b / scale, q.c / scale, q.d / scale, q.e / scale};
    while (coeffs.size() > 1 && std::abs(coeffs.front()) * scale <= degenerate) {
      coeffs.erase(coeffs.begin());
      ++at_infinity;
    }
    for (double t : polynomial_real_roots(coeffs)) finite.push_back({t, false, 1});
  }

  std::vector<Root> merged = cluster(std::move(finite));
  if (at_infinity > 0) {
    Root inf{0.0, true, at_infinity};
    std::vector<Root> kept;
    for (const Root& r : merged) {
      // |t| this large is theta3 = pi within the clustering tolerance.
      if (std::abs(r.t) * tolerance::kRootCluster >= 1.0) {
        inf.multiplicity += r.multiplicity;
      } else {
        kept.push_back(r);
      }
    }
    merged = std::move(kept);
    merged.push_back(inf);
  }
  set.roots = std::move(merged);
  return set;
}

RootSet theta3_candidates(const DesignParams& p, double rho2, double z) {
  if (p.d2 != 0.0) throw DegenerateElimination("trig-linear reduction only holds for d2 = 0");
  RootSet set;
  const double A = 2.0 * p.d3 * p.d4;
  const double B = 2.0 * p.r2 * p.d4;
  const double C = p.d3 * p.d3 + p.d4 * p.d4 + p.r2 * p.r2 + p.r3 * p.r3 - rho2 - z * z;
  const double amplitude = std::hypot(A, B);
  const double scale = p.d3 * p.d3 + p.d4 * p.d4 + p.r2 * p.r2 + p.r3 * p.r3 + std::abs(rho2) + z * z;

  if (amplitude <= 1e-14 * scale) {
    if (std::abs(C) <= 1e-12 * scale) set.all_theta3 = true;
    return set;
  }
  const double ratio = -C / amplitude;
  const double phase = std::atan2(B, A);
  auto make_root = [](double theta, int mult) {
    const double th = normalize_angle(theta);
    if (std::abs(th - std::numbers::pi) <= tolerance::kRootCluster) return Root{0.0, true, mult};
    return Root{std::tan(0.5 * th), false, mult};
  };
  if (std::abs(ratio) > 1.0 + 1e-14) return set;
  if (std::abs(ratio) >= 1.0 - 1e-14) {
    set.roots.push_back(make_root(ratio > 0.0 ? phase : phase + std::numbers::pi, 2));
    return set;
  }
  const double spread = std::acos(ratio);
  Root r1 = make_root(phase + spread, 1);
  Root r2 = make_root(phase - spread, 1);
  std::vector<Root> finite;
  std::vector<Root> out;
  for (const Root& r : {r1, r2}) (r.at_infinity ? out : finite).push_back(r);
  finite = cluster(std::move(finite));
  finite.insert(finite.end(), out.begin(), out.end());
  set.roots = std::move(finite);
  return set;
}

namespace {

double residual_of(const DesignParams& p, const JointConfig& q, const CartesianPoint& target) {
  return (fk(p, q).point.vector() - target.vector()).norm();
}

// Gauss-Newton clean-up on the full position map; never makes things worse.
JointConfig polish(const DesignParams& p, JointConfig q, const CartesianPoint& target, double& residual) {
  residual = residual_of(p, q, target);
  for (int it = 0; it < 4 && residual > 0.0; ++it) {
    const Eigen::Vector3d err = fk(p, q).point.vector() - target.vector();
    const Eigen::Matrix3d jac = jacobian(p, q);
    const Eigen::Vector3d step = jac.completeOrthogonalDecomposition().solve(err);
    if (!step.allFinite()) break;
    const JointConfig next(q.theta1() - step[0], q.theta2() - step[1], q.theta3() - step[2]);
    const double next_res = residual_of(p, next, target);
    if (!(next_res < residual)) break;
    q = next;
    residual = next_res;
  }
  return q;
}

// Newton on F(theta3) = K^2 - 4 d2^2 (L^2 + r3^2 - z^2), the trig form of the quartic.
double polish_theta3(const DesignParams& p, double rho2, double z, double theta3) {
  const double k_base = rho2 + z * z - p.d2 * p.d2 - p.r3 * p.r3 - p.d3 * p.d3 - p.d4 * p.d4 - p.r2 * p.r2;
  const double w = 4.0 * p.d2 * p.d2;
  auto eval = [&](double th, double& dval) {
    const double c3 = std::cos(th);
    const double s3 = std::sin(th);
    const double K = k_base - 2.0 * p.d4 * (p.d3 * c3 + p.r2 * s3);
    const double dK = -2.0 * p.d4 * (-p.d3 * s3 + p.r2 * c3);
    const double L = p.d3 + p.d4 * c3;
    const double dL = -p.d4 * s3;
    dval = 2.0 * K * dK - w * 2.0 * L * dL;
    return K * K - w * (L * L + p.r3 * p.r3 - z * z);
  };
  double dval = 0.0;
  double fval = eval(theta3, dval);
  for (int it = 0; it < 8 && fval != 0.0; ++it) {
    if (dval == 0.0) break;
    const double next = theta3 - fval / dval;
    double nd = 0.0;
    const double nf = eval(next, nd);
    if (!(std::abs(nf) < std::abs(fval))) break;
    theta3 = next;
    fval = nf;
    dval = nd;
  }
  return theta3;
}

struct ArmCandidate {
  double theta2;
  double theta3;
  double X;
  double Y;
  bool merged;
  bool free_theta2;
};

}  // namespace

IkSolutionSet ik(const DesignParams& p, const CartesianPoint& point, double tol) {
  p.validate();
  if (!std::isfinite(point.x) || !std::isfinite(point.y) || !std::isfinite(point.z)) {
    throw InvalidInput("ik: query point must be finite");
  }
  if (!(tol > 0.0)) throw InvalidInput("ik: tolerance must be positive");

  IkSolutionSet out;
  const double rho2 = point.x * point.x + point.y * point.y;
  const double z = point.z;
  const double reach = p.reach_bound();
  if (rho2 + z * z > reach * reach * (1.0 + 1e-9)) return out;

  std::vector<ArmCandidate> arms;
  const double length_scale = reach;

  if (p.d2 > 0.0) {
    const RootSet roots = real_roots(quartic_at(p, rho2, z));
    if (roots.all_theta3) {
      out.continuum = true;
      return out;
    }
    for (const Root& r : roots.roots) {
      const double theta3 = r.at_infinity ? std::numbers::pi : polish_theta3(p, rho2, z, r.theta3());
      const double c3 = std::cos(theta3);
      const double s3 = std::sin(theta3);
      const double L = p.d3 + p.d4 * c3;
      const double Y = p.r2 + p.d4 * s3;
      const double K = rho2 + z * z - p.d2 * p.d2 - p.r3 * p.r3 - L * L - Y * Y;
      const double u = K / (2.0 * p.d2);
      const bool free_theta2 = std::hypot(L, p.r3) <= 1e-12 * length_scale;
      const double theta2 = free_theta2 ? 0.0 : std::atan2(p.r3, L) - std::atan2(z, u);
      arms.push_back({theta2, theta3, p.d2 + u, Y, r.multiplicity > 1, free_theta2});
    }
  } else {
    const RootSet roots = theta3_candidates(p, rho2, z);
    if (roots.all_theta3) {
      out.continuum = true;
      return out;
    }
    const double merge_x = tolerance::kRootCluster * length_scale;
    for (const Root& r : roots.roots) {
      const double theta3 = r.theta3();
      const double c3 = std::cos(theta3);
      const double s3 = std::sin(theta3);
      const double L = p.d3 + p.d4 * c3;
      const double Y = p.r2 + p.d4 * s3;
      const double x2 = rho2 - Y * Y;
      const bool free_theta2 = std::hypot(L, p.r3) <= 1e-12 * length_scale;
      if (x2 < -merge_x * merge_x) continue;
      const double X = std::sqrt(std::max(0.0, x2));
      const bool repeated = r.multiplicity > 1;
      if (X <= merge_x) {
        const double theta2 = free_theta2 ? 0.0 : std::atan2(p.r3, L) - std::atan2(z, 0.0);
        arms.push_back({theta2, theta3, 0.0, Y, true, free_theta2});
        continue;
      }
      for (double sx : {X, -X}) {
        const double theta2 = free_theta2 ? 0.0 : std::atan2(p.r3, L) - std::atan2(z, sx);
        arms.push_back({theta2, theta3, sx, Y, repeated, free_theta2});
      }
    }
  }

  const double accept = tol * (1.0 + point.vector().norm());
  const bool on_axis = std::sqrt(rho2) <= 1e-12 * length_scale;
  for (const ArmCandidate& arm : arms) {
    const bool free_theta1 = on_axis && std::hypot(arm.X, arm.Y) <= 1e-12 * length_scale;
    const double theta1 = free_theta1 ? 0.0 : std::atan2(point.y, point.x) - std::atan2(arm.Y, arm.X);
    double residual = 0.0;
    JointConfig q = polish(p, JointConfig(theta1, arm.theta2, arm.theta3), point, residual);
    if (residual > accept) continue;
    bool duplicate = false;
    for (const JointConfig& existing : out.solutions) {
      if (existing.distance(q) <= tolerance::kRootCluster * 10.0) duplicate = true;
    }
    if (duplicate) {
      out.degenerate = true;
      continue;
    }
    out.degenerate = out.degenerate || arm.merged;
    out.continuum = out.continuum || arm.free_theta2 || free_theta1;
    out.solutions.push_back(q);
    out.residuals.push_back(residual);
  }
  return out;
}

int iks_count(const DesignParams& p, const SectionPoint& s) {
  const IkSolutionSet set = ik(p, CartesianPoint{s.rho, 0.0, s.z});
  if (set.continuum && set.size() < 4) return 4;
  return static_cast<int>(std::min<std::size_t>(set.size(), 4));
}

int reduced_root_multiplicity(const DesignParams& p, double rho2, double z, double theta3, double rel_tol) {
  // Successive derivatives of the reduced equation, each against its own magnitude scale.
  std::array<double, 3> value{};
  std::array<double, 3> scale{};

  if (p.d2 == 0.0) {
    const double A = 2.0 * p.d3 * p.d4;
    const double B = 2.0 * p.r2 * p.d4;
    const double C = p.d3 * p.d3 + p.d4 * p.d4 + p.r2 * p.r2 + p.r3 * p.r3 - rho2 - z * z;
    const double c3 = std::cos(theta3);
    const double s3 = std::sin(theta3);
    const double amp = std::hypot(A, B);
    value = {A * c3 + B * s3 + C, -A * s3 + B * c3, -(A * c3 + B * s3)};
    scale = {amp + std::abs(C), amp, amp};
  } else {
    const Quartic q = quartic_at(p, rho2, z);
    const double qs = q.max_abs();
    if (qs == 0.0) return 3;
    if (q.even()) {
      // Quadratic in u = t^2 (or in 1/u when theta3 is near pi).
      const double t = std::tan(0.5 * theta3);
      const bool flip = std::abs(t) > 1.0;
      const double u = flip ? 1.0 / (t * t) : t * t;
      const double hi = flip ? q.e : q.a;
      const double mid = q.c;
      const double lo = flip ? q.a : q.e;
      value = {(hi * u + mid) * u + lo, 2.0 * hi * u + mid, 2.0 * hi};
      scale = {qs * (1.0 + u + u * u), qs * (1.0 + u), qs};
    } else {
      const double t = std::tan(0.5 * theta3);
      const bool flip = std::abs(t) > 1.0;
      const Quartic r = flip ? Quartic{q.e, q.d, q.c, q.b, q.a} : q;
      const double x = flip ? 1.0 / t : t;
      const double ax = std::abs(x);
      value = {r(x), r.derivative(x), r.second_derivative(x)};
      scale = {qs * (1.0 + ax + ax * ax + ax * ax * ax + ax * ax * ax * ax),
               qs * (1.0 + 2 * ax + 3 * ax * ax + 4 * ax * ax * ax),
               qs * (2.0 + 6 * ax + 12 * ax * ax)};
    }
  }
  int order = 0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(value[k]) > rel_tol * scale[k]) break;
    ++order;
  }
  return order;
}

}  // namespace ortho3r
