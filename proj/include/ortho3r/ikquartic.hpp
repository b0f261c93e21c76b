#pragma once

#include "ortho3r/model.hpp"

#include <vector>

namespace ortho3r {

namespace tolerance {
// Roots closer than kRootCluster * (1 + |t|) are one cluster.
inline constexpr double kRootCluster = 1e-7;
// Leading coefficient below this fraction of max |coefficient| means a root at theta3 = pi.
inline constexpr double kLeadingDegeneracy = 1e-10;
// Default relative residual accepted by ik().
inline constexpr double kRoundTrip = 1e-9;
}  // namespace tolerance

// P(t) = a t^4 + b t^3 + c t^2 + d t + e with t = tan(theta3 / 2).
struct Quartic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;

  double operator()(double t) const { return (((a * t + b) * t + c) * t + d) * t + e; }
  double derivative(double t) const { return ((4.0 * a * t + 3.0 * b) * t + 2.0 * c) * t + d; }
  double second_derivative(double t) const { return (12.0 * a * t + 6.0 * b) * t + 2.0 * c; }
  double max_abs() const;
  // True when P only contains even powers of t (r2 = 0 manipulators).
  bool even() const { return b == 0.0 && d == 0.0; }
};

struct Root {
  double t = 0.0;
  bool at_infinity = false;  // theta3 = pi
  int multiplicity = 1;

  double theta3() const;
};

struct RootSet {
  std::vector<Root> roots;
  // Every theta3 satisfies the equation (e.g. d3 = r2 = 0 with a matching radius).
  bool all_theta3 = false;

  int total_multiplicity() const;
  bool has_repeated() const;
};

// Elimination of theta1 and theta2 from the forward kinematics for d2 > 0.
// Throws DegenerateElimination when d2 == 0.
Quartic quartic_at(const DesignParams& p, double rho2, double z);

// Real roots of a quartic with clustering and theta3 = pi handling.
RootSet real_roots(const Quartic& q);

// d2 == 0 reduction: A cos(theta3) + B sin(theta3) + C = 0 with
// A = 2 d3 d4, B = 2 r2 d4, C = d3^2 + d4^2 + r2^2 + r3^2 - rho^2 - z^2.
// Throws DegenerateElimination when d2 != 0.
RootSet theta3_candidates(const DesignParams& p, double rho2, double z);

struct IkSolutionSet {
  std::vector<JointConfig> solutions;
  std::vector<double> residuals;
  // Some solutions were merged because the query sits on the singular set.
  bool degenerate = false;
  // A joint is undetermined at this query (continuum of solutions).
  bool continuum = false;

  std::size_t size() const { return solutions.size(); }
  bool empty() const { return solutions.empty(); }
};

// All inverse kinematic solutions of a wrist-center position. An unreachable
// point returns an empty set. Throws InvalidInput for non-finite input.
IkSolutionSet ik(const DesignParams& p, const CartesianPoint& point,
                 double tol = tolerance::kRoundTrip);

// Number of distinct solutions at any point with the given section coordinates.
// A continuum of solutions saturates at 4.
int iks_count(const DesignParams& p, const SectionPoint& s);

// Order of the theta3 root at (rho2, z) counted in the reduced polynomial of the
// manipulator: the quartic in t, its quadratic in t^2 when the quartic is even,
// or the trig-linear equation when d2 = 0. Returns 0 when theta3 is not a root
// within the relative tolerance and caps at 3.
int reduced_root_multiplicity(const DesignParams& p, double rho2, double z, double theta3,
                              double rel_tol);

}  // namespace ortho3r
