#pragma once

#include <Eigen/Core>

#include <optional>
#include <string_view>

namespace ortho3r {

// Lengths of a 3R orthogonal arm in modified DH form. The twists are fixed
// at alpha2 = -90 deg and alpha3 = +90 deg and are not stored.
struct DesignParams {
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  // Throws InvalidInput unless all lengths are finite, nonnegative and d4 > 0.
  void validate() const;

  // Upper bound on the distance from the base origin to the wrist center.
  double reach_bound() const { return d2 + d3 + d4 + r2 + r3; }

  DesignParams scaled(double factor) const {
    return {d2 * factor, d3 * factor, d4 * factor, r2 * factor, r3 * factor};
  }

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

enum class FamilyCase { A, B, C, D, E, F, G, H, I, J };

inline constexpr FamilyCase kAllFamilies[] = {
    FamilyCase::A, FamilyCase::B, FamilyCase::C, FamilyCase::D, FamilyCase::E,
    FamilyCase::F, FamilyCase::G, FamilyCase::H, FamilyCase::I, FamilyCase::J};

char family_letter(FamilyCase c);
std::optional<FamilyCase> parse_family(std::string_view text);

// Zero-pattern of (d2, r2, d3, r3) for a case: false = must be zero, true = strictly positive.
struct ZeroPattern {
  bool d2, r2, d3, r3;
};
ZeroPattern zero_pattern(FamilyCase c);

// Exact zero test, the inputs are design values. Throws OutOfFamily when the
// pattern is not one of the ten cases (d2 > 0 and r2 > 0, or d2 = r2 = d3 = 0).
FamilyCase family_case(const DesignParams& p);

// Wraps into (-pi, pi]. Idempotent.
double normalize_angle(double a);

class JointConfig {
public:
  JointConfig() = default;
  JointConfig(double theta1, double theta2, double theta3)
      : t1_(normalize_angle(theta1)), t2_(normalize_angle(theta2)), t3_(normalize_angle(theta3)) {}

  double theta1() const { return t1_; }
  double theta2() const { return t2_; }
  double theta3() const { return t3_; }

  Eigen::Vector3d vector() const { return {t1_, t2_, t3_}; }

  // Largest wrapped per-joint difference.
  double distance(const JointConfig& other) const;

private:
  double t1_ = 0.0;
  double t2_ = 0.0;
  double t3_ = 0.0;
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vector() const { return {x, y, z}; }
  double norm() const { return vector().norm(); }
};

// Half cross-section coordinates, rho = sqrt(x^2 + y^2).
struct SectionPoint {
  double rho = 0.0;
  double z = 0.0;
};

struct FkResult {
  CartesianPoint point;
  SectionPoint section;
};

FkResult fk(const DesignParams& p, const JointConfig& q);

// Position Jacobian d(x, y, z)/d(theta1, theta2, theta3).
Eigen::Matrix3d jacobian(const DesignParams& p, const JointConfig& q);

// (rho^2, z) and their partials in (theta2, theta3). theta1 does not enter.
struct SectionJet {
  double rho2 = 0.0;
  double z = 0.0;
  double drho2_dt2 = 0.0;
  double drho2_dt3 = 0.0;
  double dz_dt2 = 0.0;
  double dz_dt3 = 0.0;

  double determinant() const { return drho2_dt2 * dz_dt3 - drho2_dt3 * dz_dt2; }
};

SectionJet section_jet(const DesignParams& p, double theta2, double theta3);

// det d(rho^2, z)/d(theta2, theta3). Together with rho = 0 its zero set is the
// position singularity locus.
double reduced_singularity(const DesignParams& p, double theta2, double theta3);

}  // namespace ortho3r
