#include "ortho3r/model.hpp"

#include "ortho3r/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ortho3r {

void DesignParams::validate() const {
  const double values[] = {d2, d3, d4, r2, r3};
  const char* names[] = {"d2", "d3", "d4", "r2", "r3"};
  for (int i = 0; i < 5; ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw InvalidInput(fmt::format("{} must be a finite nonnegative length, got {}", names[i], values[i]));
    }
  }
  if (d4 <= 0.0) {
    throw InvalidInput("d4 must be strictly positive (with d4 = 0 every posture is singular)");
  }
}

char family_letter(FamilyCase c) { return static_cast<char>('A' + static_cast<int>(c)); }

std::optional<FamilyCase> parse_family(std::string_view text) {
  if (text.size() != 1) return std::nullopt;
  const char ch = text[0];
  const char upper = (ch >= 'a' && ch <= 'z') ? static_cast<char>(ch - 'a' + 'A') : ch;
  if (upper < 'A' || upper > 'J') return std::nullopt;
  return static_cast<FamilyCase>(upper - 'A');
}

ZeroPattern zero_pattern(FamilyCase c) {
  switch (c) {
    case FamilyCase::A: return {false, true, true, false};
    case FamilyCase::B: return {false, false, true, false};
    case FamilyCase::C: return {false, true, false, false};
    case FamilyCase::D: return {true, false, true, false};
    case FamilyCase::E: return {true, false, false, false};
    case FamilyCase::F: return {false, true, true, true};
    case FamilyCase::G: return {false, false, true, true};
    case FamilyCase::H: return {false, true, false, true};
    case FamilyCase::I: return {true, false, true, true};
    case FamilyCase::J: return {true, false, false, true};
  }
  return {};
}

FamilyCase family_case(const DesignParams& p) {
  p.validate();
  const ZeroPattern actual{p.d2 != 0.0, p.r2 != 0.0, p.d3 != 0.0, p.r3 != 0.0};
  if (actual.d2 && actual.r2) {
    throw OutOfFamily(
        "d2 > 0 and r2 > 0: no null d2/r2 parameter, outside the ten zero-pattern cases");
  }
  for (FamilyCase c : kAllFamilies) {
    const ZeroPattern z = zero_pattern(c);
    if (z.d2 == actual.d2 && z.r2 == actual.r2 && z.d3 == actual.d3 && z.r3 == actual.r3) return c;
  }
  throw OutOfFamily("d2 = r2 = d3 = 0: the distal links collapse onto one axis; not one of the ten cases");
}

double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

double JointConfig::distance(const JointConfig& other) const {
  const double d1 = std::abs(normalize_angle(t1_ - other.t1_));
  const double d2 = std::abs(normalize_angle(t2_ - other.t2_));
  const double d3 = std::abs(normalize_angle(t3_ - other.t3_));
  return std::max({d1, d2, d3});
}

namespace {

struct ArmTerms {
  double c2, s2, c3, s3;
  double L, X, Y, Z;
};

ArmTerms arm_terms(const DesignParams& p, double theta2, double theta3) {
  ArmTerms t{};
  t.c2 = std::cos(theta2);
  t.s2 = std::sin(theta2);
  t.c3 = std::cos(theta3);
  t.s3 = std::sin(theta3);
  t.L = p.d3 + p.d4 * t.c3;
  t.X = p.d2 + t.c2 * t.L + t.s2 * p.r3;
  t.Y = p.r2 + p.d4 * t.s3;
  t.Z = t.c2 * p.r3 - t.s2 * t.L;
  return t;
}

}  // namespace

FkResult fk(const DesignParams& p, const JointConfig& q) {
  const ArmTerms t = arm_terms(p, q.theta2(), q.theta3());
  const double c1 = std::cos(q.theta1());
  const double s1 = std::sin(q.theta1());
  FkResult r;
  r.point = {c1 * t.X - s1 * t.Y, s1 * t.X + c1 * t.Y, t.Z};
  r.section = {std::hypot(t.X, t.Y), t.Z};
  return r;
}

Eigen::Matrix3d jacobian(const DesignParams& p, const JointConfig& q) {
  const ArmTerms t = arm_terms(p, q.theta2(), q.theta3());
  const double c1 = std::cos(q.theta1());
  const double s1 = std::sin(q.theta1());

  const double x = c1 * t.X - s1 * t.Y;
  const double y = s1 * t.X + c1 * t.Y;

  const double X2 = -t.s2 * t.L + t.c2 * p.r3;
  const double Z2 = -t.s2 * p.r3 - t.c2 * t.L;
  const double L3 = -p.d4 * t.s3;
  const double X3 = t.c2 * L3;
  const double Y3 = p.d4 * t.c3;
  const double Z3 = -t.s2 * L3;

  Eigen::Matrix3d j;
  j << -y, c1 * X2, c1 * X3 - s1 * Y3,
        x, s1 * X2, s1 * X3 + c1 * Y3,
      0.0, Z2, Z3;
  return j;
}

SectionJet section_jet(const DesignParams& p, double theta2, double theta3) {
  const ArmTerms t = arm_terms(p, theta2, theta3);
  const double X2 = -t.s2 * t.L + t.c2 * p.r3;
  const double Z2 = -t.s2 * p.r3 - t.c2 * t.L;
  const double L3 = -p.d4 * t.s3;
  const double X3 = t.c2 * L3;
  const double Y3 = p.d4 * t.c3;
  const double Z3 = -t.s2 * L3;

  SectionJet jet;
  jet.rho2 = t.X * t.X + t.Y * t.Y;
  jet.z = t.Z;
  jet.drho2_dt2 = 2.0 * t.X * X2;
  jet.drho2_dt3 = 2.0 * (t.X * X3 + t.Y * Y3);
  jet.dz_dt2 = Z2;
  jet.dz_dt3 = Z3;
  return jet;
}

double reduced_singularity(const DesignParams& p, double theta2, double theta3) {
  return section_jet(p, theta2, theta3).determinant();
}

}  // namespace ortho3r
