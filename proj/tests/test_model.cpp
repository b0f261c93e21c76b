#include "oracles.hpp"

#include "ortho3r/errors.hpp"
#include "ortho3r/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ortho3r;

TEST_SUITE("model") {
  TEST_CASE("family_case maps each zero pattern to its letter") {
    CHECK(family_case({0, 2, 1.5, 1, 0}) == FamilyCase::A);
    CHECK(family_case({1, 0, 2, 0, 1}) == FamilyCase::J);
    CHECK(family_case({0, 2, 1, 0, 0}) == FamilyCase::B);
    CHECK(family_case({0, 0, 2, 1.5, 0}) == FamilyCase::C);
    CHECK(family_case({1, 1.4, 0.7, 0, 0}) == FamilyCase::D);
    CHECK(family_case({1, 0, 1.5, 0, 0}) == FamilyCase::E);
    CHECK(family_case({0, 2, 1.5, 1, 1}) == FamilyCase::F);
    CHECK(family_case({0, 1, 3, 0, 1}) == FamilyCase::G);
    CHECK(family_case({0, 0, 1, 3, 1}) == FamilyCase::H);
    CHECK(family_case({1, 2.5, 1.5, 0, 0.5}) == FamilyCase::I);
    for (FamilyCase c : kAllFamilies) {
      const ZeroPattern z = zero_pattern(c);
      const DesignParams p{z.d2 ? 1.0 : 0.0, z.d3 ? 1.0 : 0.0, 1.0, z.r2 ? 1.0 : 0.0, z.r3 ? 1.0 : 0.0};
      CHECK(family_case(p) == c);
    }
  }

  TEST_CASE("family_case rejects patterns outside the tree") {
    CHECK_THROWS_AS(family_case({1, 2, 1, 1, 0}), OutOfFamily);
    CHECK_THROWS_AS(family_case({0, 0, 1, 0, 1}), OutOfFamily);
    CHECK_THROWS_AS(family_case({0, 2, 0, 1, 0}), InvalidInput);
    CHECK_THROWS_AS(family_case({-1, 2, 1, 0, 0}), InvalidInput);
    CHECK_THROWS_AS(family_case({0, NAN, 1, 0, 0}), InvalidInput);
  }

  TEST_CASE("parse_family is case-insensitive and strict") {
    CHECK(parse_family("a") == FamilyCase::A);
    CHECK(parse_family("J") == FamilyCase::J);
    CHECK_FALSE(parse_family("K").has_value());
    CHECK_FALSE(parse_family("AB").has_value());
  }

  TEST_CASE("angles are normalized to (-pi, pi] idempotently") {
    constexpr double pi = std::numbers::pi;
    CHECK(normalize_angle(pi) == doctest::Approx(pi));
    CHECK(normalize_angle(-pi) == doctest::Approx(pi));
    CHECK(normalize_angle(3 * pi) == doctest::Approx(pi));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 1000; ++k) {
      const double a = normalize_angle(u(rng));
      CHECK(a > -pi);
      CHECK(a <= pi);
      CHECK(normalize_angle(a) == a);
    }
    const JointConfig q(7.0, -7.0, 4.0);
    CHECK(q.theta1() == doctest::Approx(7.0 - 2 * pi));
    CHECK(q.theta2() == doctest::Approx(-7.0 + 2 * pi));
    CHECK(q.theta3() == doctest::Approx(4.0 - 2 * pi));
  }

  TEST_CASE("fk agrees with the composed DH transforms") {
    const DesignParams p{1, 2, 1.5, 0.7, 0.5};
    const FkResult home = fk(p, JointConfig(0, 0, 0));
    CHECK(home.point.x == doctest::Approx(p.d2 + p.d3 + p.d4));
    CHECK(home.point.y == doctest::Approx(p.r2));
    CHECK(home.point.z == doctest::Approx(p.r3));

    std::mt19937_64 rng(2);
    for (FamilyCase c : kAllFamilies) {
      for (int k = 0; k < 200; ++k) {
        const DesignParams d = oracle::random_design(c, rng);
        const JointConfig q = oracle::random_joints(rng);
        const Eigen::Vector3d expected = oracle::dh_position(d, q.theta1(), q.theta2(), q.theta3());
        const FkResult got = fk(d, q);
        CHECK((got.point.vector() - expected).norm() < 1e-12);
        CHECK(got.section.rho == doctest::Approx(std::hypot(expected[0], expected[1])).epsilon(1e-12));
        CHECK(got.section.z == doctest::Approx(expected[2]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("a lone d4 link swung by theta2 points straight down") {
    // d3 = 0 with only d4 set is not a valid family, but fk itself is defined.
    const DesignParams p{0, 0, 1, 0, 0};
    const FkResult r = fk(p, JointConfig(0, std::numbers::pi / 2, 0));
    CHECK(r.point.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(r.point.y) < 1e-12);
    CHECK(r.point.z == doctest::Approx(-1.0));
  }

  TEST_CASE("section coordinates ignore theta1 and scale with the design") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> shift(-10.0, 10.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (FamilyCase c : kAllFamilies) {
      for (int k = 0; k < 100; ++k) {
        const DesignParams p = oracle::random_design(c, rng);
        const JointConfig q = oracle::random_joints(rng);
        const FkResult a = fk(p, q);
        const FkResult b = fk(p, JointConfig(q.theta1() + shift(rng), q.theta2(), q.theta3()));
        CHECK(b.section.rho == doctest::Approx(a.section.rho).epsilon(1e-12));
        CHECK(b.section.z == doctest::Approx(a.section.z).epsilon(1e-12));
        const FkResult pi_turn = fk(p, JointConfig(q.theta1() + std::numbers::pi, q.theta2(), q.theta3()));
        CHECK(pi_turn.section.rho == doctest::Approx(a.section.rho).epsilon(1e-12));

        const double lambda = scale(rng);
        const FkResult s = fk(p.scaled(lambda), q);
        CHECK((s.point.vector() - lambda * a.point.vector()).norm() < 1e-10 * (1 + lambda));
      }
    }
  }

  TEST_CASE("r3 = 0 cross-sections are symmetric about z = 0") {
    std::mt19937_64 rng(4);
    for (FamilyCase c : {FamilyCase::A, FamilyCase::B, FamilyCase::C, FamilyCase::D, FamilyCase::E}) {
      for (int k = 0; k < 100; ++k) {
        const DesignParams p = oracle::random_design(c, rng);
        const JointConfig q = oracle::random_joints(rng);
        const FkResult a = fk(p, q);
        const FkResult b = fk(p, JointConfig(q.theta1(), -q.theta2(), q.theta3()));
        CHECK(b.section.rho == doctest::Approx(a.section.rho).epsilon(1e-12));
        CHECK(b.section.z == doctest::Approx(-a.section.z).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("jacobian matches central differences") {
    std::mt19937_64 rng(5);
    const double step = 1e-5;
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
      const DesignParams p = oracle::random_design(kAllFamilies[k % 10], rng);
      const JointConfig q = oracle::random_joints(rng);
      const Eigen::Matrix3d j = jacobian(p, q);
      Eigen::Matrix3d fd;
      for (int c = 0; c < 3; ++c) {
        Eigen::Vector3d plus = q.vector();
        Eigen::Vector3d minus = q.vector();
        plus[c] += step;
        minus[c] -= step;
        fd.col(c) = (fk(p, JointConfig(plus[0], plus[1], plus[2])).point.vector() -
                     fk(p, JointConfig(minus[0], minus[1], minus[2])).point.vector()) / (2 * step);
      }
      CHECK((j - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
      const FkResult r = fk(p, q);
      CHECK(j(0, 0) == doctest::Approx(-r.point.y));
      CHECK(j(1, 0) == doctest::Approx(r.point.x));
      CHECK(j(2, 0) == 0.0);
      ++checked;
    }
    CHECK(checked == 1000);
  }

  TEST_CASE("reduced singularity matches differences of (rho^2, z)") {
    std::mt19937_64 rng(6);
    const double step = 1e-5;
    for (int k = 0; k < 1000; ++k) {
      const DesignParams p = oracle::random_design(kAllFamilies[k % 10], rng);
      const JointConfig q = oracle::random_joints(rng);
      auto section = [&](double t2, double t3) {
        const FkResult r = fk(p, JointConfig(0, t2, t3));
        return Eigen::Vector2d(r.section.rho * r.section.rho, r.section.z);
      };
      const Eigen::Vector2d d2 = (section(q.theta2() + step, q.theta3()) - section(q.theta2() - step, q.theta3())) / (2 * step);
      const Eigen::Vector2d d3 = (section(q.theta2(), q.theta3() + step) - section(q.theta2(), q.theta3() - step)) / (2 * step);
      const double fd = d2[0] * d3[1] - d3[0] * d2[1];
      const double s = reduced_singularity(p, q.theta2(), q.theta3());
      const double scale = d2.norm() * d3.norm();
      CHECK(std::abs(s - fd) <= 1e-6 * std::max(1.0, scale));
    }
  }

  TEST_CASE("on-axis and critical configurations have a singular jacobian") {
    // Group C design with r2 = d4: theta3 = -pi/2 puts Y = 0, theta2 = pi/2 puts X = 0.
    const DesignParams p{0, 0, 1.5, 1.5, 0};
    const JointConfig axis(0.3, std::numbers::pi / 2, -std::numbers::pi / 2);
    CHECK(fk(p, axis).section.rho < 1e-12);
    CHECK(std::abs(jacobian(p, axis).determinant()) < 1e-12);

    // Along theta3 = 0 the r2 = 0 families are singular for every theta2.
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
      const DesignParams d = oracle::random_design(FamilyCase::D, rng);
      const JointConfig q(0.1 * k, -3.0 + 0.06 * k, 0.0);
      CHECK(std::abs(reduced_singularity(d, q.theta2(), q.theta3())) < 1e-12);
      const double scale = std::pow(d.reach_bound(), 3);
      CHECK(std::abs(jacobian(d, q).determinant()) < 1e-12 * scale);
    }
  }

  TEST_CASE("extreme reach configurations are critical") {
    const DesignParams p{0, 2, 3, 1, 0};
    const int n = 1024;
    double best = -1.0;
    double bt2 = 0, bt3 = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double t2 = -std::numbers::pi + (i + 0.5) * 2 * std::numbers::pi / n;
        const double t3 = -std::numbers::pi + (j + 0.5) * 2 * std::numbers::pi / n;
        const FkResult r = fk(p, JointConfig(0, t2, t3));
        const double reach = r.section.rho * r.section.rho + r.section.z * r.section.z;
        if (reach > best) {
          best = reach;
          bt2 = t2;
          bt3 = t3;
        }
      }
    }
    // |S| is O(grid step) away from the true maximum; compare with the typical magnitude.
    const double typical = std::abs(reduced_singularity(p, 0.4, 1.1));
    CHECK(std::abs(reduced_singularity(p, bt2, bt3)) < 0.05 * typical);
  }

  TEST_CASE("det(J) vanishes on random roots of S") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 200; ++k) {
      const DesignParams p = oracle::random_design(kAllFamilies[k % 10], rng);
      const JointConfig q = oracle::random_joints(rng);
      // Bisect along theta3 for a sign change of S at fixed theta2.
      double a = -std::numbers::pi, b = a;
      double sa = reduced_singularity(p, q.theta2(), a);
      bool found = false;
      for (int s = 1; s <= 720 && !found; ++s) {
        b = -std::numbers::pi + s * 2 * std::numbers::pi / 720;
        const double sb = reduced_singularity(p, q.theta2(), b);
        if ((sa < 0) != (sb < 0)) {
          found = true;
        } else {
          a = b;
          sa = sb;
        }
      }
      if (!found) continue;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        if ((reduced_singularity(p, q.theta2(), m) < 0) == (sa < 0)) {
          a = m;
        } else {
          b = m;
        }
      }
      const JointConfig root(q.theta1(), q.theta2(), 0.5 * (a + b));
      const double scale = std::pow(p.reach_bound(), 3);
      CHECK(std::abs(jacobian(p, root).determinant()) < 1e-9 * scale);
    }
  }
}
