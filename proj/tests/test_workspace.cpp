#include "oracles.hpp"

#include "ortho3r/errors.hpp"
#include "ortho3r/workspace.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ortho3r;

namespace {

// Band dilated by one cell, so "within one cell diagonal" tests are tolerant of raster phase.
std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& band, int rows, int cols) {
  std::vector<std::uint8_t> out(band.size(), 0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!band[static_cast<std::size_t>(i) * cols + j]) continue;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a >= 0 && a < rows && b >= 0 && b < cols) out[static_cast<std::size_t>(a) * cols + b] = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("workspace") {
  TEST_CASE("grid spec defaults and validation") {
    const DesignParams p{0, 2, 3, 1, 0};
    const GridSpec g = GridSpec::defaults(p, 128);
    CHECK(g.rmax == doctest::Approx(1.02 * 6));
    CHECK(g.rho_at(0) == doctest::Approx(0.5 * g.cell()));
    CHECK(g.z_at(2 * g.n - 1) == doctest::Approx(g.rmax - 0.5 * g.cell()));
    CHECK_THROWS_AS((GridSpec{1.0, 32}.validate()), InvalidInput);
    CHECK_THROWS_AS((GridSpec{0.0, 128}.validate()), InvalidInput);
  }

  TEST_CASE("outer ring of the default field is empty") {
    for (const DesignParams& p : {DesignParams{0, 2, 3, 1, 0}, DesignParams{0, 0, 2, 1.5, 0}, DesignParams{1, 0, 2, 0, 1}}) {
      const IksField f = iks_field(p, GridSpec::defaults(p, 128));
      for (int i = 0; i < f.rows(); ++i) {
        CHECK(f.at(i, 0) == 0);
        CHECK(f.at(i, f.cols() - 1) == 0);
      }
      for (int j = 0; j < f.cols(); ++j) CHECK(f.at(f.rows() - 1, j) == 0);
      for (std::uint8_t c : f.counts) CHECK(c <= 4);
    }
  }

  TEST_CASE("a grid smaller than the reach is refused") {
    const DesignParams p{0, 2, 3, 1, 0};
    CHECK_THROWS_AS(iks_field(p, GridSpec{3.0, 128}), GridTooSmall);
  }

  TEST_CASE("group C is four-solution away from its singular curves") {
    const DesignParams p{0, 0, 2, 1.5, 0};
    const GridSpec g = GridSpec::defaults(p, 256);
    const IksField f = iks_field(p, g);
    const std::vector<std::uint8_t> near =
        dilate(singular_band(g, section_images(singular_branches(p, 1024), p)), f.rows(), f.cols());
    std::size_t reachable = 0, off = 0;
    for (std::size_t k = 0; k < f.counts.size(); ++k) {
      if (f.counts[k] == 0) continue;
      ++reachable;
      if (f.counts[k] != 4 && !near[k]) ++off;
    }
    CHECK(reachable > 1000);
    CHECK(off == 0);
  }

  TEST_CASE("group A1 has both 2- and 4-solution cells") {
    const DesignParams p{0, 2, 1.5, 1, 0};
    const IksField f = iks_field(p, GridSpec::defaults(p, 128));
    CHECK(std::count(f.counts.begin(), f.counts.end(), 2) > 0);
    CHECK(std::count(f.counts.begin(), f.counts.end(), 4) > 0);
  }

  TEST_CASE("voids of reference designs") {
    const DesignParams j{1, 0, 2, 0, 1};
    CHECK(cavities(iks_field(j, GridSpec::defaults(j, 256))).voids.size() == 1);
    const DesignParams b1{0, 2, 1, 0, 0};
    CHECK(cavities(iks_field(b1, GridSpec::defaults(b1, 256))).voids.empty());
  }

  TEST_CASE("empty field has no voids and no hole profile") {
    IksField f;
    f.grid = GridSpec{1.0, 64};
    f.counts.assign(static_cast<std::size_t>(64) * 128, 0);
    const Cavities c = cavities(f);
    CHECK(c.voids.empty());
    CHECK(c.hole_profile.empty());
    CHECK(c.hole_ratio == 0.0);
  }

  TEST_CASE("synthetic ring encloses exactly one void") {
    IksField f;
    f.grid = GridSpec{1.0, 64};
    f.counts.assign(static_cast<std::size_t>(64) * 128, 0);
    // An annulus of reachable cells centred away from the axis; a disc touching the axis is exterior.
    for (int i = 0; i < 64; ++i) {
      for (int j = 0; j < 128; ++j) {
        const double r = std::hypot(i - 30.0, j - 64.0);
        if (r >= 10 && r <= 20) f.counts[static_cast<std::size_t>(i) * 128 + j] = 2;
      }
    }
    const Cavities c = cavities(f);
    REQUIRE(c.voids.size() == 1);
    CHECK(c.voids[0].cells > 200);
    CHECK(c.hole_ratio == doctest::Approx(f.grid.rho_at(30)).epsilon(0.01));
  }

  TEST_CASE("metrics of reference designs") {
    const DesignParams d1{1, 1.4, 0.7, 0, 0};
    const WorkspaceMetrics m1 = metrics(d1, GridSpec::defaults(d1, 512));
    CHECK(m1.node_count == 2);
    CHECK(m1.void_count == 1);
    CHECK(m1.cusp_count == 0);
    const DesignParams i1{1, 2.5, 1.5, 0, 0.5};
    const WorkspaceMetrics m2 = metrics(i1, GridSpec::defaults(i1, 512));
    CHECK(m2.node_count == 0);
    CHECK(m2.void_count == 0);
    CHECK(m2.cusp_count == 0);
    for (const WorkspaceMetrics& m : {m1, m2}) {
      CHECK(m.quaternary_ratio >= 0.0);
      CHECK(m.quaternary_ratio <= 1.0);
      CHECK(m.hole_ratio >= 0.0);
      CHECK(m.hole_ratio <= 1.0);
      CHECK(m.feasible_ratio >= 0.0);
      CHECK(m.feasible_ratio <= 1.0);
    }
  }

  TEST_CASE("feasible-path coverage") {
    const DesignParams c{0, 0, 2, 1.5, 0};
    CHECK(aspects(c, 128, GridSpec::defaults(c, 256)).feasible_ratio >= 0.99);
    const DesignParams d3{1, 2, 2.5, 0, 0};
    CHECK(aspects(d3, 128, GridSpec::defaults(d3, 256)).feasible_ratio < 0.99);
  }

  TEST_CASE("aspects partition the torus up to the band") {
    for (const DesignParams& p : {DesignParams{0, 2, 3, 1, 0}, DesignParams{1, 3, 0.7, 0, 0.5}, DesignParams{0, 0, 1, 3, 1}}) {
      const AspectSummary a = aspects(p, 128, GridSpec::defaults(p, 128));
      CHECK(a.count >= 1);
      CHECK(a.joint_fraction.size() == a.count);
      CHECK(a.coverage.size() == a.count);
      const double sum = std::accumulate(a.joint_fraction.begin(), a.joint_fraction.end(), 0.0);
      CHECK(sum <= 1.0 + 1e-12);
      CHECK(sum >= 1.0 - a.singular_band_fraction - 1e-12);
      for (double c : a.coverage) {
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
      }
      CHECK(a.feasible_ratio == doctest::Approx(*std::max_element(a.coverage.begin(), a.coverage.end())));
    }
  }

  TEST_CASE("r3 = 0 fields are mirror symmetric in z") {
    std::mt19937_64 rng(41);
    for (FamilyCase c : {FamilyCase::A, FamilyCase::B, FamilyCase::C, FamilyCase::D, FamilyCase::E}) {
      const DesignParams p = oracle::random_design(c, rng);
      const GridSpec g = GridSpec::defaults(p, 128);
      const IksField f = iks_field(p, g);
      const std::vector<std::uint8_t> near = dilate(singular_band(g, section_images(singular_branches(p, 512), p)),
                                                    f.rows(), f.cols());
      std::size_t asymmetric = 0;
      for (int i = 0; i < f.rows(); ++i) {
        for (int j = 0; j < f.cols(); ++j) {
          const int mj = f.cols() - 1 - j;
          const std::size_t k = static_cast<std::size_t>(i) * f.cols() + j;
          const std::size_t mk = static_cast<std::size_t>(i) * f.cols() + mj;
          if (f.at(i, j) != f.at(i, mj) && !near[k] && !near[mk]) ++asymmetric;
        }
      }
      CAPTURE(family_letter(c));
      CHECK(asymmetric == 0);
    }
  }

  TEST_CASE("metrics are scale invariant") {
    const DesignParams p{1, 1.4, 0.7, 0, 0};
    const WorkspaceMetrics base = metrics(p, GridSpec::defaults(p, 256));
    for (double l : {0.5, 10.0}) {
      const DesignParams q = p.scaled(l);
      const WorkspaceMetrics m = metrics(q, GridSpec::defaults(q, 256));
      CHECK(m.node_count == base.node_count);
      CHECK(m.void_count == base.void_count);
      CHECK(m.cusp_count == base.cusp_count);
      CHECK(std::abs(m.quaternary_ratio - base.quaternary_ratio) < 0.02);
      CHECK(std::abs(m.hole_ratio - base.hole_ratio) < 0.02);
      CHECK(std::abs(m.feasible_ratio - base.feasible_ratio) < 0.02);
    }
  }
}
