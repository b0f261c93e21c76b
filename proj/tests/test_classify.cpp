#include "ortho3r/classify.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace ortho3r;

namespace {

// Independent transcription of the published property table (tab separated).
constexpr const char* kTable = R"(A1	0	0	Intermediate	Small	All the workspace
A2	0	2	Small	Small	All the workspace
A3	0	4	Small	Intermediate	All the workspace
B1	0	0	All the workspace	Intermediate	All the workspace
B2	0	1	All the workspace	Big	All the workspace
C	0	0	All the workspace	Small	All the workspace
D1	1	2	Small	Small	Big
D2	0	0	Big	Small	Intermediate
D3	0	1	Small	Intermediate	Intermediate
D4	0	2	Small	Small	Big
D5	0	0	Small	Small	All the workspace
E	0	0	All the workspace	Small	All the workspace
F1	0	0	Intermediate	Small	All the workspace
F2	0	2	Intermediate	Small	Big
G	0	0	All the workspace	Big	All the workspace
H	0	0	All the workspace	Intermediate	All the workspace
I1	0	0	Small	Intermediate	Big
I2	1	2	Small	Intermediate	Intermediate
I3	1	0	Small	Small	All the workspace
I4	1	2	Small	Small	All the workspace
J	1	0	All the workspace	Small	All the workspace
)";

std::string size_text(Size s) { return s == Size::All ? "All the workspace" : std::string(size_name(s)); }

GroupLabel numeric_label(const DesignParams& p) {
  return numeric_verdict(p, GridSpec::defaults(p, 512)).numeric;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("group names round trip and carry their family") {
    for (GroupLabel g : kAllGroups) {
      CHECK(parse_group(group_name(g)) == g);
      CHECK(family_letter(group_family(g)) == group_name(g)[0]);
    }
    CHECK_FALSE(parse_group("K1").has_value());
  }

  TEST_CASE("record table matches the transcription") {
    std::istringstream in(kTable);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream cols(line);
      std::string name, voids, nodes, q4, holes, feasible;
      std::getline(cols, name, '\t');
      std::getline(cols, voids, '\t');
      std::getline(cols, nodes, '\t');
      std::getline(cols, q4, '\t');
      std::getline(cols, holes, '\t');
      std::getline(cols, feasible, '\t');
      const auto g = parse_group(name);
      REQUIRE(g.has_value());
      const GroupRecord& r = group_record(*g);
      CAPTURE(name);
      CHECK(r.label == *g);
      CHECK(r.voids == std::stoi(voids));
      CHECK(r.nodes == std::stoi(nodes));
      CHECK(size_text(r.quaternary) == q4);
      CHECK(size_text(r.holes) == holes);
      CHECK(size_text(r.feasible) == feasible);
      ++rows;
    }
    CHECK(rows == 21);
  }

  TEST_CASE("selected records") {
    const GroupRecord& a3 = group_record(GroupLabel::A3);
    CHECK(a3.nodes == 4);
    CHECK(a3.voids == 0);
    CHECK(a3.quaternary == Size::Small);
    CHECK(a3.holes == Size::Intermediate);
    CHECK(a3.feasible == Size::All);
    CHECK(group_record(GroupLabel::J).voids == 1);
    CHECK(group_record(GroupLabel::J).nodes == 0);
    CHECK(group_record(GroupLabel::J).quaternary == Size::All);
    CHECK(group_record(GroupLabel::D1).voids == 1);
    CHECK(group_record(GroupLabel::D1).nodes == 2);
    CHECK(group_record(GroupLabel::D1).feasible == Size::Big);
  }

  TEST_CASE("class ranks") {
    CHECK(class_rank(GroupLabel::C) == 1);
    CHECK(class_rank(GroupLabel::G) == 3);
    CHECK(class_rank(GroupLabel::F1) == 2);
    int counts[4] = {0, 0, 0, 0};
    for (GroupLabel g : kAllGroups) ++counts[class_rank(g)];
    CHECK(counts[1] == 2);
    CHECK(counts[2] == 13);
    CHECK(counts[3] == 6);
  }

  TEST_CASE("size buckets") {
    CHECK(zone_bucket(1.0) == Size::All);
    CHECK(zone_bucket(0.99) == Size::All);
    CHECK(zone_bucket(0.7) == Size::Big);
    CHECK(zone_bucket(0.3) == Size::Intermediate);
    CHECK(zone_bucket(0.1) == Size::Small);
    CHECK(hole_bucket(0.1) == Size::Small);
    CHECK(hole_bucket(0.2) == Size::Intermediate);
    CHECK(hole_bucket(0.5) == Size::Big);
  }

  TEST_CASE("transition auxiliaries") {
    const TransitionAux t = transition_aux({1, 3, 0.7, 0, 0.5});
    CHECK(t.a == doctest::Approx(4.0));
    CHECK(t.b == doctest::Approx(2.0));
    REQUIRE(t.delta.has_value());
    CHECK(*t.delta == doctest::Approx(std::sqrt(1 + 0.25 / 8)));
    CHECK_FALSE(transition_aux({1, 0.5, 0.7, 0, 0.5}).delta.has_value());
    CHECK(transition_aux({0, 2, 1, 1.5, 0}).a >= transition_aux({0, 2, 1, 1.5, 0}).b);
  }

  TEST_CASE("analytic rules") {
    CHECK(analytic_group({0, 2, 2.2, 1.5, 0}).label == GroupLabel::A2);
    CHECK(analytic_group({0, 1, 2, 1, 1}).label == GroupLabel::F2);
    const AnalyticResult on_curve = analytic_group({0, 2, 2, 0, 0});
    CHECK_FALSE(on_curve.label.has_value());
    CHECK_FALSE(on_curve.warnings.empty());
    CHECK_FALSE(analytic_group({0, 2, 2 * (1 + 1e-11), 0, 0}).label.has_value());
    CHECK(analytic_group({0, 2, 2 * (1 + 1e-6), 0, 0}).label == GroupLabel::B2);
    CHECK(analytic_group({0, 2, 1.5, 1, 0}).label == GroupLabel::A1);
    CHECK(analytic_group({0, 2, 3, 1, 0}).label == GroupLabel::A3);
    CHECK(analytic_group({1, 1.4, 0.7, 0, 0}).label == GroupLabel::D1);
    CHECK(analytic_group({1, 2, 1.5, 0, 0}).label == GroupLabel::D2);
    CHECK(analytic_group({1, 2, 2.5, 0, 0}).label == GroupLabel::D3);
    CHECK(analytic_group({1, 0.5, 2, 0, 0}).label == GroupLabel::D4);
    CHECK(analytic_group({1, 0.6, 0.7, 0, 0}).label == GroupLabel::D5);
    CHECK(analytic_group({1, 2.5, 1.5, 0, 0.5}).label == GroupLabel::I1);
    CHECK(analytic_group({1, 3, 0.7, 0, 0.5}).label == GroupLabel::I2);
    const AnalyticResult i3 = analytic_group({1, 0.5, 0.7, 0, 0.5});
    CHECK(i3.provisional);
    CHECK_THROWS_AS(analytic_group({1, 2, 1, 1, 0}), OutOfFamily);
  }

  TEST_CASE("numeric verdicts") {
    const Verdict i2 = numeric_verdict({1, 3, 0.7, 0, 0.5}, GridSpec::defaults({1, 3, 0.7, 0, 0.5}, 512));
    CHECK(i2.numeric == GroupLabel::I2);
    CHECK(i2.metrics.node_count == 2);
    CHECK(i2.metrics.void_count == 1);
    CHECK(i2.agreement);

    const Verdict i3 = numeric_verdict({1, 0.5, 0.7, 0, 0.5}, GridSpec::defaults({1, 0.5, 0.7, 0, 0.5}, 512));
    CHECK(i3.numeric == GroupLabel::I3);
    CHECK(i3.metrics.node_count == 0);
    CHECK(i3.metrics.void_count == 1);
    CHECK(i3.analytic.provisional);

    const Verdict h = numeric_verdict({0, 0, 1, 3, 1}, GridSpec::defaults({0, 0, 1, 3, 1}, 512));
    CHECK(h.numeric == GroupLabel::H);
    CHECK(h.metrics.node_count == 0);
    CHECK(h.metrics.void_count == 0);
    CHECK(h.metrics.quaternary_ratio >= 0.99);
    CHECK(h.label() == h.numeric);
  }

  TEST_CASE("analytic and numeric labels agree on non-provisional reference designs") {
    const DesignParams designs[] = {{0, 2, 1.5, 1, 0}, {0, 2, 2.2, 1.5, 0}, {0, 2, 3, 1, 0}, {0, 2, 1, 0, 0},
                                    {0, 2, 3, 0, 0},   {1, 2, 2.5, 0, 0},   {0, 1, 2, 1, 1}, {1, 2.5, 1.5, 0, 0.5}};
    for (const DesignParams& p : designs) {
      const AnalyticResult a = analytic_group(p);
      REQUIRE(a.label.has_value());
      CHECK(numeric_label(p) == *a.label);
    }
  }

  TEST_CASE("labels are scale invariant") {
    const DesignParams p{0, 2, 3, 0, 0};
    for (double l : {0.5, 2.0, 10.0}) {
      CHECK(analytic_group(p.scaled(l)).label == GroupLabel::B2);
      const DesignParams q = p.scaled(l);
      CHECK(numeric_verdict(q, GridSpec::defaults(q, 256)).numeric == GroupLabel::B2);
    }
  }

  TEST_CASE("node count steps across the case A transitions") {
    // d3 = 2, r2 = 1.5: transitions at d4 = 2 and d4 = 2.5.
    const int expected[] = {0, 2, 4};
    const double d4s[] = {1.6, 2.25, 2.9};
    for (int k = 0; k < 3; ++k) {
      const DesignParams p{0, 2, d4s[k], 1.5, 0};
      CHECK(numeric_verdict(p, GridSpec::defaults(p, 256)).metrics.node_count == expected[k]);
    }
  }
}
