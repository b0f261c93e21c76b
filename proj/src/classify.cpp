#include "ortho3r/classify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ortho3r {

namespace {

constexpr double kEqualityTol = 1e-9;

using enum Size;

constexpr GroupRecord kTable[] = {
    {GroupLabel::A1, 0, 0, Intermediate, Small, All},
    {GroupLabel::A2, 0, 2, Small, Small, All},
    {GroupLabel::A3, 0, 4, Small, Intermediate, All},
    {GroupLabel::B1, 0, 0, All, Intermediate, All},
    {GroupLabel::B2, 0, 1, All, Big, All},
    {GroupLabel::C, 0, 0, All, Small, All},
    {GroupLabel::D1, 1, 2, Small, Small, Big},
    {GroupLabel::D2, 0, 0, Big, Small, Intermediate},
    {GroupLabel::D3, 0, 1, Small, Intermediate, Intermediate},
    {GroupLabel::D4, 0, 2, Small, Small, Big},
    {GroupLabel::D5, 0, 0, Small, Small, All},
    {GroupLabel::E, 0, 0, All, Small, All},
    {GroupLabel::F1, 0, 0, Intermediate, Small, All},
    {GroupLabel::F2, 0, 2, Intermediate, Small, Big},
    {GroupLabel::G, 0, 0, All, Big, All},
    {GroupLabel::H, 0, 0, All, Intermediate, All},
    {GroupLabel::I1, 0, 0, Small, Intermediate, Big},
    {GroupLabel::I2, 1, 2, Small, Intermediate, Intermediate},
    {GroupLabel::I3, 1, 0, Small, Small, All},
    {GroupLabel::I4, 1, 2, Small, Small, All},
    {GroupLabel::J, 1, 0, All, Small, All},
};

constexpr std::string_view kNames[] = {"A1", "A2", "A3", "B1", "B2", "C",  "D1", "D2", "D3", "D4", "D5",
                                       "E",  "F1", "F2", "G",  "H",  "I1", "I2", "I3", "I4", "J"};

bool nearly_equal(double x, double y) {
  return std::abs(x - y) <= kEqualityTol * std::max(std::abs(x), std::abs(y));
}

// -1, 0 (Indeterminate) or +1 for x versus y.
int compare(double x, double y) {
  if (nearly_equal(x, y)) return 0;
  return x < y ? -1 : 1;
}

}  // namespace

std::string_view group_name(GroupLabel g) { return kNames[static_cast<int>(g)]; }

std::optional<GroupLabel> parse_group(std::string_view text) {
  for (GroupLabel g : kAllGroups) {
    const std::string_view name = group_name(g);
    if (name.size() != text.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < name.size(); ++k) {
      const char c = text[k];
      const char up = (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
      if (up != name[k]) same = false;
    }
    if (same) return g;
  }
  return std::nullopt;
}

FamilyCase group_family(GroupLabel g) { return *parse_family(group_name(g).substr(0, 1)); }

std::string_view size_name(Size s) {
  switch (s) {
    case Small: return "Small";
    case Intermediate: return "Intermediate";
    case Big: return "Big";
    case All: return "All the workspace";
  }
  return "";
}

const GroupRecord& group_record(GroupLabel g) { return kTable[static_cast<int>(g)]; }

int class_rank(GroupLabel g) {
  switch (g) {
    case GroupLabel::C:
    case GroupLabel::E:
      return 1;
    case GroupLabel::B2:
    case GroupLabel::D1:
    case GroupLabel::G:
    case GroupLabel::I2:
    case GroupLabel::I3:
    case GroupLabel::I4:
      return 3;
    default:
      return 2;
  }
}

Size zone_bucket(double ratio) {
  if (ratio >= 0.99) return All;
  if (ratio >= 0.60) return Big;
  if (ratio >= 0.25) return Intermediate;
  return Small;
}

Size hole_bucket(double ratio) {
  if (ratio < 0.15) return Small;
  if (ratio <= 0.35) return Intermediate;
  return Big;
}

TransitionAux transition_aux(const DesignParams& p) {
  TransitionAux aux;
  aux.a = std::hypot(p.d3 + p.d2, p.r2);
  aux.b = std::hypot(p.d3 - p.d2, p.r2);
  if (p.d2 > 0.0) {
    const double d3 = p.d3 / p.d2;
    const double r3 = p.r3 / p.d2;
    if (d3 * d3 > 1.0) aux.delta = std::sqrt(1.0 + r3 * r3 / (d3 * d3 - 1.0));
  }
  return aux;
}

AnalyticResult analytic_group(const DesignParams& p) {
  const FamilyCase fc = family_case(p);
  AnalyticResult out;
  auto pick = [&](int cmp, GroupLabel below, GroupLabel above) {
    if (cmp != 0) out.label = cmp < 0 ? below : above;
  };
  switch (fc) {
    case FamilyCase::A: {
      const double e3 = std::hypot(p.d3, p.r2);
      const int c2 = compare(p.d4, p.d3);
      const int c3 = compare(p.d4, e3);
      if (c2 == 0 || c3 == 0) break;
      out.label = c2 < 0 ? GroupLabel::A1 : (c3 < 0 ? GroupLabel::A2 : GroupLabel::A3);
      break;
    }
    case FamilyCase::B:
      pick(compare(p.d4, p.d3), GroupLabel::B1, GroupLabel::B2);
      break;
    case FamilyCase::C: out.label = GroupLabel::C; break;
    case FamilyCase::E: out.label = GroupLabel::E; break;
    case FamilyCase::G: out.label = GroupLabel::G; break;
    case FamilyCase::H: out.label = GroupLabel::H; break;
    case FamilyCase::J: out.label = GroupLabel::J; break;
    case FamilyCase::D: {
      const int c42 = compare(p.d4, p.d2);
      const int c23 = compare(p.d2, p.d3);
      const int c43 = compare(p.d4, p.d3);
      if (c42 == 0 || c23 == 0 || c43 == 0) break;
      if (c42 < 0 && c23 < 0) {
        out.label = GroupLabel::D1;  // d4 < d2 < d3
      } else if (c23 < 0 && c43 < 0) {
        out.label = GroupLabel::D2;  // d2 < d4 < d3
      } else if (c23 < 0) {
        out.label = GroupLabel::D3;  // d2 < d3 < d4
      } else if (c42 > 0) {
        out.label = GroupLabel::D4;  // d3 < d2 < d4
      } else {
        out.label = GroupLabel::D5;  // max(d3, d4) < d2
      }
      break;
    }
    case FamilyCase::F:
      pick(compare(p.d4, std::hypot(p.d3, p.r2)), GroupLabel::F1, GroupLabel::F2);
      break;
    case FamilyCase::I: {
      const double d3 = p.d3 / p.d2;
      const double d4 = p.d4 / p.d2;
      const double r3 = p.r3 / p.d2;
      const int c32 = compare(d3, 1.0);
      if (c32 == 0) break;
      const double inner = 1.0 + r3 * r3 / (d3 * d3 - 1.0);
      if (c32 < 0) {
        out.provisional = true;
        out.warnings.push_back(
            "ProvisionalRule: the d4 = delta boundary is unverified for d3 < d2; the numeric label decides");
      }
      if (!(inner > 0.0)) {
        out.warnings.push_back(fmt::format("delta is undefined here (1 + r3^2/(d3^2 - 1) = {:.6g})", inner));
        break;
      }
      const int c4 = compare(d4, std::sqrt(inner));
      if (c4 == 0) break;
      if (c32 > 0) {
        out.label = c4 > 0 ? GroupLabel::I1 : GroupLabel::I2;
      } else {
        out.label = c4 > 0 ? GroupLabel::I3 : GroupLabel::I4;
      }
      break;
    }
  }
  if (!out.label && out.warnings.empty()) out.warnings.push_back("Indeterminate: the design lies on a transition curve");
  return out;
}

Verdict numeric_verdict(const DesignParams& p, const Analysis& analysis) {
  const FamilyCase fc = family_case(p);
  Verdict v;
  v.metrics = analysis.metrics;
  v.analytic = analytic_group(p);
  v.warnings = analysis.warnings;

  std::vector<GroupLabel> matches;
  for (const GroupRecord& r : kTable) {
    if (group_family(r.label) == fc && r.nodes == v.metrics.node_count && r.voids == v.metrics.void_count) {
      matches.push_back(r.label);
    }
  }
  if (matches.empty()) {
    throw NoSignatureMatch(fmt::format("no group of case {} has {} node(s) and {} void(s)", family_letter(fc),
                                       v.metrics.node_count, v.metrics.void_count),
                           v.metrics);
  }

  if (matches.size() > 1) {
    const bool is_i2_i4 = std::find(matches.begin(), matches.end(), GroupLabel::I2) != matches.end() &&
                          std::find(matches.begin(), matches.end(), GroupLabel::I4) != matches.end();
    if (is_i2_i4) {
      const int c = compare(p.d3, p.d2);
      if (c == 0) v.warnings.push_back("d3 = d2 sits on the I2/I4 boundary; I2 chosen");
      matches = {c >= 0 ? GroupLabel::I2 : GroupLabel::I4};
    } else {
      // Whether some aspect covers the whole workspace separates rows the counts cannot.
      const bool all_feasible = zone_bucket(v.metrics.feasible_ratio) == All;
      std::vector<GroupLabel> kept;
      for (GroupLabel g : matches) {
        if ((group_record(g).feasible == All) == all_feasible) kept.push_back(g);
      }
      if (kept.size() > 1 || kept.empty()) {
        const std::vector<GroupLabel> pool = kept.empty() ? matches : kept;
        kept.clear();
        const Size q = zone_bucket(v.metrics.quaternary_ratio);
        for (GroupLabel g : pool) {
          if (group_record(g).quaternary == q) kept.push_back(g);
        }
        if (kept.empty()) kept = pool;
      }
      if (kept.size() > 1) v.warnings.push_back("tie between groups with the same signature; first row chosen");
      matches = {kept.front()};
    }
  }
  v.numeric = matches.front();

  if (v.analytic.label) {
    v.agreement = *v.analytic.label == v.numeric;
    if (!v.agreement) {
      v.warnings.push_back(fmt::format("analytic rule gives {} but the measured signature gives {}",
                                       group_name(*v.analytic.label), group_name(v.numeric)));
    }
  }
  for (const std::string& w : v.analytic.warnings) v.warnings.push_back(w);
  return v;
}

Verdict numeric_verdict(const DesignParams& p, const GridSpec& g) {
  family_case(p);
  return numeric_verdict(p, analyze(p, g));
}

}  // namespace ortho3r
