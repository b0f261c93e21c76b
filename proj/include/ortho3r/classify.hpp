#pragma once

#include "ortho3r/errors.hpp"
#include "ortho3r/model.hpp"
#include "ortho3r/workspace.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ortho3r {

enum class GroupLabel { A1, A2, A3, B1, B2, C, D1, D2, D3, D4, D5, E, F1, F2, G, H, I1, I2, I3, I4, J };

inline constexpr std::array<GroupLabel, 21> kAllGroups = {
    GroupLabel::A1, GroupLabel::A2, GroupLabel::A3, GroupLabel::B1, GroupLabel::B2, GroupLabel::C,
    GroupLabel::D1, GroupLabel::D2, GroupLabel::D3, GroupLabel::D4, GroupLabel::D5, GroupLabel::E,
    GroupLabel::F1, GroupLabel::F2, GroupLabel::G,  GroupLabel::H,  GroupLabel::I1, GroupLabel::I2,
    GroupLabel::I3, GroupLabel::I4, GroupLabel::J};

std::string_view group_name(GroupLabel g);
std::optional<GroupLabel> parse_group(std::string_view text);
FamilyCase group_family(GroupLabel g);

// Qualitative sizes used by the property table. All = "All the workspace".
enum class Size { Small, Intermediate, Big, All };
std::string_view size_name(Size s);

struct GroupRecord {
  GroupLabel label;
  int voids;
  int nodes;
  Size quaternary;  // 4-IKS zone
  Size holes;
  Size feasible;    // feasible paths zone
};

const GroupRecord& group_record(GroupLabel g);

// 1 = first class (best), 3 = third class.
int class_rank(GroupLabel g);

// Buckets: All >= 0.99, Big >= 0.60, Intermediate >= 0.25, else Small.
Size zone_bucket(double ratio);
// Holes: Small < 0.15, Intermediate 0.15..0.35, Big > 0.35.
Size hole_bucket(double ratio);

struct TransitionAux {
  double a = 0.0;
  double b = 0.0;
  std::optional<double> delta;  // lengths divided by d2; needs d2 > 0 and d3 > d2
};
TransitionAux transition_aux(const DesignParams& p);

struct AnalyticResult {
  std::optional<GroupLabel> label;  // nullopt = Indeterminate
  bool provisional = false;         // ProvisionalRule
  std::vector<std::string> warnings;
};

// Closed-form zone rules; relative equality within 1e-9 is Indeterminate.
// Propagates OutOfFamily.
AnalyticResult analytic_group(const DesignParams& p);

class NoSignatureMatch : public Error {
public:
  NoSignatureMatch(const std::string& what, WorkspaceMetrics m) : Error(what), metrics(m) {}
  WorkspaceMetrics metrics;
};

struct Verdict {
  AnalyticResult analytic;
  GroupLabel numeric;
  bool agreement = false;
  std::vector<std::string> warnings;
  WorkspaceMetrics metrics;

  GroupLabel label() const { return numeric; }
};

// Match (family, nodes, voids) against the table. Throws NoSignatureMatch.
Verdict numeric_verdict(const DesignParams& p, const Analysis& analysis);
Verdict numeric_verdict(const DesignParams& p, const GridSpec& g);

}  // namespace ortho3r
