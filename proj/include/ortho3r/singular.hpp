#pragma once

#include "ortho3r/model.hpp"

#include <string>
#include <vector>

namespace ortho3r {

struct JointSample {
  double theta2 = 0.0;
  double theta3 = 0.0;
};

// One connected piece of {S = 0} on the (theta2, theta3) torus.
struct JointCurve {
  std::vector<JointSample> samples;
  int branch_id = 0;
  bool closed = false;
  // Found as a non-sign-changing zero (S touches 0 without crossing).
  bool tangential = false;
};

struct SectionCurve {
  std::vector<SectionPoint> vertices;
  std::vector<JointSample> preimage;  // same length as vertices
  int branch_id = 0;
  bool closed = false;
};

struct NodePoint {
  SectionPoint location;
  JointSample preimage_a;
  JointSample preimage_b;
  double residual = 0.0;
  bool refined = false;   // the local two-branch solve converged
  bool witnessed = false; // both preimages carry a double root of the reduced equation
};

struct CuspPoint {
  SectionPoint location;
  JointSample preimage;
  int multiplicity = 0;  // of the merged theta3 root at the location
};

struct NodeSearch {
  std::vector<NodePoint> nodes;
  std::vector<std::string> warnings;
};

struct CuspSearch {
  std::vector<CuspPoint> cusps;
  std::size_t candidates = 0;
};

// Zero set of reduced_singularity on an n x n cell-centred torus grid. Curves
// are refined to |dtheta| < 1e-10 along grid edges; crossings in a cell are
// stitched straight through. Throws InvalidInput for n < 64.
std::vector<JointCurve> singular_branches(const DesignParams& p, int n);

SectionCurve section_image(const JointCurve& curve, const DesignParams& p);
std::vector<SectionCurve> section_images(const std::vector<JointCurve>& curves, const DesignParams& p);

// Transverse crossings of the section curves whose preimages are distinct.
// tol is the merge distance in the section plane. grid_n is the trace
// resolution, used for the segment-adjacency exclusion and warnings.
NodeSearch find_nodes(const DesignParams& p, const std::vector<SectionCurve>& curves, double tol,
                      int grid_n);

// Velocity minima with tangent reversal, confirmed by a root of multiplicity
// >= 3 in the reduced inverse kinematic equation.
CuspSearch find_cusps(const DesignParams& p, const std::vector<SectionCurve>& curves, double tol);

// Characteristic length used for tolerances in the section plane.
double workspace_diameter(const DesignParams& p);

}  // namespace ortho3r
