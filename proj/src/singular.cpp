#include "ortho3r/singular.hpp"

#include "ortho3r/errors.hpp"
#include "ortho3r/ikquartic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <fmt/format.h>
#include <numbers>
#include <unordered_map>

namespace ortho3r {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrapped_gap(double a, double b) { return std::abs(normalize_angle(a - b)); }

double torus_distance(const JointSample& a, const JointSample& b) {
  return std::hypot(wrapped_gap(a.theta2, b.theta2), wrapped_gap(a.theta3, b.theta3));
}

// Cell-centred torus lattice of S values, index (i, j) -> theta2_i, theta3_j.
struct Lattice {
  int n = 0;
  double h = 0.0;
  std::vector<double> s;
  double scale = 0.0;

  double angle(int i) const { return -kPi + (i + 0.5) * h; }
  int wrap(int i) const { return ((i % n) + n) % n; }
  double at(int i, int j) const { return s[static_cast<std::size_t>(wrap(i)) * n + wrap(j)]; }
};

Lattice sample_lattice(const DesignParams& p, int n) {
  Lattice g;
  g.n = n;
  g.h = kTwoPi / n;
  g.s.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = reduced_singularity(p, g.angle(i), g.angle(j));
      g.s[static_cast<std::size_t>(i) * n + j] = v;
      g.scale = std::max(g.scale, std::abs(v));
    }
  }
  return g;
}

// Bisection for the sign change of S between two joint points.
JointSample refine_edge(const DesignParams& p, JointSample a, JointSample b, double sa) {
  const bool pos_a = sa > 0.0;
  for (int it = 0; it < 60; ++it) {
    if (std::abs(a.theta2 - b.theta2) + std::abs(a.theta3 - b.theta3) < 1e-11) break;
    const JointSample mid{0.5 * (a.theta2 + b.theta2), 0.5 * (a.theta3 + b.theta3)};
    const double sm = reduced_singularity(p, mid.theta2, mid.theta3);
    if ((sm > 0.0) == pos_a) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return {normalize_angle(0.5 * (a.theta2 + b.theta2)), normalize_angle(0.5 * (a.theta3 + b.theta3))};
}

// Edge ids: 2 * (i * n + j) for the theta2-edge leaving node (i, j), +1 for the theta3-edge.
std::vector<JointCurve> march(const DesignParams& p, const Lattice& g) {
  const int n = g.n;
  const std::size_t edges = 2 * static_cast<std::size_t>(n) * n;
  std::vector<int> vertex_of(edges, -1);
  std::vector<JointSample> vertices;

  auto positive = [&](int i, int j) { return g.at(i, j) > 0.0; };
  auto edge_vertex = [&](int i, int j, int dir) -> int {
    const int wi = g.wrap(i);
    const int wj = g.wrap(j);
    const std::size_t id = 2 * (static_cast<std::size_t>(wi) * n + wj) + dir;
    if (vertex_of[id] >= 0) return vertex_of[id];
    const JointSample a{g.angle(wi), g.angle(wj)};
    const JointSample b{dir == 0 ? a.theta2 + g.h : a.theta2, dir == 1 ? a.theta3 + g.h : a.theta3};
    vertex_of[id] = static_cast<int>(vertices.size());
    vertices.push_back(refine_edge(p, a, b, g.at(wi, wj)));
    return vertex_of[id];
  };

  std::vector<std::array<int, 2>> links;
  auto link = [&](int a, int b) {
    for (int v : {a, b}) {
      if (static_cast<std::size_t>(v) >= links.size()) links.resize(v + 1, {-1, -1});
    }
    (links[a][0] < 0 ? links[a][0] : links[a][1]) = b;
    (links[b][0] < 0 ? links[b][0] : links[b][1]) = a;
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool c00 = positive(i, j);
      const bool c10 = positive(i + 1, j);
      const bool c11 = positive(i + 1, j + 1);
      const bool c01 = positive(i, j + 1);
      // bottom, right, top, left
      const bool cross[4] = {c00 != c10, c10 != c11, c01 != c11, c00 != c01};
      const int count = cross[0] + cross[1] + cross[2] + cross[3];
      if (count == 0) continue;
      int v[4] = {-1, -1, -1, -1};
      if (cross[0]) v[0] = edge_vertex(i, j, 0);
      if (cross[1]) v[1] = edge_vertex(i + 1, j, 1);
      if (cross[2]) v[2] = edge_vertex(i, j + 1, 0);
      if (cross[3]) v[3] = edge_vertex(i, j, 1);
      if (count == 4) {
        // Saddle: keep both branches going straight through the cell.
        link(v[0], v[2]);
        link(v[1], v[3]);
      } else {
        int first = -1;
        for (int k = 0; k < 4; ++k) {
          if (v[k] < 0) continue;
          if (first < 0) {
            first = v[k];
          } else {
            link(first, v[k]);
          }
        }
      }
    }
  }
  links.resize(vertices.size(), {-1, -1});

  std::vector<JointCurve> curves;
  std::vector<char> used(vertices.size(), 0);
  for (std::size_t start = 0; start < vertices.size(); ++start) {
    if (used[start]) continue;
    JointCurve curve;
    int prev = -1;
    int cur = static_cast<int>(start);
    while (cur >= 0 && !used[cur]) {
      used[cur] = 1;
      curve.samples.push_back(vertices[cur]);
      int next = links[cur][0] == prev ? links[cur][1] : links[cur][0];
      // A two-vertex loop lists the neighbour twice.
      if (next == prev && links[cur][0] == links[cur][1]) next = -1;
      prev = cur;
      cur = next;
    }
    curve.closed = cur == static_cast<int>(start);
    curves.push_back(std::move(curve));
  }
  return curves;
}

// Golden-section minimum of sign * S along one lattice line.
double golden_minimum(const std::function<double(double)>& f, double lo, double hi) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

struct TangentialPoint {
  int line;       // lattice line index the scan ran along
  double along;   // refined angle along the scan direction
};

// Zeros where S touches 0 without changing sign. by_column = true scans theta3 at fixed theta2.
std::vector<TangentialPoint> tangential_scan(const DesignParams& p, const Lattice& g, bool by_column) {
  std::vector<TangentialPoint> out;
  const int n = g.n;
  const double accept = 1e-12 * g.scale;
  for (int line = 0; line < n; ++line) {
    for (int k = 0; k < n; ++k) {
      auto value = [&](int kk) { return by_column ? g.at(line, kk) : g.at(kk, line); };
      const double s0 = value(k - 1);
      const double s1 = value(k);
      const double s2 = value(k + 1);
      const bool same_sign = (s0 > 0.0 && s1 > 0.0 && s2 > 0.0) || (s0 < 0.0 && s1 < 0.0 && s2 < 0.0);
      if (!same_sign) continue;
      if (!(std::abs(s1) <= std::abs(s0) && std::abs(s1) < std::abs(s2))) continue;
      if (std::abs(s1) > 1e-3 * g.scale) continue;
      const double sign = s1 > 0.0 ? 1.0 : -1.0;
      const double fixed = g.angle(line);
      auto f = [&](double t) {
        return sign * (by_column ? reduced_singularity(p, fixed, t) : reduced_singularity(p, t, fixed));
      };
      const double centre = g.angle(k);
      const double t = golden_minimum(f, centre - g.h, centre + g.h);
      if (std::abs(f(t)) <= accept) out.push_back({line, normalize_angle(t)});
    }
  }
  return out;
}

// Links tangential points on neighbouring lattice lines into curves.
std::vector<JointCurve> chain_tangential(const std::vector<TangentialPoint>& pts, const Lattice& g,
                                         bool by_column) {
  const int n = g.n;
  std::vector<std::vector<int>> per_line(n);
  for (std::size_t k = 0; k < pts.size(); ++k) per_line[pts[k].line].push_back(static_cast<int>(k));

  std::vector<int> next(pts.size(), -1);
  std::vector<int> prev(pts.size(), -1);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const int line = (pts[k].line + 1) % n;
    int best = -1;
    double best_gap = 2.0 * g.h;
    for (int cand : per_line[line]) {
      const double gap = wrapped_gap(pts[k].along, pts[cand].along);
      if (gap < best_gap && prev[cand] < 0) {
        best_gap = gap;
        best = cand;
      }
    }
    if (best >= 0) {
      next[k] = best;
      prev[best] = static_cast<int>(k);
    }
  }

  auto sample = [&](int k) {
    const double fixed = g.angle(pts[k].line);
    return by_column ? JointSample{fixed, pts[k].along} : JointSample{pts[k].along, fixed};
  };

  std::vector<JointCurve> curves;
  std::vector<char> used(pts.size(), 0);
  auto walk = [&](int start) {
    JointCurve c;
    c.tangential = true;
    int cur = start;
    while (cur >= 0 && !used[cur]) {
      used[cur] = 1;
      c.samples.push_back(sample(cur));
      cur = next[cur];
    }
    c.closed = cur == start;
    if (c.samples.size() >= 2) curves.push_back(std::move(c));
  };
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (prev[k] < 0) walk(static_cast<int>(k));
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!used[k]) walk(static_cast<int>(k));
  }
  return curves;
}

}  // namespace

double workspace_diameter(const DesignParams& p) { return 2.0 * p.reach_bound(); }

std::vector<JointCurve> singular_branches(const DesignParams& p, int n) {
  p.validate();
  if (n < 64) throw InvalidInput(fmt::format("trace resolution must be at least 64, got {}", n));
  const Lattice g = sample_lattice(p, n);
  if (g.scale == 0.0) return {};

  std::vector<JointCurve> curves = march(p, g);

  const std::vector<TangentialPoint> cols = tangential_scan(p, g, true);
  std::vector<TangentialPoint> rows = tangential_scan(p, g, false);
  // Drop row hits that the column scan already covers.
  std::erase_if(rows, [&](const TangentialPoint& r) {
    const JointSample rs{r.along, g.angle(r.line)};
    return std::any_of(cols.begin(), cols.end(), [&](const TangentialPoint& c) {
      return torus_distance(rs, JointSample{g.angle(c.line), c.along}) < 2.0 * g.h;
    });
  });
  for (JointCurve& c : chain_tangential(cols, g, true)) curves.push_back(std::move(c));
  for (JointCurve& c : chain_tangential(rows, g, false)) curves.push_back(std::move(c));

  // Deterministic order: longest first, then by first sample.
  std::stable_sort(curves.begin(), curves.end(), [](const JointCurve& a, const JointCurve& b) {
    if (a.samples.size() != b.samples.size()) return a.samples.size() > b.samples.size();
    if (a.samples.front().theta2 != b.samples.front().theta2) return a.samples.front().theta2 < b.samples.front().theta2;
    return a.samples.front().theta3 < b.samples.front().theta3;
  });
  for (std::size_t k = 0; k < curves.size(); ++k) curves[k].branch_id = static_cast<int>(k);
  return curves;
}

SectionCurve section_image(const JointCurve& curve, const DesignParams& p) {
  SectionCurve out;
  out.branch_id = curve.branch_id;
  out.closed = curve.closed;
  out.preimage = curve.samples;
  out.vertices.reserve(curve.samples.size());
  for (const JointSample& s : curve.samples) {
    out.vertices.push_back(fk(p, JointConfig(0.0, s.theta2, s.theta3)).section);
  }
  return out;
}

std::vector<SectionCurve> section_images(const std::vector<JointCurve>& curves, const DesignParams& p) {
  std::vector<SectionCurve> out;
  out.reserve(curves.size());
  for (const JointCurve& c : curves) out.push_back(section_image(c, p));
  return out;
}

namespace {

struct Segment {
  SectionPoint a;
  SectionPoint b;
  JointSample pa;
  JointSample pb;
};

std::vector<Segment> collect_segments(const std::vector<SectionCurve>& curves, double min_length) {
  std::vector<Segment> segs;
  for (const SectionCurve& c : curves) {
    const std::size_t m = c.vertices.size();
    if (m < 2) continue;
    const std::size_t count = c.closed ? m : m - 1;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t k1 = (k + 1) % m;
      const Segment s{c.vertices[k], c.vertices[k1], c.preimage[k], c.preimage[k1]};
      if (std::hypot(s.b.rho - s.a.rho, s.b.z - s.a.z) <= min_length) continue;
      // Stitching across the torus seam is fine, but a real jump means a broken chain.
      if (torus_distance(s.pa, s.pb) > 0.5) continue;
      segs.push_back(s);
    }
  }
  return segs;
}

JointSample lerp(const JointSample& a, const JointSample& b, double t) {
  const double d2 = normalize_angle(b.theta2 - a.theta2);
  const double d3 = normalize_angle(b.theta3 - a.theta3);
  return {normalize_angle(a.theta2 + t * d2), normalize_angle(a.theta3 + t * d3)};
}

// Image tangent of {S = 0} at a joint point, in (rho, z).
Eigen::Vector2d image_tangent(const DesignParams& p, const JointSample& q) {
  const double step = 1e-6;
  const double s2 = (reduced_singularity(p, q.theta2 + step, q.theta3) -
                     reduced_singularity(p, q.theta2 - step, q.theta3)) / (2.0 * step);
  const double s3 = (reduced_singularity(p, q.theta2, q.theta3 + step) -
                     reduced_singularity(p, q.theta2, q.theta3 - step)) / (2.0 * step);
  const SectionJet jet = section_jet(p, q.theta2, q.theta3);
  const Eigen::Vector2d t(-s3, s2);
  // d(rho) = d(rho^2) / (2 rho) keeps the angle independent of the length scale.
  const double rho = std::sqrt(std::max(jet.rho2, 0.0));
  const double drho2 = jet.drho2_dt2 * t[0] + jet.drho2_dt3 * t[1];
  return {rho > 0.0 ? drho2 / (2.0 * rho) : drho2, jet.dz_dt2 * t[0] + jet.dz_dt3 * t[1]};
}

struct Refined {
  JointSample a;
  JointSample b;
  double residual = 0.0;
  bool converged = false;
};

// Levenberg-Marquardt on S(a) = S(b) = 0 and equal section images.
Refined refine_node(const DesignParams& p, JointSample a, JointSample b, double s_scale, double diam) {
  auto residual = [&](const Eigen::Vector4d& v) {
    const SectionJet ja = section_jet(p, v[0], v[1]);
    const SectionJet jb = section_jet(p, v[2], v[3]);
    Eigen::Vector4d r;
    r << ja.determinant() / s_scale, jb.determinant() / s_scale, (ja.rho2 - jb.rho2) / (diam * diam),
        (ja.z - jb.z) / diam;
    return r;
  };
  Eigen::Vector4d v(a.theta2, a.theta3, b.theta2, b.theta3);
  Eigen::Vector4d r = residual(v);
  double lambda = 1e-6;
  for (int it = 0; it < 60 && r.norm() > 1e-13; ++it) {
    Eigen::Matrix4d jac;
    const double step = 1e-7;
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d vp = v;
      Eigen::Vector4d vm = v;
      vp[k] += step;
      vm[k] -= step;
      jac.col(k) = (residual(vp) - residual(vm)) / (2.0 * step);
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jtr = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::Matrix4d damped = jtj;
      damped.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Eigen::Vector4d dv = damped.ldlt().solve(-jtr);
      if (!dv.allFinite()) break;
      const Eigen::Vector4d trial = v + dv;
      const Eigen::Vector4d rt = residual(trial);
      if (rt.norm() < r.norm()) {
        v = trial;
        r = rt;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  Refined out;
  out.a = {normalize_angle(v[0]), normalize_angle(v[1])};
  out.b = {normalize_angle(v[2]), normalize_angle(v[3])};
  out.residual = r.norm();
  out.converged = out.residual <= 1e-10;
  return out;
}

// Order of the theta3 root of the (unreduced) quartic, flipped to 1/t near theta3 = pi.
int quartic_order(const Quartic& q, double theta3, double rel_tol) {
  const double t = std::tan(0.5 * theta3);
  const bool flip = std::abs(t) > 1.0;
  const Quartic r = flip ? Quartic{q.e, q.d, q.c, q.b, q.a} : q;
  const double x = flip ? 1.0 / t : t;
  const double ax = std::abs(x);
  const double qs = q.max_abs();
  if (qs == 0.0) return 4;
  const double v0 = std::abs(r(x)) / (qs * (1 + ax + ax * ax + ax * ax * ax + ax * ax * ax * ax));
  const double v1 = std::abs(r.derivative(x)) / (qs * (1 + 2 * ax + 3 * ax * ax + 4 * ax * ax * ax));
  if (v0 > rel_tol) return 0;
  return v1 > rel_tol ? 1 : 2;
}

bool double_root_witness(const DesignParams& p, const SectionPoint& at, const JointSample& pre, double rel_tol) {
  const double rho2 = at.rho * at.rho;
  if (p.d2 > 0.0) return quartic_order(quartic_at(p, rho2, at.z), pre.theta3, rel_tol) >= 2;
  if (reduced_root_multiplicity(p, rho2, at.z, pre.theta3, rel_tol) >= 2) return true;
  // Otherwise the two theta2 branches X = +-sqrt(rho^2 - Y^2) must merge.
  const double c2 = std::cos(pre.theta2);
  const double s2 = std::sin(pre.theta2);
  const double X = p.d2 + c2 * (p.d3 + p.d4 * std::cos(pre.theta3)) + s2 * p.r3;
  return std::abs(X) <= std::sqrt(rel_tol) * p.reach_bound();
}

}  // namespace

NodeSearch find_nodes(const DesignParams& p, const std::vector<SectionCurve>& curves, double tol, int grid_n) {
  p.validate();
  NodeSearch out;
  const double diam = workspace_diameter(p);
  const double h = kTwoPi / std::max(grid_n, 1);
  const std::vector<Segment> segs = collect_segments(curves, 1e-14 * diam);
  if (segs.empty()) return out;

  double s_scale = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      s_scale = std::max(s_scale, std::abs(reduced_singularity(p, -kPi + (i + 0.5) * kTwoPi / 64,
                                                                -kPi + (j + 0.5) * kTwoPi / 64)));
    }
  }
  if (s_scale == 0.0) s_scale = 1.0;

  double max_len = 0.0;
  for (const Segment& s : segs) max_len = std::max(max_len, std::hypot(s.b.rho - s.a.rho, s.b.z - s.a.z));
  const double cell = std::max(diam / 256.0, 2.0 * max_len);
  auto key = [&](double rho, double z) {
    const auto i = static_cast<std::int64_t>(std::floor(rho / cell));
    const auto j = static_cast<std::int64_t>(std::floor(z / cell));
    return (i << 32) ^ (j & 0xffffffff);
  };
  std::unordered_map<std::int64_t, std::vector<int>> buckets;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const Segment& s = segs[k];
    const auto i0 = static_cast<std::int64_t>(std::floor(std::min(s.a.rho, s.b.rho) / cell));
    const auto i1 = static_cast<std::int64_t>(std::floor(std::max(s.a.rho, s.b.rho) / cell));
    const auto j0 = static_cast<std::int64_t>(std::floor(std::min(s.a.z, s.b.z) / cell));
    const auto j1 = static_cast<std::int64_t>(std::floor(std::max(s.a.z, s.b.z) / cell));
    for (auto i = i0; i <= i1; ++i) {
      for (auto j = j0; j <= j1; ++j) buckets[(i << 32) ^ (j & 0xffffffff)].push_back(static_cast<int>(k));
    }
  }

  struct Candidate {
    SectionPoint at;
    JointSample pa;
    JointSample pb;
    double seg_len;
  };
  std::vector<Candidate> raw;
  const double min_sin = 0.1;
  for (const auto& [bucket, list] : buckets) {
    for (std::size_t u = 0; u < list.size(); ++u) {
      for (std::size_t v = u + 1; v < list.size(); ++v) {
        const Segment& s = segs[list[u]];
        const Segment& t = segs[list[v]];
        const double d1r = s.b.rho - s.a.rho, d1z = s.b.z - s.a.z;
        const double d2r = t.b.rho - t.a.rho, d2z = t.b.z - t.a.z;
        const double den = d1r * d2z - d1z * d2r;
        if (den == 0.0) continue;
        const double wr = t.a.rho - s.a.rho, wz = t.a.z - s.a.z;
        const double ps = (wr * d2z - wz * d2r) / den;
        const double pt = (wr * d1z - wz * d1r) / den;
        if (ps < 0.0 || ps > 1.0 || pt < 0.0 || pt > 1.0) continue;
        const double l1 = std::hypot(d1r, d1z);
        const double l2 = std::hypot(d2r, d2z);
        if (std::abs(den) / (l1 * l2) < min_sin) continue;
        const SectionPoint at{s.a.rho + ps * d1r, s.a.z + ps * d1z};
        if (key(at.rho, at.z) != bucket) continue;
        const JointSample pa = lerp(s.pa, s.pb, ps);
        const JointSample pb = lerp(t.pa, t.pb, pt);
        if (torus_distance(pa, pb) <= 20.0 * h) continue;
        // Crossings at the axis are reflections of rho = |.|, not nodes.
        if (at.rho < 2.0 * std::max(l1, l2)) continue;
        raw.push_back({at, pa, pb, std::max(l1, l2)});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Candidate& a, const Candidate& b) {
    return a.at.rho != b.at.rho ? a.at.rho < b.at.rho : a.at.z < b.at.z;
  });

  std::vector<NodePoint> found;
  for (const Candidate& c : raw) {
    // Cheap pre-merge: the same crossing is hit from several covering preimages.
    const bool seen = std::any_of(found.begin(), found.end(), [&](const NodePoint& n) {
      return std::hypot(n.location.rho - c.at.rho, n.location.z - c.at.z) <= 2.0 * c.seg_len;
    });
    if (seen) continue;

    NodePoint node;
    const Refined r = refine_node(p, c.pa, c.pb, s_scale, diam);
    if (r.converged) {
      const FkResult fa = fk(p, JointConfig(0.0, r.a.theta2, r.a.theta3));
      const FkResult fb = fk(p, JointConfig(0.0, r.b.theta2, r.b.theta3));
      const SectionPoint at{0.5 * (fa.section.rho + fb.section.rho), 0.5 * (fa.section.z + fb.section.z)};
      if (at.rho < 1e-6 * diam) continue;
      if (torus_distance(r.a, r.b) <= 10.0 * tolerance::kRootCluster) continue;
      const Eigen::Vector2d ta = image_tangent(p, r.a);
      const Eigen::Vector2d tb = image_tangent(p, r.b);
      const double na = ta.norm();
      const double nb = tb.norm();
      if (na > 0.0 && nb > 0.0) {
        const double sin_angle = std::abs(ta[0] * tb[1] - ta[1] * tb[0]) / (na * nb);
        if (sin_angle < 0.05) continue;
      }
      node.location = at;
      node.preimage_a = r.a;
      node.preimage_b = r.b;
      node.residual = std::hypot(fa.section.rho - fb.section.rho, fa.section.z - fb.section.z);
      node.refined = true;
      node.witnessed = double_root_witness(p, at, r.a, 1e-6) && double_root_witness(p, at, r.b, 1e-6);
    } else {
      node.location = c.at;
      node.preimage_a = c.pa;
      node.preimage_b = c.pb;
      node.residual = r.residual;
      node.refined = false;
      node.witnessed = double_root_witness(p, c.at, c.pa, 1e-2) && double_root_witness(p, c.at, c.pb, 1e-2);
    }
    if (!node.witnessed) continue;
    const double merge = node.refined ? tol : std::max(tol, 2.0 * c.seg_len);
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const NodePoint& n) {
      return std::hypot(n.location.rho - node.location.rho, n.location.z - node.location.z) <= merge;
    });
    if (!duplicate) found.push_back(node);
  }

  std::sort(found.begin(), found.end(), [](const NodePoint& a, const NodePoint& b) {
    return a.location.rho != b.location.rho ? a.location.rho < b.location.rho : a.location.z < b.location.z;
  });
  const double grid_step = p.reach_bound() * h;
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      const double gap = std::hypot(found[i].location.rho - found[j].location.rho,
                                    found[i].location.z - found[j].location.z);
      if (gap < 3.0 * grid_step) {
        out.warnings.push_back(fmt::format(
            "ResolutionWarning: nodes at ({:.6g}, {:.6g}) and ({:.6g}, {:.6g}) are {:.3g} apart, under 3 grid steps",
            found[i].location.rho, found[i].location.z, found[j].location.rho, found[j].location.z, gap));
      }
    }
  }
  out.nodes = std::move(found);
  return out;
}

namespace {

// Speed of the image of {S = 0} per unit joint arc, in (rho, z), at the point
// obtained by projecting q onto S = 0.
struct Projected {
  JointSample q;
  double speed = 0.0;
  bool ok = false;
};

Projected project_and_speed(const DesignParams& p, JointSample q) {
  const double step = 1e-6;
  auto grad = [&](const JointSample& x) {
    const double g2 = (reduced_singularity(p, x.theta2 + step, x.theta3) -
                       reduced_singularity(p, x.theta2 - step, x.theta3)) / (2.0 * step);
    const double g3 = (reduced_singularity(p, x.theta2, x.theta3 + step) -
                       reduced_singularity(p, x.theta2, x.theta3 - step)) / (2.0 * step);
    return Eigen::Vector2d(g2, g3);
  };
  Projected out;
  for (int it = 0; it < 20; ++it) {
    const double s = reduced_singularity(p, q.theta2, q.theta3);
    const Eigen::Vector2d g = grad(q);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) return out;
    const Eigen::Vector2d dq = -s / g2 * g;
    q.theta2 += dq[0];
    q.theta3 += dq[1];
    if (dq.norm() < 1e-14) break;
  }
  const Eigen::Vector2d g = grad(q);
  if (g.norm() == 0.0) return out;
  const Eigen::Vector2d t = Eigen::Vector2d(-g[1], g[0]).normalized();
  const SectionJet jet = section_jet(p, q.theta2, q.theta3);
  out.q = {normalize_angle(q.theta2), normalize_angle(q.theta3)};
  const double rho = std::sqrt(std::max(jet.rho2, 0.0));
  const double drho2 = jet.drho2_dt2 * t[0] + jet.drho2_dt3 * t[1];
  out.speed = std::hypot(rho > 0.0 ? drho2 / (2.0 * rho) : drho2, jet.dz_dt2 * t[0] + jet.dz_dt3 * t[1]);
  out.ok = true;
  return out;
}

}  // namespace

CuspSearch find_cusps(const DesignParams& p, const std::vector<SectionCurve>& curves, double tol) {
  p.validate();
  CuspSearch out;
  const double diam = workspace_diameter(p);
  for (const SectionCurve& c : curves) {
    const std::size_t m = c.vertices.size();
    if (m < 3) continue;
    std::vector<double> speed(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      if (!c.closed && (k == 0 || k + 1 == m)) {
        speed[k] = std::numeric_limits<double>::infinity();
        continue;
      }
      const std::size_t a = (k + m - 1) % m;
      const std::size_t b = (k + 1) % m;
      const double joint = torus_distance(c.preimage[a], c.preimage[b]);
      const double image = std::hypot(c.vertices[b].rho - c.vertices[a].rho, c.vertices[b].z - c.vertices[a].z);
      speed[k] = joint > 0.0 ? image / joint : std::numeric_limits<double>::infinity();
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (!c.closed && (k == 0 || k + 1 == m)) continue;
      const std::size_t a = (k + m - 1) % m;
      const std::size_t b = (k + 1) % m;
      if (!(speed[k] <= speed[a] && speed[k] <= speed[b])) continue;
      if (speed[k] >= tol) continue;
      const double in_r = c.vertices[k].rho - c.vertices[a].rho;
      const double in_z = c.vertices[k].z - c.vertices[a].z;
      const double out_r = c.vertices[b].rho - c.vertices[k].rho;
      const double out_z = c.vertices[b].z - c.vertices[k].z;
      if (!(in_r * out_r + in_z * out_z < 0.0)) continue;
      ++out.candidates;

      // Refine along the local chord to the speed minimum before confirming.
      const JointSample qa = c.preimage[a];
      const JointSample qb = c.preimage[b];
      auto f = [&](double t) {
        const Projected pr = project_and_speed(p, lerp(qa, qb, t));
        return pr.ok ? pr.speed : std::numeric_limits<double>::infinity();
      };
      const double t_best = golden_minimum(f, 0.0, 1.0);
      const Projected best = project_and_speed(p, lerp(qa, qb, t_best));
      if (!best.ok) continue;
      const FkResult img = fk(p, JointConfig(0.0, best.q.theta2, best.q.theta3));
      if (img.section.rho < 1e-6 * diam) continue;  // axis reflection
      const int mult = reduced_root_multiplicity(p, img.section.rho * img.section.rho, img.section.z,
                                                 best.q.theta3, 1e-6);
      if (mult < 3) continue;
      const bool duplicate = std::any_of(out.cusps.begin(), out.cusps.end(), [&](const CuspPoint& cp) {
        return std::hypot(cp.location.rho - img.section.rho, cp.location.z - img.section.z) <= 1e-4 * diam;
      });
      if (!duplicate) out.cusps.push_back({img.section, best.q, mult});
    }
  }
  std::sort(out.cusps.begin(), out.cusps.end(), [](const CuspPoint& a, const CuspPoint& b) {
    return a.location.rho != b.location.rho ? a.location.rho < b.location.rho : a.location.z < b.location.z;
  });
  return out;
}

}  // namespace ortho3r
