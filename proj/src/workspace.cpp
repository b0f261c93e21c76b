#include "ortho3r/workspace.hpp"

#include "ortho3r/errors.hpp"
#include "ortho3r/ikquartic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace ortho3r {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Runs body(begin, end) over [0, count) split across hardware threads.
template <typename Body>
void parallel_rows(int count, Body body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(count, 1))));
  if (workers <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([=, &body] { body(begin, end); });
  }
  for (std::thread& t : pool) t.join();
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Aspect labels on the m x m joint torus; -1 marks the singular band.
struct AspectGrid {
  int m = 0;
  double h = 0.0;
  std::vector<int> label;
  std::vector<std::int8_t> sign;
  int count = 0;

  double angle(int i) const { return -kPi + (i + 0.5) * h; }
  int index(double theta) const {
    const int i = static_cast<int>(std::floor((normalize_angle(theta) + kPi) / h));
    return std::clamp(i, 0, m - 1);
  }
  int wrap(int i) const { return ((i % m) + m) % m; }
};

AspectGrid build_aspect_grid(const DesignParams& p, int m, const std::vector<JointCurve>& curves) {
  AspectGrid a;
  a.m = m;
  a.h = kTwoPi / m;
  const std::size_t total = static_cast<std::size_t>(m) * m;
  std::vector<char> band(total, 0);
  for (const JointCurve& c : curves) {
    const std::size_t k_end = c.closed ? c.samples.size() : c.samples.size() - 1;
    for (std::size_t k = 0; k < k_end && c.samples.size() > 1; ++k) {
      const JointSample& s0 = c.samples[k];
      const JointSample& s1 = c.samples[(k + 1) % c.samples.size()];
      const double d2 = normalize_angle(s1.theta2 - s0.theta2);
      const double d3 = normalize_angle(s1.theta3 - s0.theta3);
      const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * std::hypot(d2, d3) / a.h)));
      for (int t = 0; t <= steps; ++t) {
        const double f = static_cast<double>(t) / steps;
        const int i = a.index(s0.theta2 + f * d2);
        const int j = a.index(s0.theta3 + f * d3);
        band[static_cast<std::size_t>(i) * m + j] = 1;
      }
    }
  }

  a.sign.resize(total);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double s = reduced_singularity(p, a.angle(i), a.angle(j));
      a.sign[static_cast<std::size_t>(i) * m + j] = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
      if (s == 0.0) band[static_cast<std::size_t>(i) * m + j] = 1;
    }
  }

  UnionFind uf(total);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * m + j;
      if (band[c]) continue;
      const std::size_t right = static_cast<std::size_t>(a.wrap(i + 1)) * m + j;
      const std::size_t up = static_cast<std::size_t>(i) * m + a.wrap(j + 1);
      if (!band[right] && a.sign[right] == a.sign[c]) uf.unite(static_cast<int>(c), static_cast<int>(right));
      if (!band[up] && a.sign[up] == a.sign[c]) uf.unite(static_cast<int>(c), static_cast<int>(up));
    }
  }
  a.label.assign(total, -1);
  std::vector<int> compact(total, -1);
  for (std::size_t c = 0; c < total; ++c) {
    if (band[c]) continue;
    const int root = uf.find(static_cast<int>(c));
    if (compact[root] < 0) compact[root] = a.count++;
    a.label[c] = compact[root];
  }
  return a;
}

// Aspect of a joint configuration; band cells defer to the nearest labelled
// cell on the same side of S = 0.
int aspect_of(const DesignParams& p, const AspectGrid& a, double theta2, double theta3) {
  const int i0 = a.index(theta2);
  const int j0 = a.index(theta3);
  const int direct = a.label[static_cast<std::size_t>(i0) * a.m + j0];
  if (direct >= 0) return direct;
  const double s = reduced_singularity(p, theta2, theta3);
  const std::int8_t want = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
  for (int r = 1; r <= 4; ++r) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int di = -r; di <= r; ++di) {
      for (int dj = -r; dj <= r; ++dj) {
        if (std::max(std::abs(di), std::abs(dj)) != r) continue;
        const std::size_t c = static_cast<std::size_t>(a.wrap(i0 + di)) * a.m + a.wrap(j0 + dj);
        if (a.label[c] < 0 || (want != 0 && a.sign[c] != want)) continue;
        const double d = std::hypot(std::abs(normalize_angle(a.angle(a.wrap(i0 + di)) - theta2)),
                                    std::abs(normalize_angle(a.angle(a.wrap(j0 + dj)) - theta3)));
        if (d < best_d) {
          best_d = d;
          best = a.label[c];
        }
      }
    }
    if (best >= 0) return best;
  }
  return -1;
}

int count_of(const IkSolutionSet& set) {
  if (set.continuum && set.size() < 4) return 4;
  return static_cast<int>(std::min<std::size_t>(set.size(), 4));
}

void check_ring(const IksField& f) {
  const int rows = f.rows();
  const int cols = f.cols();
  for (int i = 0; i < rows; ++i) {
    if (f.at(i, 0) != 0 || f.at(i, cols - 1) != 0) {
      throw GridTooSmall(fmt::format("reachable cell on the z = +-rmax border (rmax = {})", f.grid.rmax));
    }
  }
  for (int j = 0; j < cols; ++j) {
    if (f.at(rows - 1, j) != 0) {
      throw GridTooSmall(fmt::format("reachable cell on the rho = rmax border (rmax = {})", f.grid.rmax));
    }
  }
}

// One inverse-kinematics pass: counts, and optionally aspect hits per cell.
struct Scan {
  IksField field;
  std::vector<std::vector<int>> aspects_hit;  // per cell, unique aspect labels
};

Scan scan_grid(const DesignParams& p, const GridSpec& g, const AspectGrid* asp) {
  g.validate();
  Scan s;
  s.field.grid = g;
  const int rows = g.n;
  const int cols = 2 * g.n;
  s.field.counts.assign(static_cast<std::size_t>(rows) * cols, 0);
  if (asp != nullptr) s.aspects_hit.resize(s.field.counts.size());
  const double reach = p.reach_bound();
  parallel_rows(rows, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const double rho = g.rho_at(i);
      for (int j = 0; j < cols; ++j) {
        const double z = g.z_at(j);
        if (rho * rho + z * z > reach * reach) continue;
        const IkSolutionSet set = ik(p, CartesianPoint{rho, 0.0, z});
        const std::size_t c = static_cast<std::size_t>(i) * cols + j;
        s.field.counts[c] = static_cast<std::uint8_t>(count_of(set));
        if (asp == nullptr) continue;
        std::vector<int>& hit = s.aspects_hit[c];
        for (const JointConfig& q : set.solutions) {
          const int label = aspect_of(p, *asp, q.theta2(), q.theta3());
          if (label >= 0 && std::find(hit.begin(), hit.end(), label) == hit.end()) hit.push_back(label);
        }
      }
    }
  });
  check_ring(s.field);
  return s;
}

AspectSummary summarize_aspects(const AspectGrid& a, const Scan& scan, const std::vector<std::uint8_t>& band) {
  AspectSummary out;
  out.m = a.m;
  out.count = static_cast<std::size_t>(a.count);
  out.joint_fraction.assign(a.count, 0.0);
  const double total = static_cast<double>(a.m) * a.m;
  std::size_t band_cells = 0;
  for (int l : a.label) {
    if (l >= 0) {
      out.joint_fraction[l] += 1.0 / total;
    } else {
      ++band_cells;
    }
  }
  out.singular_band_fraction = band_cells / total;

  std::vector<std::size_t> hits(a.count, 0);
  std::size_t reachable = 0;
  for (std::size_t c = 0; c < scan.field.counts.size(); ++c) {
    if (scan.field.counts[c] == 0 || band[c]) continue;
    ++reachable;
    for (int l : scan.aspects_hit[c]) ++hits[l];
  }
  out.coverage.assign(a.count, 0.0);
  for (int l = 0; l < a.count; ++l) {
    out.coverage[l] = reachable > 0 ? static_cast<double>(hits[l]) / reachable : 0.0;
    out.feasible_ratio = std::max(out.feasible_ratio, out.coverage[l]);
  }
  return out;
}

double segment_distance(double px, double pz, const SectionPoint& a, const SectionPoint& b) {
  const double dr = b.rho - a.rho;
  const double dz = b.z - a.z;
  const double len2 = dr * dr + dz * dz;
  double t = len2 > 0.0 ? ((px - a.rho) * dr + (pz - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (a.rho + t * dr), pz - (a.z + t * dz));
}

}  // namespace

GridSpec GridSpec::defaults(const DesignParams& p, int n) { return GridSpec{1.02 * p.reach_bound(), n}; }

void GridSpec::validate() const {
  if (n < 64) throw InvalidInput(fmt::format("grid resolution must be at least 64, got {}", n));
  if (!(rmax > 0.0) || !std::isfinite(rmax)) throw InvalidInput("grid extent rmax must be positive");
}

IksField iks_field(const DesignParams& p, const GridSpec& g) {
  p.validate();
  return scan_grid(p, g, nullptr).field;
}

std::vector<std::uint8_t> singular_band(const GridSpec& g, const std::vector<SectionCurve>& curves) {
  const int rows = g.n;
  const int cols = 2 * g.n;
  const double cell = g.cell();
  const double radius = 0.5 * std::sqrt(2.0) * cell;
  std::vector<std::uint8_t> band(static_cast<std::size_t>(rows) * cols, 0);
  for (const SectionCurve& c : curves) {
    const std::size_t m = c.vertices.size();
    if (m == 0) continue;
    const std::size_t k_end = m == 1 ? 1 : (c.closed ? m : m - 1);
    for (std::size_t k = 0; k < k_end; ++k) {
      const SectionPoint& a = c.vertices[k];
      const SectionPoint& b = c.vertices[(k + 1) % m];
      const int i0 = std::max(0, static_cast<int>(std::floor((std::min(a.rho, b.rho) - radius) / cell)));
      const int i1 = std::min(rows - 1, static_cast<int>(std::floor((std::max(a.rho, b.rho) + radius) / cell)));
      const int j0 = std::max(0, static_cast<int>(std::floor((std::min(a.z, b.z) + g.rmax - radius) / cell)));
      const int j1 = std::min(cols - 1, static_cast<int>(std::floor((std::max(a.z, b.z) + g.rmax + radius) / cell)));
      for (int i = i0; i <= i1; ++i) {
        for (int j = j0; j <= j1; ++j) {
          if (segment_distance(g.rho_at(i), g.z_at(j), a, b) <= radius) {
            band[static_cast<std::size_t>(i) * cols + j] = 1;
          }
        }
      }
    }
  }
  return band;
}

Cavities cavities(const IksField& field, const std::vector<std::uint8_t>* excluded) {
  Cavities out;
  const int rows = field.rows();
  const int cols = field.cols();
  const std::size_t total = field.counts.size();
  const double cell = field.grid.cell();

  std::vector<int> comp(total, -1);
  std::vector<std::size_t> stack;
  int next_id = 0;
  for (std::size_t start = 0; start < total; ++start) {
    if (field.counts[start] != 0 || comp[start] >= 0) continue;
    bool touches_edge = false;
    bool has_free_cell = false;
    std::size_t size = 0;
    std::size_t first = start;
    stack.push_back(start);
    comp[start] = next_id;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++size;
      first = std::min(first, c);
      if (excluded == nullptr || !(*excluded)[c]) has_free_cell = true;
      const int i = static_cast<int>(c / cols);
      const int j = static_cast<int>(c % cols);
      if (i == 0 || i == rows - 1 || j == 0 || j == cols - 1) touches_edge = true;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ni = i + di[k];
        const int nj = j + dj[k];
        if (ni < 0 || ni >= rows || nj < 0 || nj >= cols) continue;
        const std::size_t nc = static_cast<std::size_t>(ni) * cols + nj;
        if (field.counts[nc] != 0 || comp[nc] >= 0) continue;
        comp[nc] = next_id;
        stack.push_back(nc);
      }
    }
    ++next_id;
    if (touches_edge || !has_free_cell) continue;
    Void v;
    v.cells = size;
    v.area = static_cast<double>(size) * cell * cell;
    v.representative = {field.grid.rho_at(static_cast<int>(first / cols)),
                        field.grid.z_at(static_cast<int>(first % cols))};
    out.voids.push_back(v);
  }

  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      if (field.at(i, j) == 0) continue;
      out.hole_profile.push_back({field.grid.rho_at(i), field.grid.z_at(j)});
      out.hole_ratio = std::max(out.hole_ratio, field.grid.rho_at(i) / field.grid.rmax);
      break;
    }
  }
  return out;
}

double quaternary_ratio(const IksField& field, const std::vector<std::uint8_t>& band) {
  std::size_t reachable = 0;
  std::size_t quaternary = 0;
  for (std::size_t c = 0; c < field.counts.size(); ++c) {
    if (field.counts[c] == 0 || band[c]) continue;
    ++reachable;
    if (field.counts[c] == 4) ++quaternary;
  }
  return reachable > 0 ? static_cast<double>(quaternary) / reachable : 0.0;
}

Analysis analyze(const DesignParams& p, const GridSpec& g, const AnalysisOptions& options) {
  p.validate();
  g.validate();
  if (options.aspect < 128) throw InvalidInput(fmt::format("aspect resolution must be at least 128, got {}", options.aspect));
  Analysis a;
  a.params = p;
  a.options = options;
  a.grid = g;
  a.joint_curves = singular_branches(p, options.trace);
  if (a.joint_curves.empty()) a.warnings.push_back("anomaly: the singular set is empty");
  a.section_curves = section_images(a.joint_curves, p);
  const double diam = workspace_diameter(p);
  a.nodes = find_nodes(p, a.section_curves, 1e-4 * diam, options.trace);
  a.cusps = find_cusps(p, a.section_curves, 1e-3 * diam);
  for (const std::string& w : a.nodes.warnings) a.warnings.push_back(w);

  const AspectGrid grid = build_aspect_grid(p, options.aspect, a.joint_curves);
  Scan scan = scan_grid(p, g, &grid);
  a.band = singular_band(g, a.section_curves);
  a.cavities = cavities(scan.field, &a.band);
  a.aspects = summarize_aspects(grid, scan, a.band);
  a.field = std::move(scan.field);

  a.metrics.node_count = static_cast<int>(a.nodes.nodes.size());
  a.metrics.cusp_count = static_cast<int>(a.cusps.cusps.size());
  a.metrics.void_count = static_cast<int>(a.cavities.voids.size());
  a.metrics.quaternary_ratio = quaternary_ratio(a.field, a.band);
  a.metrics.hole_ratio = a.cavities.hole_ratio;
  a.metrics.feasible_ratio = a.aspects.feasible_ratio;
  return a;
}

AspectSummary aspects(const DesignParams& p, int m, const GridSpec& g) {
  p.validate();
  if (m < 128) throw InvalidInput(fmt::format("aspect resolution must be at least 128, got {}", m));
  const std::vector<JointCurve> curves = singular_branches(p, std::max(4 * m, 1024));
  const AspectGrid grid = build_aspect_grid(p, m, curves);
  const Scan scan = scan_grid(p, g, &grid);
  const std::vector<std::uint8_t> band = singular_band(g, section_images(curves, p));
  return summarize_aspects(grid, scan, band);
}

AspectSummary aspects(const DesignParams& p, int m) { return aspects(p, m, GridSpec::defaults(p, 256)); }

WorkspaceMetrics metrics(const DesignParams& p, const GridSpec& g) {
  return analyze(p, g, AnalysisOptions{g.n, 1024, 256}).metrics;
}

Analysis analyze(const DesignParams& p, const AnalysisOptions& options) {
  p.validate();
  return analyze(p, GridSpec::defaults(p, options.grid), options);
}

}  // namespace ortho3r
