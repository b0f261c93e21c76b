// atlas: command-line front end for the 3R orthogonal manipulator classifier.

#include "ortho3r/atlas.hpp"
#include "ortho3r/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace fs = std::filesystem;
using namespace ortho3r;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kOutOfFamily = 2, kIo = 3, kVerifyFailed = 4 };

struct ParamFlags {
  DesignParams p;
  void attach(CLI::App* cmd) {
    cmd->add_option("--d2", p.d2, "offset d2")->capture_default_str();
    cmd->add_option("--d3", p.d3, "link length d3")->capture_default_str();
    cmd->add_option("--d4", p.d4, "link length d4")->required();
    cmd->add_option("--r2", p.r2, "offset r2")->capture_default_str();
    cmd->add_option("--r3", p.r3, "offset r3")->capture_default_str();
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw std::ios_base::failure("failed writing " + path.string());
}

void print_metrics(const WorkspaceMetrics& m) {
  fmt::print("nodes: {}\nvoids: {}\ncusps: {}\n", m.node_count, m.void_count, m.cusp_count);
  fmt::print("quaternary_ratio: {:.9g}\nhole_ratio: {:.9g}\nfeasible_ratio: {:.9g}\n", m.quaternary_ratio,
             m.hole_ratio, m.feasible_ratio);
}

void print_verdict(const DesignParams& p, const Verdict& v) {
  fmt::print("group: {}\n", group_name(v.numeric));
  fmt::print("class: {}\n", class_rank(v.numeric));
  fmt::print("case: {}\n", family_letter(family_case(p)));
  if (v.analytic.label) {
    fmt::print("analytic: {} ({})\n", group_name(*v.analytic.label), v.agreement ? "agrees" : "disagrees");
  } else {
    fmt::print("analytic: Indeterminate\n");
  }
  print_metrics(v.metrics);
  for (const std::string& w : v.warnings) fmt::print("warning: {}\n", w);
}

int cmd_classify(const DesignParams& p, int grid, bool json) {
  p.validate();
  family_case(p);
  AnalysisOptions o;
  o.grid = grid;
  const Analysis a = analyze(p, o);
  try {
    const Verdict v = numeric_verdict(p, a);
    if (json) {
      std::cout << atlas::report_json(a, v).dump(2) << "\n";
    } else {
      print_verdict(p, v);
    }
  } catch (const NoSignatureMatch& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    print_metrics(e.metrics);
    return kVerifyFailed;
  }
  return kOk;
}

int cmd_analyze(const DesignParams& p, int grid, const std::string& out_dir) {
  p.validate();
  family_case(p);
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fmt::print(stderr, "error: cannot create output directory '{}'\n", out_dir);
    return kIo;
  }
  AnalysisOptions o;
  o.grid = grid;
  const Analysis a = analyze(p, o);
  int status = kOk;
  try {
    write_file(dir / "cross_section.svg", atlas::cross_section_svg(a));
    try {
      const Verdict v = numeric_verdict(p, a);
      write_file(dir / "report.json", atlas::report_json(a, v).dump(2) + "\n");
      print_verdict(p, v);
    } catch (const NoSignatureMatch& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      print_metrics(e.metrics);
      status = kVerifyFailed;
    }
  } catch (const std::ios_base::failure& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  }
  for (const NodePoint& n : a.nodes.nodes) fmt::print("node: rho={:.9g} z={:.9g}\n", n.location.rho, n.location.z);
  return status;
}

int cmd_sweep(const std::string& family, const std::string& x, const std::string& y,
              const std::vector<std::string>& fixed, int grid, int trace, const std::string& out_dir) {
  const auto fc = parse_family(family);
  if (!fc) throw InvalidInput(fmt::format("unknown case '{}'", family));
  atlas::SweepSpec spec;
  spec.family = *fc;
  spec.x = atlas::parse_axis(x);
  spec.y = atlas::parse_axis(y);
  spec.grid = grid;
  spec.trace = trace;
  for (const std::string& f : fixed) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw InvalidInput(fmt::format("--fixed expects NAME=VALUE, got '{}'", f));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(f.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != f.size() - eq - 1) throw InvalidInput(fmt::format("bad value in --fixed '{}'", f));
    spec.fixed[f.substr(0, eq)] = value;
  }
  atlas::validate_sweep(spec);

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fmt::print(stderr, "error: cannot create output directory '{}'\n", out_dir);
    return kIo;
  }
  const atlas::SweepResult r = atlas::run_sweep(spec);
  try {
    write_file(dir / "zone_map.csv", atlas::sweep_csv(r));
    write_file(dir / "zone_map.svg", atlas::zone_map_svg(r));
  } catch (const std::ios_base::failure& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  }
  std::map<std::string, int> tally;
  for (const atlas::SweepCell& c : r.cells) ++tally[c.label];
  for (const auto& [label, count] : tally) fmt::print("{}: {} cell(s)\n", label, count);
  return kOk;
}

int cmd_verify(int grid, const std::string& only) {
  if (!only.empty() && !parse_family(only)) throw InvalidInput(fmt::format("--only expects a case letter, got '{}'", only));
  const auto rows = atlas::run_verify(grid, only);
  int passed = 0;
  fmt::print("{:<5} {:<28} {:<8} {:<8} {:<8} {:>7}  {}\n", "row", "d2,d3,d4,r2,r3", "label", "nodes", "voids", "time",
             "result");
  for (const atlas::VerifyRow& r : rows) {
    const DesignParams& p = r.example.params;
    const std::string params = fmt::format("{:g},{:g},{:g},{:g},{:g}", p.d2, p.d3, p.d4, p.r2, p.r3);
    const std::string got = r.label ? std::string(group_name(*r.label)) : "?";
    fmt::print("{:<5} {:<28} {:<8} {:<8} {:<8} {:>6.2f}s  {}{}\n", group_name(r.example.group), params,
               fmt::format("{}/{}", got, group_name(r.example.group)),
               fmt::format("{}/{}", r.nodes, r.example.nodes), fmt::format("{}/{}", r.voids, r.example.voids),
               r.seconds, r.pass ? "PASS" : "FAIL", r.note.empty() || r.pass ? "" : "  " + r.note);
    passed += r.pass ? 1 : 0;
  }
  fmt::print("{}/{} passed\n", passed, rows.size());
  return passed == static_cast<int>(rows.size()) ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workspace topology and group classification of 3R orthogonal manipulators"};
  app.set_version_flag("--version", atlas::version());
  app.require_subcommand(1);

  ParamFlags classify_flags;
  int classify_grid = 512;
  bool classify_json = false;
  auto* classify = app.add_subcommand("classify", "group label, class rank and workspace metrics of one design");
  classify_flags.attach(classify);
  classify->add_option("--grid", classify_grid, "raster cells along rho")->capture_default_str();
  classify->add_flag("--json", classify_json, "print the full report as JSON");

  ParamFlags analyze_flags;
  int analyze_grid = 512;
  std::string analyze_out = ".";
  auto* analyze_cmd = app.add_subcommand("analyze", "write report.json and cross_section.svg");
  analyze_flags.attach(analyze_cmd);
  analyze_cmd->add_option("--grid", analyze_grid, "raster cells along rho")->capture_default_str();
  analyze_cmd->add_option("--out", analyze_out, "output directory")->required();

  std::string sweep_case;
  std::string sweep_x;
  std::string sweep_y;
  std::vector<std::string> sweep_fixed;
  int sweep_grid = 256;
  int sweep_trace = 512;
  std::string sweep_out = ".";
  auto* sweep = app.add_subcommand("sweep", "zone map over two design parameters");
  sweep->add_option("--case", sweep_case, "case letter A..J")->required();
  sweep->add_option("--x", sweep_x, "PARAM:LO..HI:STEPS")->required();
  sweep->add_option("--y", sweep_y, "PARAM:LO..HI:STEPS")->required();
  sweep->add_option("--fixed", sweep_fixed, "NAME=VALUE for the other parameters");
  sweep->add_option("--grid", sweep_grid, "raster cells along rho per sweep cell")->capture_default_str();
  sweep->add_option("--trace", sweep_trace, "singular-curve trace resolution")->capture_default_str();
  sweep->add_option("--out", sweep_out, "output directory")->required();

  int verify_grid = 512;
  std::string verify_only;
  auto* verify = app.add_subcommand("verify", "check the 21 reference designs");
  verify->add_option("--grid", verify_grid, "raster cells along rho")->capture_default_str();
  verify->add_option("--only", verify_only, "restrict to one case letter");

  auto* table = app.add_subcommand("table", "print the group property table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (classify->parsed()) return cmd_classify(classify_flags.p, classify_grid, classify_json);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_flags.p, analyze_grid, analyze_out);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_case, sweep_x, sweep_y, sweep_fixed, sweep_grid, sweep_trace, sweep_out);
    }
    if (verify->parsed()) return cmd_verify(verify_grid, verify_only);
    if (table->parsed()) {
      fmt::print("{}", atlas::group_table());
      return kOk;
    }
  } catch (const OutOfFamily& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kOutOfFamily;
  } catch (const InvalidInput& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInvalid;
  } catch (const GridTooSmall& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInvalid;
  }
  return kInvalid;
}
