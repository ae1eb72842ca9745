#pragma once

// Run configuration and dispatch for the command-line driver.

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"
#include "suites.hpp"

namespace dhp {

inline constexpr const char* kConfigEnv = "DHP_CONFIG";

struct RunConfig {
  int p = 3;
  int f = 1;
  std::string kind = "unramified";
  int m = 1;
  int prec = 10;
  int generator_choice = 0;
  std::vector<std::string> command;  // e.g. {"lemma", "2.2"}
  std::string side = "pu";
  int radius = 2;
  int box = 1;
  int samples = 100;
  uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::vector<std::string> argv;  // echoed in the report
};

struct RunResult {
  CheckReport report;
  int exit_code = 0;             // 0 all pass, 1 a check failed, 2 configuration error
  std::string error;             // set with exit code 2
  std::string artifact;          // tree or vertex listing, when the command makes one
  std::string artifact_format;   // "dot", "json" or "list"
};

/// Fill fields from a JSON object; keys mirror the long flag names.
inline void apply_config_json(RunConfig& c, const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (k == "p") c.p = v.get<int>();
      else if (k == "f") c.f = v.get<int>();
      else if (k == "case") c.kind = v.get<std::string>();
      else if (k == "m") c.m = v.get<int>();
      else if (k == "prec") c.prec = v.get<int>();
      else if (k == "choice") c.generator_choice = v.get<int>();
      else if (k == "side") c.side = v.get<std::string>();
      else if (k == "radius") c.radius = v.get<int>();
      else if (k == "box") c.box = v.get<int>();
      else if (k == "samples") c.samples = v.get<int>();
      else if (k == "seed") c.seed = v.get<uint64_t>();
      else if (k == "out") c.out = v.get<std::string>();
      else if (k == "format") c.format = v.get<std::string>();
      else fail(ErrorCode::ConfigError, "unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad config: ") + e.what());
  }
}

inline ArithmeticContext context_of(const RunConfig& c) {
  if (c.kind != "unramified" && c.kind != "ramified") fail(ErrorCode::ConfigError, "--case must be unramified or ramified");
  ContextOptions o;
  o.generator_choice = c.generator_choice;
  try {
    return make_context(c.p, c.f, c.kind == "unramified" ? Case::Unramified : Case::Ramified, c.m, c.prec, o);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, e.what());
  }
}

/// Format of a tree/vertex artifact named by --out: a bare keyword or a file extension.
inline std::string artifact_format(const std::string& out, const std::string& fallback) {
  if (out == "dot" || out == "json" || out == "list") return out;
  auto ends = [&](const std::string& s) { return out.size() >= s.size() && out.compare(out.size() - s.size(), s.size(), s) == 0; };
  if (ends(".dot")) return "dot";
  if (ends(".json")) return "json";
  if (ends(".txt") || ends(".list")) return "list";
  return fallback;
}

namespace detail {

inline std::vector<CheckResult> tree_build(const ArithmeticContext& ctx, const RunConfig& c, RunResult& r) {
  std::vector<CheckResult> out;
  TreeGraph t;
  if (c.side == "pgl2") {
    const auto b = build_pgl2_ball(ctx, c.radius);
    t = b.graph;
    out = check_tree_shape(t);
    out.push_back(check_witnesses(ctx, b));
  } else if (ctx.unramified()) {
    const auto b = build_pu_ball_unramified(ctx, c.radius);
    t = b.graph;
    out = check_tree_shape(t);
    out.push_back(check_witnesses(ctx, b));
  } else {
    const auto b = build_pu_ball_ramified(ctx, c.radius);
    t = b.graph;
    out = check_tree_shape(t);
    out.push_back(check_witnesses(ctx, b));
  }
  r.artifact_format = artifact_format(c.out, "dot");
  r.artifact = r.artifact_format == "json" ? to_json_string(t) : to_dot(t);
  if (r.artifact_format == "list") r.artifact_format = "dot";
  return out;
}

inline std::vector<CheckResult> vertex_enumerate(const ArithmeticContext& ctx, const RunConfig& c, RunResult& r) {
  std::vector<std::string> rows;
  std::vector<CheckResult> out;
  CheckTally types("every listed lattice is a vertex lattice", "vertex.types");
  size_t n = 0;
  if (ctx.unramified()) {
    const auto C = build_C_unramified(ctx);
    const auto ls = enumerate_vertex_lattices(ctx, detail::unramified_center(ctx), c.radius);
    n = ls.size();
    for (const auto& L : ls) {
      const auto t = vertex_type(L, C);
      types.record(t != VertexType::None, L.to_string());
      rows.push_back(std::string(to_string(t)) + "\t" + L.to_string());
    }
  } else {
    const auto C = build_C_ramified(ctx);
    const auto ls = enumerate_vertex_lattices(ctx, detail::ramified_center(ctx), c.radius);
    n = ls.size();
    for (const auto& L : ls) {
      const auto t = vertex_type(L, C);
      types.record(t == VertexType::Type2, L.to_string());
      rows.push_back(std::string(to_string(t)) + "\t" + L.to_string());
    }
  }
  const auto expect = regular_ball_size(ctx.q, c.radius);
  out.push_back(make_check("vertex lattices within distance r", "vertex.count", static_cast<int64_t>(n) == expect,
                           std::to_string(n) + " != " + std::to_string(expect), std::to_string(n)));
  out.push_back(types.result());
  r.artifact_format = artifact_format(c.out, "list");
  if (r.artifact_format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      const auto tab = row.find('\t');
      j.push_back({{"type", row.substr(0, tab)}, {"basis", row.substr(tab + 1)}});
    }
    r.artifact = j.dump(2) + "\n";
  } else {
    r.artifact_format = "list";
    for (const auto& row : rows) r.artifact += row + "\n";
  }
  return out;
}

}  // namespace detail

inline bool is_artifact_command(const std::vector<std::string>& cmd) {
  return (cmd.size() == 2 && cmd[0] == "tree" && cmd[1] == "build") ||
         (cmd.size() == 2 && cmd[0] == "vertex" && cmd[1] == "enumerate");
}

inline RunResult run(const RunConfig& c) {
  RunResult r;
  r.report.command = c.argv.empty() ? c.command : c.argv;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (c.format != "json" && c.format != "text") fail(ErrorCode::ConfigError, "--format must be json or text");
    if (c.side != "pu" && c.side != "pgl2") fail(ErrorCode::ConfigError, "--side must be pu or pgl2");
    if (c.box < 0 || c.radius < 0 || c.samples < 0) fail(ErrorCode::ConfigError, "--box, --radius and --samples must be non-negative");
    if (c.command.size() != 2) fail(ErrorCode::ConfigError, "expected a command such as 'lemma 2.2'");
    const auto ctx = context_of(c);
    SuiteOptions o;
    o.box = c.box;
    o.radius = c.radius;
    o.samples = c.samples;
    o.seed = c.seed;
    const auto& a = c.command[0];
    const auto& b = c.command[1];
    auto& checks = r.report.checks;
    try {
      if (a == "framing" && b == "validate") checks = suite_framing(ctx, o);
      else if (a == "lemma" && b == "2.2") checks = suite_lemma_square(ctx, o);
      else if (a == "lemma" && b == "2.3") checks = suite_lemma_trichotomy(ctx, o);
      else if (a == "lemma" && b == "3.2") checks = suite_lemma_hull(ctx, o);
      else if (a == "lemma" && b == "3.3") {
        checks = suite_lines(ctx, o);
        for (auto& x : suite_lemma_ramified_points(ctx, o)) checks.push_back(std::move(x));
      } else if (a == "theorem" && b == "shadow") checks = suite_shadow(ctx, o);
      else if (a == "iso" && b == "check") checks = suite_iso(ctx, o);
      else if (a == "lines" && b == "isotropic") checks = suite_lines(ctx, o);
      else if (a == "tree" && b == "build") checks = detail::tree_build(ctx, c, r);
      else if (a == "tree" && b == "compare") checks = suite_trees(ctx, o);
      else if (a == "vertex" && b == "enumerate") checks = detail::vertex_enumerate(ctx, c, r);
      else fail(ErrorCode::ConfigError, "unknown command '" + a + " " + b + "'");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      checks.push_back(make_check(a + " " + b, "error", false, e.what()));
    }
    r.exit_code = r.report.failures() > 0 ? 1 : 0;
  } catch (const Error& e) {
    r.exit_code = 2;
    r.error = e.what();
  }
  r.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace dhp
