// Acceptance run: one line per criterion, nonzero exit if any exact check fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dhp/suites.hpp"

using namespace dhp;

namespace {

ArithmeticContext unr(int p, int f, int m, int N, int choice = 0) {
  ContextOptions o;
  o.generator_choice = choice;
  return make_context(p, f, Case::Unramified, m, N, o);
}

ArithmeticContext ram(int p, int m, int N, int choice = 0) {
  ContextOptions o;
  o.generator_choice = choice;
  return make_context(p, 1, Case::Ramified, m, N, o);
}

void append(std::vector<CheckResult>& out, std::vector<CheckResult> more, const std::string& tag) {
  for (auto& c : more) {
    c.name = tag + ": " + c.name;
    out.push_back(std::move(c));
  }
}

// Status and detail of every entry; the detail carries the counts.
std::string fingerprint(const std::vector<CheckResult>& v) {
  std::string s;
  for (const auto& c : v) s += c.anchor + "|" + std::string(to_string(c.status)) + "|" + c.detail + "\n";
  return s;
}

struct Criterion {
  int id;
  std::string what;
  double budget;  // seconds
  std::function<std::vector<CheckResult>()> run;
};

std::vector<CheckResult> crit1() {
  std::vector<CheckResult> out;
  for (auto [p, f] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {5, 1}, {2, 2}})
    append(out, suite_lines(unr(p, f, 1, 10), {}), "p=" + std::to_string(p) + " f=" + std::to_string(f));
  return out;
}

std::vector<CheckResult> crit2() {
  std::vector<CheckResult> out;
  for (int p : {3, 5}) append(out, suite_lines(ram(p, 1, 10), {}), "p=" + std::to_string(p));
  return out;
}

std::vector<CheckResult> crit3() {
  std::vector<CheckResult> out;
  for (int m : {1, 2}) append(out, suite_lemma_square(unr(2, 1, m, 10), {}), "m=" + std::to_string(m));
  return out;
}

std::vector<CheckResult> crit4() {
  std::vector<CheckResult> out;
  for (int m : {1, 2}) append(out, suite_lemma_trichotomy(unr(2, 1, m, 10), {}), "m=" + std::to_string(m));
  return out;
}

std::vector<CheckResult> crit5() {
  std::vector<CheckResult> out;
  for (int m : {1, 2}) {
    const auto ctx = ram(3, m, 10);
    append(out, suite_lemma_hull(ctx, {}), "m=" + std::to_string(m));
    append(out, suite_lemma_ramified_points(ctx, {}), "m=" + std::to_string(m));
  }
  return out;
}

std::vector<CheckResult> crit6() {
  std::vector<CheckResult> out;
  for (int m : {1, 2}) {
    append(out, suite_shadow(unr(2, 1, m, 10), {}), "unramified q=2 m=" + std::to_string(m));
    append(out, suite_shadow(unr(3, 1, m, 10), {}), "unramified q=3 m=" + std::to_string(m));
    append(out, suite_shadow(ram(3, m, 10), {}), "ramified p=3 m=" + std::to_string(m));
  }
  return out;
}

std::vector<CheckResult> crit7() {
  std::vector<CheckResult> out;
  SuiteOptions o;
  o.samples = 1000;
  append(out, suite_iso(unr(2, 1, 1, 6), o), "unramified p=2");
  append(out, suite_iso(unr(3, 1, 1, 6), o), "unramified p=3");
  append(out, suite_iso(ram(3, 1, 6), o), "ramified p=3");
  append(out, suite_iso(ram(5, 1, 6), o), "ramified p=5");
  return out;
}

std::vector<CheckResult> crit8() {
  std::vector<CheckResult> out;
  for (int r = 0; r <= 3; ++r) {
    SuiteOptions o;
    o.radius = r;
    const auto tag = " r=" + std::to_string(r);
    append(out, suite_trees(unr(2, 1, 1, 16), o), "unramified q=2" + tag);
    append(out, suite_trees(unr(3, 1, 1, 16), o), "unramified q=3" + tag);
    append(out, suite_trees(ram(3, 1, 16), o), "ramified q=3" + tag);
  }
  return out;
}

std::vector<CheckResult> crit9() {
  std::vector<CheckResult> out;
  using Suite = std::function<std::vector<CheckResult>(const ArithmeticContext&)>;
  auto same = [&](const std::string& tag, const std::function<ArithmeticContext(int)>& mk, const std::vector<Suite>& suites) {
    const auto a = mk(0), b = mk(1);
    std::vector<CheckResult> ra, rb;
    for (const auto& s : suites) {
      append(ra, s(a), tag);
      append(rb, s(b), tag);
    }
    const auto fa = fingerprint(ra), fb = fingerprint(rb);
    out.push_back(make_check(tag + ": identical counts with the second generator", "robustness.counts", fa == fb && all_passed(rb),
                             fa == fb ? "a check failed with the second generator" : "counts differ"));
  };
  const SuiteOptions o;
  auto lines = [o](const ArithmeticContext& c) { return suite_lines(c, o); };
  auto shadow = [o](const ArithmeticContext& c) { return suite_shadow(c, o); };
  for (int m : {1, 2}) {
    same("unramified q=2 m=" + std::to_string(m), [m](int ch) { return unr(2, 1, m, 10, ch); },
         {lines, shadow, [o](const ArithmeticContext& c) { return suite_lemma_square(c, o); },
          [o](const ArithmeticContext& c) { return suite_lemma_trichotomy(c, o); }});
    same("ramified p=3 m=" + std::to_string(m), [m](int ch) { return ram(3, m, 10, ch); },
         {lines, shadow, [o](const ArithmeticContext& c) { return suite_lemma_hull(c, o); },
          [o](const ArithmeticContext& c) { return suite_lemma_ramified_points(c, o); }});
  }
  same("unramified q=3", [](int ch) { return unr(3, 1, 1, 10, ch); }, {lines, shadow});
  same("ramified p=5", [](int ch) { return ram(5, 1, 10, ch); }, {lines, shadow});

  for (int r = 0; r <= 3; ++r) {
    const auto tag = " r=" + std::to_string(r);
    for (int p : {2, 3}) {
      const auto t0 = build_pu_tree(unr(p, 1, 1, 10, 0), r), t1 = build_pu_tree(unr(p, 1, 1, 10, 1), r);
      const auto c = compare_balls(t0, t1);
      out.push_back(make_check("unramified q=" + std::to_string(p) + tag + ": trees isomorphic across generators", "robustness.trees",
                               c.isomorphic, c.failure));
    }
    const auto t0 = build_pu_tree(ram(3, 1, 10, 0), r), t1 = build_pu_tree(ram(3, 1, 10, 1), r);
    const auto c = compare_balls(t0, t1);
    out.push_back(make_check("ramified q=3" + tag + ": trees isomorphic across generators", "robustness.trees", c.isomorphic, c.failure));
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "isotropic lines, unramified: q+1 at type-0 and type-2 vertices", 4, crit1},
      {2, "isotropic lines, ramified: exactly 2", 1, crit2},
      {3, "square bijection and line images, q=2, c=1", 60, crit3},
      {4, "trichotomy and rational isotropic lines, q=2, c=1", 60, crit4},
      {5, "ramified hull, q+1 points per type-2 lattice, type-0 in two type-2", 60, crit5},
      {6, "point-level shadow in both cases", 120, crit6},
      {7, "quaternion and unitary identities, 1000 samples at N=6", 10, crit7},
      {8, "tree balls, comparison and random actions, q in {2,3}, r <= 3", 30, crit8},
      {9, "second generator choice: identical counts and isomorphic trees", 600, crit9},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckResult> res;
    try {
      res = c.run();
    } catch (const Error& e) {
      res.push_back(make_check("criterion " + std::to_string(c.id), "error", false, e.what()));
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int bad = 0;
    for (const auto& r : res) bad += r.passed() ? 0 : 1;
    const bool ok = bad == 0 && !res.empty();
    std::printf("criterion %d %s  %s  (%zu checks, %.2f s, budget %.0f s)\n", c.id, ok ? "PASS" : "FAIL", c.what.c_str(), res.size(), dt,
                c.budget);
    if (dt > c.budget) std::printf("  note: over time budget\n");
    for (const auto& r : res)
      if (!r.passed()) std::printf("  fail  %s  [%s]  %s\n", r.name.c_str(), r.anchor.c_str(), r.counterexample.c_str());
    failed += ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed == 0 ? 0 : 1;
}
