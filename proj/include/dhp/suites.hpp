#pragma once

// Check suites behind the command-line driver and the acceptance run. Each
// returns report entries; module errors inside a suite become failed entries.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bt_graph.hpp"
#include "dieudonne.hpp"
#include "quaternion.hpp"
#include "report.hpp"

namespace dhp {

struct SuiteOptions {
  int box = 1;
  int radius = 2;
  int samples = 100;
  uint64_t seed = 1;
};

namespace detail {

/// Runs fn, turning a module error into a failed entry.
template <class Fn>
void guarded(std::vector<CheckResult>& out, const std::string& name, const std::string& anchor, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    out.push_back(make_check(name, anchor, false, e.what()));
  }
}

template <class Elem>
std::vector<Lattice<Elem>> vertex_lattices_of_type(const Form<Elem>& C, const Elem& proto, const GaloisRing& R, int c,
                                                   VertexType want) {
  std::vector<Lattice<Elem>> out;
  for (const auto& L : box_lattices(proto, R, c))
    if (vertex_type(L, C) == want) out.push_back(L);
  return out;
}

inline std::string pair_string(const Line& l) { return "[" + l.first.to_string() + ":" + l.second.to_string() + "]"; }

inline bool in_graded_box(const GradedLattice& M, int c) { return in_box(M.M0, c) && in_box(M.M1, c); }

template <class E>
Quat<E> random_quat(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg, std::mt19937_64& rng) {
  if constexpr (std::is_same_v<E, RamElem>) {
    auto e = [&] { return RamElem(random_elem(*ctx.OF, rng), random_elem(*ctx.OF, rng)); };
    return {alg, e(), e()};
  } else {
    return {alg, random_elem(*ctx.OE, rng), random_elem(*ctx.OE, rng)};
  }
}

template <class E>
void iso_suite(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg, const SuiteOptions& o, std::vector<CheckResult>& out) {
  std::mt19937_64 rng(o.seed);
  const auto Pi = Quat<E>::uniformizer(alg);
  CheckTally rosati("Rosati identity for iota(b)", "quat.rosati");
  std::vector<Quat<E>> basis{Quat<E>::one(alg), Pi};
  if constexpr (std::is_same_v<E, GRElem>) {
    const auto d = Quat<E>::scalar(alg, alg->delta);
    basis.push_back(d);
    basis.push_back(Pi * d);
  } else {
    basis.push_back(Quat<E>::j(alg));
    basis.push_back(Pi * Quat<E>::j(alg));
  }
  for (const auto& b : basis) rosati.record(rosati_check(FracQuat<E>::of(b)), b.to_string());
  for (int i = 0; i < o.samples; ++i) {
    const auto b = random_quat(ctx, alg, rng);
    rosati.record(rosati_check(FracQuat<E>::of(b)), b.to_string());
  }
  out.push_back(rosati.result());

  if constexpr (std::is_same_v<E, GRElem>) {
    const auto pd = Pi * Quat<E>::scalar(alg, alg->delta);
    out.push_back(make_check("Pi delta is Rosati invariant", "quat.rosati_invariant", pd.star() == pd, pd.star().to_string()));
    out.push_back(make_check("lambda^-1 [Pi]^vee lambda = [Pi]", "quat.pila", pila_check(alg)));
  } else {
    const auto z = Quat<E>::j(alg);
    out.push_back(make_check("zeta* = zeta", "quat.rosati_invariant", z.star() == z, z.star().to_string()));
    CheckResult skip{"lambda^-1 [Pi]^vee lambda = [Pi]", "quat.pila", CheckStatus::Skip, "", "unramified identity"};
    out.push_back(skip);
  }
  const auto pol = polarization_matrices(alg);
  out.push_back(make_check("lambda0 and lambda are adjoint-alternating", "quat.polarization_adjoint",
                           adjoint_symmetric(pol.lambda0) && adjoint_symmetric(pol.lambda)));

  CheckTally hom("exceptional isomorphism is multiplicative", "quat.sl2_homomorphism");
  CheckTally su("image of SL2 preserves lambda and commutes with O_E", "quat.su");
  CheckTally chom("SL2 -> U(C) is multiplicative", "hermitian.sl2_homomorphism");
  CheckTally unit("image of SL2 preserves h", "hermitian.sl2_unitary");
  for (int i = 0; i < o.samples; ++i) {
    const auto g1 = sample_sl2(ctx, rng), g2 = sample_sl2(ctx, rng);
    const auto h1 = exceptional_iso(ctx, alg, g1), h2 = exceptional_iso(ctx, alg, g2);
    const std::string w = "sample " + std::to_string(i);
    hom.record(qm_equal(exceptional_iso(ctx, alg, matf_mul(g1, g2)), qm_mul(h1, h2)), w);
    su.record(su_check(ctx, alg, h1), w);
    const auto c1 = sl2_to_C(ctx, g1), c2 = sl2_to_C(ctx, g2), c12 = sl2_to_C(ctx, matf_mul(g1, g2));
    auto lhs_rhs = [&](const auto& m1, const auto& m2, const auto& m12, auto conj) {
      const int k = c1.shift + c2.shift - c12.shift;
      const bool mult = k >= 0 && m12.map([k](const auto& x) { return x.mul_uniformizer(k); }) == m1 * m2;
      const auto H = split_gram(m1.proto().one_like());
      auto sgn = (ctx.unramified() || c1.shift % 2 == 0) ? m1.proto().one_like() : -m1.proto().one_like();
      const auto expect = H.map([&](const auto& x) { return (sgn * x).mul_uniformizer(2 * c1.shift); });
      return std::pair{mult, m1.transpose() * H * m1.map(conj) == expect};
    };
    std::pair<bool, bool> r;
    if (ctx.unramified()) r = lhs_rhs(c1.unr, c2.unr, c12.unr, [&](const GRElem& x) { return x.frob(ctx.f); });
    else r = lhs_rhs(c1.ram, c2.ram, c12.ram, [](const RamElem& x) { return x.conj(); });
    chom.record(r.first, w);
    unit.record(r.second, w);
  }
  out.push_back(hom.result());
  out.push_back(su.result());
  out.push_back(chom.result());
  out.push_back(unit.result());
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> suite_framing(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  detail::guarded(out, "framing construction", "framing.vf", [&] {
    out = ctx.unramified() ? validate_framing(build_framing_unramified(ctx), o.samples, o.seed)
                           : validate_framing(build_framing_ramified(ctx), o.samples, o.seed);
  });
  return out;
}

/// Isotropic line counts of the reduced forms at the standard vertices.
inline std::vector<CheckResult> suite_lines(const ArithmeticContext& ctx, const SuiteOptions&) {
  std::vector<CheckResult> out;
  detail::guarded(out, "isotropic lines", "lines.unramified", [&] {
    if (ctx.unramified()) {
      const auto one = ctx.OE->one();
      const auto L0 = UnrLattice::standard(2, one), L1 = UnrLattice::diagonal({-1, 0}, one);
      const auto n = ctx.q + 1;
      for (auto [L, t] : {std::pair{L0, VertexType::Type0}, std::pair{L1, VertexType::Type2}}) {
        const auto k = static_cast<int64_t>(isotropic_lines(reduce_at_vertex(ctx, L, t), 1).size());
        out.push_back(make_check("q+1 = " + std::to_string(n) + " isotropic lines at a " + std::string(to_string(t)) + " vertex",
                                 "lines.unramified", k == n, std::to_string(k) + " lines", std::to_string(k)));
      }
    } else {
      const auto L0 = RamLattice::standard(2, RamElem::from_base(ctx.OF->one()));
      const auto ls = isotropic_lines(reduce_at_vertex(ctx, L0, VertexType::Type0), 1);
      out.push_back(make_check("2 isotropic lines at a type0 vertex", "lines.ramified", ls.size() == 2,
                               std::to_string(ls.size()) + " lines", std::to_string(ls.size())));
    }
  });
  return out;
}

/// Square of inclusions: round trip, quotient lengths, and images of the line maps.
inline std::vector<CheckResult> suite_lemma_square(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  if (!ctx.unramified()) fail(ErrorCode::ConfigError, "this check needs --case unramified");
  detail::guarded(out, "square of inclusions", "lemma.square_roundtrip", [&] {
    const auto fd = build_framing_unramified(ctx);
    const auto C = build_C_unramified(ctx);
    const auto pts = enumerate_admissible(fd, o.box);
    CheckTally rt("M -> square -> M is the identity", "lemma.square_roundtrip");
    CheckTally len("all four quotients have length 1", "lemma.square_lengths");
    for (const auto& M : pts) {
      const auto s = square_of_M(fd, M);
      rt.record(M_of_square(fd, s) == M && square_of_M(fd, M_of_square(fd, s)) == s, M.to_string());
      const auto As = fd.sharp(s.A), Bs = fd.sharp(s.B);
      len.record(s.A.contains(s.B) && s.B.contains(As) && Bs.contains(As) && s.A.contains(Bs) && s.B.index_in(s.A) == 1 &&
                     As.index_in(s.B) == 1 && As.index_in(Bs) == 1 && Bs.index_in(s.A) == 1,
                 M.to_string());
    }
    out.push_back(rt.result(std::to_string(pts.size()) + " admissible lattices"));
    out.push_back(len.result());

    const auto k = detail::residue_field(*fd.R);
    const auto lines = projective_line(*k);
    std::set<GradedLattice> images;
    CheckTally inj("lines map injectively", "lemma.injective");
    for (auto [t, v] : {std::pair{VertexType::Type0, LineMap::SelfDual}, std::pair{VertexType::Type2, LineMap::PiModular}})
      for (const auto& L : detail::vertex_lattices_of_type(C, ctx.OE->one(), *ctx.OE, o.box + 1, t)) {
        std::set<GradedLattice> mine;
        for (const auto& l : lines) {
          const auto M = point_from_line(fd, L, l, v);
          mine.insert(M);
          if (detail::in_graded_box(M, o.box)) images.insert(M);
        }
        inj.record(mine.size() == lines.size(), L.to_string());
      }
    out.push_back(inj.result());
    const std::set<GradedLattice> ptset(pts.begin(), pts.end());
    std::string diff;
    for (const auto& M : ptset)
      if (!images.count(M)) diff = "missed " + M.to_string();
    for (const auto& M : images)
      if (!ptset.count(M)) diff = "extra " + M.to_string();
    out.push_back(make_check("admissible lattices = union of line images", "lemma.images_cover", images == ptset, diff,
                             std::to_string(images.size()) + " images"));
  });
  return out;
}

/// Trichotomy and the rational isotropic lines behind the "both" points.
inline std::vector<CheckResult> suite_lemma_trichotomy(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  if (!ctx.unramified()) fail(ErrorCode::ConfigError, "this check needs --case unramified");
  detail::guarded(out, "trichotomy", "lemma.trichotomy", [&] {
    const auto fd = build_framing_unramified(ctx);
    const auto C = build_C_unramified(ctx);
    const auto pts = enumerate_admissible(fd, o.box);
    const auto k = detail::residue_field(*fd.R);
    CheckTally tri("B self-dual or A pi-modular", "lemma.trichotomy");
    std::map<std::string, int> tags;
    std::set<std::pair<UnrLattice, std::string>> both_lines;
    CheckTally rat("both-points give rational isotropic lines", "lemma.both_lines");
    for (const auto& M : pts) {
      bool ok = true;
      try {
        const auto cl = classify_point(fd, M);
        const auto s = square_of_M(fd, M);
        ++tags[std::string(to_string(cl.tag))];
        ok = (cl.lambda0 || cl.lambda1) && (!cl.lambda0 || fd.base_change(*cl.lambda0) == s.B) &&
             (!cl.lambda1 || fd.base_change(*cl.lambda1) == s.A);
        if (cl.tag == UnrTag::Both) {
          const auto l = line_of_point(fd, *cl.lambda0, s);
          const auto Bc = cl.lambda0->basis().map([&](const GRElem& x) { return ctx.oe_to_coeff.apply(x); });
          const auto v = detail::mat_vec(Bc, detail::lift_line(*fd.R, l));
          const GRElem hv = fd.sharp_form().eval(v, v);
          const bool iso = hv.is_zero() || hv.val() >= 2 * cl.lambda0->shift() + 1;
          const bool fresh = both_lines.insert({*cl.lambda0, detail::pair_string(l)}).second;
          rat.record(l.second.frob(2 * ctx.f) == l.second && iso && fresh, M.to_string());
        }
      } catch (const Error& e) {
        ok = false;
      }
      tri.record(ok, M.to_string());
    }
    std::string counts;
    for (const auto& [t, n] : tags) counts += (counts.empty() ? "" : ", ") + t + " " + std::to_string(n);
    out.push_back(tri.result(counts));
    // every rational isotropic line of every type-0 vertex lands on a "both" point
    int expected = 0;
    for (const auto& L0 : detail::vertex_lattices_of_type(C, ctx.OE->one(), *ctx.OE, o.box, VertexType::Type0))
      for (const auto& l : isotropic_lines(reduce_at_vertex(ctx, L0, VertexType::Type0), 1)) {
        auto to_k = [&](const GRElem& x) {
          return detail::to_residue(*k, ctx.oe_to_coeff.apply(detail::lift_residue(*ctx.OE, x)));
        };
        const auto M = point_from_line(fd, L0, {to_k(l.first), to_k(l.second)}, LineMap::SelfDual);
        const bool both = classify_point(fd, M).tag == UnrTag::Both;
        rat.record(both, "line " + detail::pair_string(l) + " of " + L0.to_string());
        if (detail::in_graded_box(M, o.box)) ++expected;
      }
    const int got = tags.count("both") ? tags["both"] : 0;
    rat.record(got == expected, std::to_string(got) + " both-points vs " + std::to_string(expected) + " lines");
    out.push_back(rat.result(std::to_string(got) + " both-points"));
  });
  return out;
}

/// M + tau(M) is tau-stable, and descends to the expected vertex lattice.
inline std::vector<CheckResult> suite_lemma_hull(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  if (ctx.unramified()) fail(ErrorCode::ConfigError, "this check needs --case ramified");
  detail::guarded(out, "M + tau(M) is tau-stable", "lemma.hull_tau_stable", [&] {
    const auto fd = build_framing_ramified(ctx);
    const auto pts = enumerate_admissible(fd, o.box);
    CheckTally hull("M + tau(M) is tau-stable", "lemma.hull_tau_stable");
    int stable = 0;
    for (const auto& M : pts) {
      bool ok = true;
      try {
        const auto cl = classify_point(fd, M);
        stable += cl.tau_stable;
        ok = cl.hull_tau_stable && (cl.tau_stable || (fd.sharp(cl.hull) == cl.hull.scaled(1) && M.index_in(cl.hull) == 1));
      } catch (const Error&) {
        ok = false;
      }
      hull.record(ok, M.to_string());
    }
    out.push_back(hull.result(std::to_string(stable) + " of " + std::to_string(pts.size()) + " tau-stable"));
  });
  return out;
}

/// Points over type-2 lattices, and type-0 lattices inside exactly two type-2 lattices.
inline std::vector<CheckResult> suite_lemma_ramified_points(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  if (ctx.unramified()) fail(ErrorCode::ConfigError, "this check needs --case ramified");
  detail::guarded(out, "points over type-2 lattices", "lemma.tau_stable_count", [&] {
    const auto fd = build_framing_ramified(ctx);
    const auto C = build_C_ramified(ctx);
    const RamElem one = RamElem::from_base(ctx.OF->one());
    const auto pts = enumerate_admissible(fd, o.box);
    const auto k = detail::residue_field(*fd.R);
    const auto lines = projective_line(*k);
    const auto type2 = detail::vertex_lattices_of_type(C, one, *ctx.OF, 2 * o.box, VertexType::Type2);
    CheckTally count("q+1 = " + std::to_string(ctx.q + 1) + " points", "lemma.tau_stable_count");
    std::set<RamLattice> images;
    for (const auto& L1 : type2) {
      int stable = 0;
      for (const auto& l : lines) {
        const auto M = point_from_line(fd, L1, l);
        stable += classify_point(fd, M).tau_stable;
        if (detail::in_box(M, 2 * o.box)) images.insert(M);
      }
      count.record(stable == ctx.q + 1, L1.to_string() + " has " + std::to_string(stable));
    }
    out.push_back(count.result(std::to_string(type2.size()) + " type-2 lattices"));
    const std::set<RamLattice> ptset(pts.begin(), pts.end());
    out.push_back(make_check("admissible lattices = union of line images", "lemma.images_cover", images == ptset,
                             std::to_string(images.size()) + " images vs " + std::to_string(ptset.size()) + " points",
                             std::to_string(images.size()) + " images"));
    CheckTally two("2 isotropic lines", "lemma.type0_in_two");
    for (const auto& L0 : detail::vertex_lattices_of_type(C, one, *ctx.OF, 2 * o.box - 1, VertexType::Type0)) {
      const auto iso = isotropic_lines(reduce_at_vertex(ctx, L0, VertexType::Type0), 1);
      std::set<RamLattice> over;
      for (const auto& L1 : type2)
        if (L1.contains(L0)) over.insert(L1);
      const auto via = type2_containing(ctx, L0);
      two.record(iso.size() == 2 && over.size() == 2 && over == std::set<RamLattice>(via.begin(), via.end()), L0.to_string());
    }
    out.push_back(two.result());
  });
  return out;
}

inline std::vector<CheckResult> suite_shadow(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  detail::guarded(out, "shadow of the isomorphism", "theorem.shadow", [&] {
    CheckTally shadow(ctx.unramified() ? "iota(Pi) preserves M" : "iota(zeta) preserves M", "theorem.shadow");
    CheckTally special("special: both graded quotients of M/VM have length 1", "theorem.special_lengths");
    size_t n = 0;
    if (ctx.unramified()) {
      const auto fd = build_framing_unramified(ctx);
      const auto pts = enumerate_admissible(fd, o.box);
      n = pts.size();
      for (const auto& M : pts) {
        const auto r = theorem_shadow_check(fd, M);
        shadow.record(r.ok, r.failure);
        special.record(r.special_lengths == std::pair{1, 1}, M.to_string());
      }
    } else {
      const auto fd = build_framing_ramified(ctx);
      const auto pts = enumerate_admissible(fd, o.box);
      n = pts.size();
      for (const auto& M : pts) {
        const auto r = theorem_shadow_check(fd, M);
        shadow.record(r.ok, r.failure);
      }
    }
    out.push_back(shadow.result(std::to_string(shadow.total() - shadow.failures()) + "/" + std::to_string(n)));
    if (ctx.unramified()) out.push_back(special.result());
  });
  return out;
}

inline std::vector<CheckResult> suite_iso(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  detail::guarded(out, "algebraic identities", "quat.rosati", [&] {
    if (ctx.unramified()) detail::iso_suite(ctx, make_quat_algebra_unramified(ctx).get(), o, out);
    else detail::iso_suite(ctx, make_quat_algebra_ramified(ctx).get(), o, out);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Trees

namespace detail {
inline void add_tree_checks(std::vector<CheckResult>& out, const TreeGraph& t, const std::string& label) {
  for (auto c : check_tree_shape(t)) {
    c.name = label + ": " + c.name;
    out.push_back(std::move(c));
  }
}

inline bool shallow(const MatF& g, int depth) {
  for (const auto& row : g)
    for (const auto& e : row)
      if (e.shift > depth) return false;
  return true;
}
}  // namespace detail

/// Both balls of radius r, their structure, witnesses, rooted comparison and random actions.
inline std::vector<CheckResult> suite_trees(const ArithmeticContext& ctx, const SuiteOptions& o) {
  std::vector<CheckResult> out;
  detail::guarded(out, "tree construction", "tree.acyclic", [&] {
    const auto pgl = build_pgl2_ball(ctx, o.radius);
    detail::add_tree_checks(out, pgl.graph, "PGL2");
    auto w = check_witnesses(ctx, pgl);
    w.name = "PGL2: " + w.name;
    out.push_back(w);
    TreeGraph pu;
    std::mt19937_64 rng(o.seed);
    CheckTally tally_pgl("PGL2: random elements preserve adjacency", "tree.action");
    CheckTally tally_pu("PU: random unitary elements preserve adjacency", "tree.action");
    auto sample = [&] {
      for (;;) {
        const auto g = sample_sl2(ctx, rng);
        if (detail::shallow(g, 1)) return g;
      }
    };
    if (ctx.unramified()) {
      const auto b = build_pu_ball_unramified(ctx, o.radius);
      pu = b.graph;
      w = check_witnesses(ctx, b);
      for (int i = 0; i < o.samples && !b.graph.edges.empty(); ++i) {
        const auto g = sample();
        require_su(ctx, g);
        const auto& e = b.graph.edges[i % b.graph.edges.size()];
        tally_pu.record(unr_pu_adjacent(ctx, act_pu(ctx, g, b.lattices[e.a]), act_pu(ctx, g, b.lattices[e.b])), "sample " + std::to_string(i));
      }
    } else {
      const auto b = build_pu_ball_ramified(ctx, o.radius);
      pu = b.graph;
      w = check_witnesses(ctx, b);
      for (int i = 0; i < o.samples && !b.graph.edges.empty(); ++i) {
        const auto g = sample();
        require_su(ctx, g);
        const auto& e = b.graph.edges[i % b.graph.edges.size()];
        tally_pu.record(ram_pu_adjacent(ctx, act_pu(ctx, g, b.lattices[e.a]), act_pu(ctx, g, b.lattices[e.b])), "sample " + std::to_string(i));
      }
    }
    for (int i = 0; i < o.samples && !pgl.graph.edges.empty(); ++i) {
      const auto g = sample();
      const auto& e = pgl.graph.edges[i % pgl.graph.edges.size()];
      tally_pgl.record(pgl2_adjacent(act_pgl2(ctx, g, pgl.lattices[e.a]), act_pgl2(ctx, g, pgl.lattices[e.b])), "sample " + std::to_string(i));
    }
    detail::add_tree_checks(out, pu, "PU");
    w.name = "PU: " + w.name;
    out.push_back(w);
    const auto cmp = compare_balls(pgl.graph, pu);
    out.push_back(make_check("rooted isomorphism PGL2 ball ~ PU ball", "tree.compare", cmp.isomorphic, cmp.failure));
    if (o.samples > 0) {
      out.push_back(tally_pgl.result());
      out.push_back(tally_pu.result());
    }
  });
  return out;
}

}  // namespace dhp
