#include <gtest/gtest.h>

#include <map>
#include <set>

#include "dhp/dieudonne.hpp"

using namespace dhp;

namespace {

ArithmeticContext unr(int p, int m, int N = 8, int choice = 0) {
  ContextOptions o;
  o.generator_choice = choice;
  return make_context(p, 1, Case::Unramified, m, N, o);
}
ArithmeticContext ram(int p, int m, int N = 8, int choice = 0) {
  ContextOptions o;
  o.generator_choice = choice;
  return make_context(p, 1, Case::Ramified, m, N, o);
}

// Independent oracle for the box: breadth-first closure of pi^c O^2 under adding
// one vector of pi^{-c} O^2 / pi^c O^2 at a time.
std::set<UnrLattice> box_by_closure(const GaloisRing& R, int c) {
  const GRElem one = R.one();
  std::vector<GRElem> reps;  // residues mod p^{2c}
  for (int64_t i = 0; i < detail::ipow(R.p(), 2 * c); ++i) reps.push_back(R.from_int(i));
  std::set<UnrLattice> seen{UnrLattice::diagonal({c, c}, one)};
  std::vector<UnrLattice> todo(seen.begin(), seen.end());
  while (!todo.empty()) {
    const auto L = todo.back();
    todo.pop_back();
    for (const auto& x : reps)
      for (const auto& y : reps) {
        Mat<GRElem> v(2, 1, one);
        v(0, 0) = x;
        v(1, 0) = y;
        const auto L2 = UnrLattice::from_generators(L.generators_at(c).hcat(v), c);
        if (seen.insert(L2).second) todo.push_back(L2);
      }
  }
  return seen;
}

template <class Elem>
std::vector<Lattice<Elem>> vertex_lattices_in_box(const Form<Elem>& C, const Elem& proto, const GaloisRing& R, int c,
                                                  VertexType want) {
  std::vector<Lattice<Elem>> out;
  for (const auto& L : detail::box_lattices(proto, R, c))
    if (vertex_type(L, C) == want) out.push_back(L);
  return out;
}

}  // namespace

TEST(Framing, ValidatesInEveryCase) {
  for (int p : {2, 3, 5}) {
    for (int m : {1, 2}) {
      const auto r = validate_framing(build_framing_unramified(unr(p, m)), 6, 7);
      for (const auto& c : r) EXPECT_TRUE(c.passed()) << p << " " << m << " " << c.name << " " << c.counterexample;
      if (p == 2) continue;
      const auto rr = validate_framing(build_framing_ramified(ram(p, m)), 6, 7);
      for (const auto& c : rr) EXPECT_TRUE(c.passed()) << p << " " << m << " " << c.name << " " << c.counterexample;
    }
  }
}

TEST(Framing, PerturbedPairingBreaksIsotropy) {
  auto fd = build_framing_unramified(unr(3, 1));
  fd.pairing(0, 1) = fd.R->one();
  fd.pairing(1, 0) = -fd.R->one();
  bool iso_failed = false;
  for (const auto& c : validate_framing(fd, 2))
    if (c.anchor == "framing.isotropic") iso_failed = !c.passed();
  EXPECT_TRUE(iso_failed);
}

TEST(Framing, ExamplesOnBasisVectors) {
  const auto fd = build_framing_unramified(unr(2, 1));
  const auto& R = *fd.R;
  const GRElem z = R.zero(), o = R.one(), pi = R.from_int(2);
  for (int i = 0; i < 4; ++i) {
    std::vector<GRElem> e(4, z), pe(4, z);
    e[i] = o;
    pe[i] = pi;
    EXPECT_EQ(fd.V(fd.F(e)), pe);
  }
  // h Gram from the pairing is the split form antidiag(1, 1)
  EXPECT_EQ(fd.h_from_pairing({o, z}, {z, o}), o);
  EXPECT_EQ(fd.h_from_pairing({o, z}, {o, z}), z);
  // O_E^2 is tau-fixed: tau_mat = 1 and the coordinates are sigma^2-stable over O_E
  EXPECT_EQ(fd.tau_mat, Mat<GRElem>::identity(2, o));
}

TEST(BoxEnumeration, MatchesClosureOracle) {
  for (auto [p, c] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}}) {
    const auto R = GaloisRing::make(p, 1, 6);
    const auto lib = detail::box_lattices(R->one(), *R, c);
    const std::set<UnrLattice> libset(lib.begin(), lib.end());
    EXPECT_EQ(libset.size(), lib.size());
    EXPECT_EQ(libset, box_by_closure(*R, c)) << p;
  }
}

TEST(Unramified, AdmissibilityExamples) {
  const auto ctx = unr(2, 1);
  const auto fd = build_framing_unramified(ctx);
  const auto C = build_C_unramified(ctx);
  const auto L0 = UnrLattice::standard(2, ctx.OE->one());
  ASSERT_EQ(vertex_type(L0, C), VertexType::Type0);
  const auto mpm = build_M_pm(fd, L0);
  EXPECT_FALSE(is_admissible(fd, mpm.minus));
  // V M1 = pi M0 for M^- of type 0
  EXPECT_EQ(fd.V_on_N1(mpm.minus.M1), mpm.minus.M0.scaled(1));
  const auto k = detail::residue_field(*fd.R);
  const auto M = point_from_line(fd, L0, {k->one(), k->zero()}, LineMap::SelfDual);
  EXPECT_TRUE(is_admissible(fd, M));
  EXPECT_FALSE(is_admissible(fd, M.scaled(1)));
  EXPECT_THROW(square_of_M(fd, mpm.minus), Error);
  try {
    theorem_shadow_check(fd, mpm.minus);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAdmissible);
  }
}

TEST(Unramified, EmptyBoxAndGuard) {
  const auto fd = build_framing_unramified(unr(2, 1));
  EXPECT_TRUE(enumerate_admissible(fd, 0).empty());
  const auto big = build_framing_unramified(unr(3, 2, 12));
  try {
    enumerate_admissible(big, 3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoxTooLarge);
  }
}

TEST(Unramified, SquareBijectionAndImagesOfLines) {
  for (int m : {1, 2}) {
    const auto ctx = unr(2, m);
    const auto fd = build_framing_unramified(ctx);
    const auto C = build_C_unramified(ctx);
    const auto pts = enumerate_admissible(fd, 1);
    ASSERT_FALSE(pts.empty());
    for (const auto& M : pts) {
      const auto s = square_of_M(fd, M);
      const auto As = fd.sharp(s.A), Bs = fd.sharp(s.B);
      // every quotient of the square has length one
      EXPECT_EQ(s.B.index_in(s.A), 1);
      EXPECT_EQ(As.index_in(s.B), 1);
      EXPECT_EQ(As.index_in(Bs), 1);
      EXPECT_EQ(Bs.index_in(s.A), 1);
      EXPECT_EQ(M_of_square(fd, s), M);
      EXPECT_EQ(square_of_M(fd, M_of_square(fd, s)), s);
    }
    // union of images of all lines over the coefficient residue field, for
    // every vertex lattice whose base change could meet the box
    const auto k = detail::residue_field(*fd.R);
    const auto lines = projective_line(*k);
    std::set<GradedLattice> images;
    for (auto [t, v] : {std::pair{VertexType::Type0, LineMap::SelfDual}, std::pair{VertexType::Type2, LineMap::PiModular}})
      for (const auto& L : vertex_lattices_in_box(C, ctx.OE->one(), *ctx.OE, 2, t)) {
        std::set<GradedLattice> mine;
        for (const auto& l : lines) {
          const auto M = point_from_line(fd, L, l, v);
          EXPECT_TRUE(is_admissible(fd, M));
          mine.insert(M);
          if (detail::in_box(M.M0, 1) && detail::in_box(M.M1, 1)) images.insert(M);
        }
        EXPECT_EQ(mine.size(), lines.size());  // injective in the line
      }
    EXPECT_EQ(images, std::set<GradedLattice>(pts.begin(), pts.end())) << "m=" << m;
  }
}

TEST(Unramified, InvalidSquares) {
  const auto ctx = unr(2, 1);
  const auto fd = build_framing_unramified(ctx);
  const auto B = fd.base_change(UnrLattice::standard(2, ctx.OE->one()));
  auto code = [&](const Square& s) {
    try {
      M_of_square(fd, s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;
  };
  EXPECT_EQ(code({B.scaled(-1), B}), ErrorCode::InvalidSquare);  // quotient of length 2
  // B within A of index one, but A^sharp within B has index two
  const auto one = fd.R->one();
  EXPECT_EQ(code({UnrLattice::diagonal({-1, -1}, one), UnrLattice::diagonal({-1, 0}, one)}), ErrorCode::InvalidSquare);
  // A^sharp = A is not inside B
  EXPECT_EQ(code({B, UnrLattice::diagonal({0, 1}, one)}), ErrorCode::InvalidSquare);
}

TEST(Unramified, TrichotomyAndRationalIsotropicLines) {
  for (int m : {1, 2}) {
    for (int choice : {0, 1}) {
      const auto ctx = unr(2, m, 8, choice);
      const auto fd = build_framing_unramified(ctx);
      const auto C = build_C_unramified(ctx);
      const auto pts = enumerate_admissible(fd, 1);
      const std::set<GradedLattice> ptset(pts.begin(), pts.end());
      const auto k = detail::residue_field(*fd.R);
      std::map<UnrLattice, std::set<std::pair<int64_t, int64_t>>> both_lines;
      for (const auto& M : pts) {
        const auto cl = classify_point(fd, M);
        const auto s = square_of_M(fd, M);
        if (cl.lambda0) {
          EXPECT_EQ(vertex_type(*cl.lambda0, C), VertexType::Type0);
          EXPECT_EQ(fd.base_change(*cl.lambda0), s.B);
        }
        if (cl.lambda1) {
          EXPECT_EQ(vertex_type(*cl.lambda1, C), VertexType::Type2);
          EXPECT_EQ(fd.base_change(*cl.lambda1), s.A);
        }
        if (cl.tag != UnrTag::Both) continue;
        // the line A/B is rational over k' and isotropic for h mod pi
        const auto l = line_of_point(fd, *cl.lambda0, s);
        EXPECT_EQ(l.second.frob(2), l.second);
        const auto Bc = cl.lambda0->basis().map([&](const GRElem& x) { return ctx.oe_to_coeff.apply(x); });
        const auto c = detail::lift_line(*fd.R, l);
        const auto v = detail::mat_vec(Bc, c);
        const GRElem hv = Form<GRElem>::make(fd.h_gram, [&](const GRElem& x) { return fd.sig(x); }).eval(v, v);
        EXPECT_TRUE(hv.is_zero() || hv.val() >= 2 * cl.lambda0->shift() + 1);
        const bool fresh =
            both_lines[*cl.lambda0].insert({k->residue_index(l.first), k->residue_index(l.second)}).second;
        EXPECT_TRUE(fresh);  // injective
      }
      ASSERT_FALSE(both_lines.empty());
      // every rational isotropic line of every such Lambda0 gives a "both" point
      for (const auto& [L0, seen] : both_lines) {
        const auto iso = isotropic_lines(reduce_at_vertex(ctx, L0, VertexType::Type0), 1);
        EXPECT_EQ(static_cast<int64_t>(iso.size()), ctx.q + 1);
        for (const auto& l : iso) {
          auto to_k = [&](const GRElem& x) {
            return detail::to_residue(*k, ctx.oe_to_coeff.apply(detail::lift_residue(*ctx.OE, x)));
          };
          const auto M = point_from_line(fd, L0, {to_k(l.first), to_k(l.second)}, LineMap::SelfDual);
          EXPECT_EQ(classify_point(fd, M).tag, UnrTag::Both);
          if (detail::in_box(M.M0, 1) && detail::in_box(M.M1, 1)) EXPECT_TRUE(ptset.count(M));
        }
      }
    }
  }
}

TEST(Unramified, NonRationalLineIsNotBoth) {
  // m = 2: lines outside F_{q^2} give B-selfdual points only
  const auto ctx = unr(2, 2);
  const auto fd = build_framing_unramified(ctx);
  const auto L0 = UnrLattice::standard(2, ctx.OE->one());
  const auto k = detail::residue_field(*fd.R);
  int both = 0, only_b = 0;
  for (const auto& l : projective_line(*k)) {
    const auto tag = classify_point(fd, point_from_line(fd, L0, l, LineMap::SelfDual)).tag;
    EXPECT_NE(tag, UnrTag::APiModular);
    (tag == UnrTag::Both ? both : only_b)++;
  }
  EXPECT_EQ(both, 3);
  EXPECT_EQ(only_b, 17 - 3);
}

TEST(Unramified, MPlusMinus) {
  const auto ctx = unr(3, 1);
  const auto fd = build_framing_unramified(ctx);
  const auto C = build_C_unramified(ctx);
  for (auto t : {VertexType::Type0, VertexType::Type2})
    for (const auto& L : vertex_lattices_in_box(C, ctx.OE->one(), *ctx.OE, 1, t)) {
      const auto r = build_M_pm(fd, L);
      EXPECT_EQ(r.plus, r.minus.scaled(-1));
      const auto Lb = fd.base_change(L);
      EXPECT_EQ(fd.V_on_N1(r.minus.M1), Lb.scaled(1));
      // every point over Lambda sits between M^- and M^+
      const auto k = detail::residue_field(*fd.R);
      const auto v = t == VertexType::Type0 ? LineMap::SelfDual : LineMap::PiModular;
      for (const auto& l : projective_line(*k)) {
        const auto M = point_from_line(fd, L, l, v);
        EXPECT_TRUE(M.M0.contains(r.minus.M0) && M.M1.contains(r.minus.M1));
        EXPECT_TRUE(r.plus.M0.contains(M.M0) && r.plus.M1.contains(M.M1));
      }
    }
  try {
    build_M_pm(fd, UnrLattice::diagonal({0, 1}, ctx.OE->one()));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongType);
  }
}

TEST(Unramified, ShadowOnAllPoints) {
  for (int m : {1, 2}) {
    const auto fd = build_framing_unramified(unr(2, m));
    for (const auto& M : enumerate_admissible(fd, 1)) {
      const auto r = theorem_shadow_check(fd, M);
      EXPECT_TRUE(r.ok) << r.failure;
      EXPECT_EQ(r.special_lengths, (std::pair{1, 1}));
    }
  }
}

TEST(Unramified, PointFromLineErrors) {
  const auto ctx = unr(2, 1);
  const auto fd = build_framing_unramified(ctx);
  const auto L0 = UnrLattice::standard(2, ctx.OE->one());
  const auto k = detail::residue_field(*fd.R);
  auto code = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;
  };
  EXPECT_EQ(code([&] { point_from_line(fd, L0, {k->one(), k->zero()}, LineMap::PiModular); }), ErrorCode::WrongType);
  EXPECT_EQ(code([&] { point_from_line(fd, L0, {k->zero(), k->zero()}, LineMap::SelfDual); }),
            ErrorCode::LineNotInQuotient);
  const auto other = GaloisRing::make(2, 3, 1);
  EXPECT_EQ(code([&] { point_from_line(fd, L0, {other->one(), other->zero()}, LineMap::SelfDual); }),
            ErrorCode::LineNotInQuotient);
}

// ---------------------------------------------------------------------------

TEST(Ramified, AdmissibilityAndMPlusMinus) {
  const auto ctx = ram(3, 1);
  const auto fd = build_framing_ramified(ctx);
  const auto C = build_C_ramified(ctx);
  const RamElem one = RamElem::from_base(ctx.OF->one());
  for (const auto& L : vertex_lattices_in_box(C, one, *ctx.OF, 2, VertexType::Type2)) {
    const auto r = build_M_pm(fd, L);
    EXPECT_EQ(fd.sharp(r.minus), r.plus);
    EXPECT_EQ(r.minus.index_in(r.plus), 2);
    EXPECT_EQ(fd.V(r.plus), r.minus);  // V Lambda = Pi Lambda
  }
  const auto L0 = RamLattice::standard(2, RamElem::from_base(fd.R->one()));
  EXPECT_TRUE(is_admissible(fd, L0));
  EXPECT_FALSE(is_admissible(fd, L0.scaled(1)));
  EXPECT_EQ(enumerate_admissible(fd, 0).size(), 1u);
}

TEST(Ramified, LemmaOnTauStability) {
  for (int m : {1, 2}) {
    for (int choice : {0, 1}) {
      const auto ctx = ram(3, m, 8, choice);
      const auto fd = build_framing_ramified(ctx);
      const auto C = build_C_ramified(ctx);
      const auto pts = enumerate_admissible(fd, 1);
      int stable = 0;
      for (const auto& M : pts) {
        const auto cl = classify_point(fd, M);
        EXPECT_TRUE(cl.hull_tau_stable);
        if (cl.tau_stable) {
          ++stable;
          EXPECT_EQ(fd.base_change(cl.lambda), M);
          EXPECT_EQ(vertex_type(cl.lambda, C), VertexType::Type0);
        } else {
          EXPECT_EQ(fd.base_change(cl.lambda), cl.hull);
          EXPECT_EQ(fd.sharp(cl.hull), cl.hull.scaled(1));
          EXPECT_EQ(M.index_in(cl.hull), 1);
        }
      }
      // the truncation to m = 1 only sees rational points
      if (m == 1) EXPECT_EQ(stable, static_cast<int>(pts.size()));
      else EXPECT_LT(stable, static_cast<int>(pts.size()));
    }
  }
}

TEST(Ramified, ImagesOfLinesAndCounts) {
  for (int m : {1, 2}) {
    const auto ctx = ram(3, m);
    const auto fd = build_framing_ramified(ctx);
    const auto C = build_C_ramified(ctx);
    const RamElem one = RamElem::from_base(ctx.OF->one());
    const auto pts = enumerate_admissible(fd, 1);
    const auto k = detail::residue_field(*fd.R);
    const auto lines = projective_line(*k);
    std::set<RamLattice> images;
    for (const auto& L1 : vertex_lattices_in_box(C, one, *ctx.OF, 2, VertexType::Type2)) {
      int stable = 0;
      std::set<RamLattice> mine;
      for (const auto& l : lines) {
        const auto M = point_from_line(fd, L1, l);
        EXPECT_TRUE(is_admissible(fd, M));
        mine.insert(M);
        const auto cl = classify_point(fd, M);
        const bool rational = l.first.frob(1) == l.first && l.second.frob(1) == l.second;
        EXPECT_EQ(cl.tau_stable, rational);
        if (cl.tau_stable) ++stable;
        else EXPECT_EQ(cl.lambda, L1);
        if (detail::in_box(M, 2)) images.insert(M);
      }
      EXPECT_EQ(mine.size(), lines.size());
      EXPECT_EQ(stable, ctx.q + 1);
    }
    EXPECT_EQ(images, std::set<RamLattice>(pts.begin(), pts.end())) << "m=" << m;
  }
}

TEST(Ramified, TypeZeroInExactlyTwoTypeTwo) {
  for (int p : {3, 5}) {
    const auto ctx = ram(p, 1);
    const auto C = build_C_ramified(ctx);
    const RamElem one = RamElem::from_base(ctx.OF->one());
    const auto type2 = vertex_lattices_in_box(C, one, *ctx.OF, 2, VertexType::Type2);
    for (const auto& L0 : vertex_lattices_in_box(C, one, *ctx.OF, 1, VertexType::Type0)) {
      std::set<RamLattice> brute;
      for (const auto& L1 : type2)
        if (L1.contains(L0)) brute.insert(L1);
      const auto via_lines = type2_containing(ctx, L0);
      EXPECT_EQ(brute.size(), 2u);
      EXPECT_EQ(brute, std::set<RamLattice>(via_lines.begin(), via_lines.end()));
      for (const auto& L1 : via_lines) EXPECT_EQ(vertex_type(L1, C), VertexType::Type2);
    }
  }
}

TEST(Ramified, ShadowOnAllPoints) {
  for (int m : {1, 2}) {
    const auto fd = build_framing_ramified(ram(3, m));
    for (const auto& M : enumerate_admissible(fd, 1)) {
      const auto r = theorem_shadow_check(fd, M);
      EXPECT_TRUE(r.ok) << r.failure;
    }
  }
}

TEST(Ramified, WrongTypeForMap) {
  const auto ctx = ram(3, 1);
  const auto fd = build_framing_ramified(ctx);
  const auto k = detail::residue_field(*fd.R);
  const auto L0 = RamLattice::standard(2, RamElem::from_base(ctx.OF->one()));
  try {
    point_from_line(fd, L0, {k->one(), k->zero()});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongType);
  }
}
