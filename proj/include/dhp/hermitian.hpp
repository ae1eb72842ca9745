#pragma once

// The split hermitian plane C, vertex lattices in it, and the finite forms
// obtained by reducing h at a vertex lattice.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dhp/lattice.hpp"
#include "dhp/local_arith.hpp"
#include "dhp/quaternion.hpp"

namespace dhp {

enum class VertexType { Type0, Type2, None };

inline std::string_view to_string(VertexType t) {
  switch (t) {
    case VertexType::Type0: return "type0";
    case VertexType::Type2: return "type2";
    case VertexType::None: return "none";
  }
  return "none";
}

/// Rational E-level element types: O_E for the unramified case, O_F[Pi] otherwise.
using UnrLattice = Lattice<GRElem>;
using RamLattice = Lattice<RamElem>;

template <class Elem>
Mat<Elem> split_gram(const Elem& proto) {
  Mat<Elem> h(2, 2, proto);
  h(0, 1) = proto.one_like();
  h(1, 0) = proto.one_like();
  return h;
}

/// h(x, y) = x^T antidiag(1,1) conj(y) on C = E^2.
inline Form<GRElem> build_C_unramified(const ArithmeticContext& ctx) {
  const int f = ctx.f;
  return Form<GRElem>::make(split_gram(ctx.OE->one()), [f](const GRElem& x) { return x.frob(f); });
}

inline Form<RamElem> build_C_ramified(const ArithmeticContext& ctx) {
  return Form<RamElem>::make(split_gram(RamElem::from_base(ctx.OF->one())), [](const RamElem& x) { return x.conj(); });
}

/// Lambda^sharp == Lambda (type 0) or Lambda^sharp == w Lambda (type 2), where w
/// is the uniformizer of O_E.
template <class Elem>
VertexType vertex_type(const Lattice<Elem>& L, const Form<Elem>& form) {
  const auto d = L.dual(form);
  if (d == L) return VertexType::Type0;
  if (d == L.scaled(1)) return VertexType::Type2;
  return VertexType::None;
}

// ---------------------------------------------------------------------------
// Finite forms

enum class FormKind { Hermitian, Symmetric };

struct FiniteForm {
  FormKind kind = FormKind::Hermitian;
  std::shared_ptr<const GaloisRing> field;  // GR(p, d, 1) = F_{p^d}
  int frob_power = 0;                       // x -> x^(p^frob_power) is the conjugation (hermitian)
  Mat<GRElem> gram;
  std::string provenance;

  GRElem eval(const std::vector<GRElem>& x, const std::vector<GRElem>& y) const {
    GRElem acc = x[0].zero_like();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const GRElem yj = kind == FormKind::Hermitian ? y[j].frob(frob_power) : y[j];
        acc += x[i] * gram_in(x[0].ring(), i, j) * yj;
      }
    return acc;
  }

  /// Gram entry moved into `ring` (an extension of `field`), via a cached embedding.
  GRElem gram_in(const GaloisRing* ring, int i, int j) const {
    if (ring == field.get()) return gram(i, j);
    if (!ext_emb_ || ext_emb_->dst() != ring) fail(ErrorCode::LevelMismatch, "finite form used over an unrelated field");
    return ext_emb_->apply(gram(i, j));
  }

  std::shared_ptr<Embedding> ext_emb_;
};

namespace detail {
inline GRElem to_residue(const GaloisRing& field, const GRElem& x) {
  std::vector<int64_t> c(field.degree());
  for (int i = 0; i < field.degree(); ++i) c[i] = x.coeff(i) % field.p();
  return field.from_coeffs(c);
}
}  // namespace detail

/// Reduction of h at an unramified vertex lattice: h mod pi on pi^{-1}L/L
/// (type 0, in coordinates of the basis of L) or pi*h mod pi on L/piL (type 2).
inline FiniteForm reduce_at_vertex(const ArithmeticContext& ctx, const UnrLattice& L, VertexType type) {
  const auto form = build_C_unramified(ctx);
  const VertexType actual = vertex_type(L, form);
  if (actual != type || type == VertexType::None)
    fail(ErrorCode::WrongType, "lattice has type " + std::string(to_string(actual)));
  const auto& B = L.basis();
  const Mat<GRElem> G = B.transpose() * form.gram * B.map(form.twist);
  // full basis is pi^{-s} B, so h on it is pi^{-2s} G
  const int k = 2 * L.shift() - (type == VertexType::Type2 ? 1 : 0);
  FiniteForm ff;
  ff.kind = FormKind::Hermitian;
  ff.field = GaloisRing::make(ctx.p, 2 * ctx.f, 1);
  ff.frob_power = ctx.f;
  ff.gram = Mat<GRElem>(2, 2, ff.field->zero());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ff.gram(i, j) = detail::to_residue(*ff.field, G(i, j).div_uniformizer(k));
  ff.provenance = std::string(to_string(type)) + " " + L.to_string();
  if (ff.gram.det().is_zero()) fail(ErrorCode::DegenerateReduction, ff.provenance);
  return ff;
}

/// Ramified type-0 reduction: the symmetric form h mod Pi on L/PiL.
inline FiniteForm reduce_at_vertex(const ArithmeticContext& ctx, const RamLattice& L, VertexType type) {
  const auto form = build_C_ramified(ctx);
  const VertexType actual = vertex_type(L, form);
  if (actual != type || type != VertexType::Type0)
    fail(ErrorCode::WrongType, "ramified reduction needs a type-0 lattice, got " + std::string(to_string(actual)));
  const auto& B = L.basis();
  const Mat<RamElem> G = B.transpose() * form.gram * B.map(form.twist);
  // h(Pi^{-s}x, Pi^{-s}y) = (-1)^s Pi^{-2s} h(x, y)
  const int s = L.shift();
  FiniteForm ff;
  ff.kind = FormKind::Symmetric;
  ff.field = GaloisRing::make(ctx.p, ctx.f, 1);
  ff.gram = Mat<GRElem>(2, 2, ff.field->zero());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      RamElem g = G(i, j).div_uniformizer(2 * s);
      if (s % 2 != 0) g = -g;
      ff.gram(i, j) = detail::to_residue(*ff.field, g.a());
    }
  ff.provenance = "type0 " + L.to_string();
  if (ff.gram.det().is_zero()) fail(ErrorCode::DegenerateReduction, ff.provenance);
  return ff;
}

using Line = std::pair<GRElem, GRElem>;

/// Points of P^1 over a finite field in the order [1:t] (t by residue index), then [0:1].
inline std::vector<Line> projective_line(const GaloisRing& field) {
  std::vector<Line> out;
  for (int64_t idx = 0; idx < field.residue_size(); ++idx) out.emplace_back(field.one(), field.residue_lift(idx));
  out.emplace_back(field.zero(), field.one());
  return out;
}

/// Isotropic lines of a rank-2 finite form over the degree-s extension of its field.
inline std::vector<Line> isotropic_lines(const FiniteForm& form, int s) {
  if (s < 1) fail(ErrorCode::ConfigError, "extension degree must be positive");
  FiniteForm f = form;
  auto ext = s == 1 ? form.field : GaloisRing::make(form.field->p(), form.field->degree() * s, 1);
  if (s > 1) f.ext_emb_ = std::make_shared<Embedding>(form.field, ext);
  std::vector<Line> out;
  for (const auto& [a, b] : projective_line(*ext)) {
    const std::vector<GRElem> v{a, b};
    if (f.eval(v, v).is_zero()) out.emplace_back(a, b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Neighbouring vertex lattices

namespace detail {
inline std::vector<GRElem> lift_line_rational(const GaloisRing& R, const Line& l) {
  auto lift = [&](const GRElem& x) {
    std::vector<int64_t> c(R.degree());
    for (int i = 0; i < R.degree(); ++i) c[i] = x.coeff(i);
    return R.from_coeffs(c);
  };
  return {lift(l.first), lift(l.second)};
}
}  // namespace detail

/// Unramified: the q+1 vertex lattices of the other type adjacent to Lambda
/// (type 0: preimages in pi^{-1}Lambda of isotropic lines; type 2: preimages in
/// Lambda of isotropic lines of pi h).
inline std::vector<UnrLattice> unramified_neighbours(const ArithmeticContext& ctx, const UnrLattice& L) {
  const VertexType t = vertex_type(L, build_C_unramified(ctx));
  if (t == VertexType::None) fail(ErrorCode::WrongType, "not a vertex lattice");
  const auto lines = isotropic_lines(reduce_at_vertex(ctx, L, t), 1);
  std::vector<UnrLattice> out;
  for (const auto& l : lines) {
    const auto c = detail::lift_line_rational(*ctx.OE, l);
    const auto sub = L.sub_from_line(c);
    out.push_back(t == VertexType::Type0 ? sub.scaled(-1) : sub);
  }
  return out;
}

/// Ramified: the two type-2 lattices containing a type-0 lattice, Pi^{-1} times
/// the preimages of the isotropic lines of the symmetric reduction.
inline std::vector<RamLattice> type2_containing(const ArithmeticContext& ctx, const RamLattice& L0) {
  const auto lines = isotropic_lines(reduce_at_vertex(ctx, L0, VertexType::Type0), 1);
  std::vector<RamLattice> out;
  for (const auto& l : lines) {
    const auto c = detail::lift_line_rational(*ctx.OF, l);
    out.push_back(L0.sub_from_line({RamElem::from_base(c[0]), RamElem::from_base(c[1])}).scaled(-1));
  }
  return out;
}

/// Ramified: the q+1 type-0 lattices inside a type-2 lattice, one per line of Lambda/Pi Lambda.
inline std::vector<RamLattice> type0_inside(const ArithmeticContext& ctx, const RamLattice& L1) {
  if (vertex_type(L1, build_C_ramified(ctx)) != VertexType::Type2) fail(ErrorCode::WrongType, "need a type-2 lattice");
  std::vector<RamLattice> out;
  for (const auto& l : projective_line(*GaloisRing::make(ctx.p, ctx.f, 1))) {
    const auto c = detail::lift_line_rational(*ctx.OF, l);
    out.push_back(L1.sub_from_line({RamElem::from_base(c[0]), RamElem::from_base(c[1])}));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SL2(F) acting on C

/// g in SL2(F) as the unitary matrix w^{-shift} G of C: conjugation of g by
/// diag(1, -delta) (unramified) or diag(1, -Pi) (ramified).
struct CMatrix {
  Mat<GRElem> unr;
  Mat<RamElem> ram;
  int shift = 0;
};

inline CMatrix sl2_to_C(const ArithmeticContext& ctx, const MatF& g) {
  CMatrix out;
  int s = 0;
  for (const auto& row : g)
    for (const auto& e : row) s = std::max(s, e.shift);
  if (ctx.unramified()) {
    // [[a, -delta b], [-delta^{-1} c, d]] with pi^{-s} common denominator
    auto e = [&](const FracF& v) { return ctx.of_to_oe.apply(v.raised_to(s).x); };
    Mat<GRElem> m(2, 2, ctx.OE->one());
    m(0, 0) = e(g[0][0]);
    m(0, 1) = -(ctx.delta * e(g[0][1]));
    m(1, 0) = -(ctx.delta.inverse() * e(g[1][0]));
    m(1, 1) = e(g[1][1]);
    out.unr = m;
    out.shift = s;
  } else {
    // [[a, -Pi b], [-Pi^{-1} c, d]] with Pi^{-(2s+1)} common denominator
    const int S = 2 * s + 1;
    auto e = [&](const FracF& v) { return RamElem::from_base(v.x).mul_uniformizer(S - 2 * v.shift); };
    Mat<RamElem> m(2, 2, RamElem::from_base(ctx.OF->one()));
    m(0, 0) = e(g[0][0]);
    m(0, 1) = -e(g[0][1]).mul_uniformizer(1);
    m(1, 0) = -RamElem::from_base(g[1][0].x).mul_uniformizer(S - 2 * g[1][0].shift - 1);
    m(1, 1) = e(g[1][1]);
    out.ram = m;
    out.shift = S;
  }
  return out;
}

}  // namespace dhp
