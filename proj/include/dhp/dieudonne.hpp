#pragma once

// The framing isocrystal N with V, F, the pairing and the O_B-action, and the
// Dieudonne lattices in it that are points of the moduli space over the
// algebraic closure (truncated to the coefficient ring of the context).
//
// Unramified: N = N0 + N1, both identified with the coefficient ring squared.
// Ramified: N is a rank-2 module over the coefficient ring adjoined Pi.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dhp/hermitian.hpp"
#include "dhp/lattice.hpp"
#include "dhp/local_arith.hpp"
#include "dhp/report.hpp"

namespace dhp {

inline constexpr int64_t kMaxBoxCandidates = 10'000'000;

namespace detail {

template <class Elem>
Mat<Elem> block(const Mat<Elem>& m, int bi, int bj) {
  Mat<Elem> r(2, 2, m.proto());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = m(2 * bi + i, 2 * bj + j);
  return r;
}

template <class Elem>
std::vector<Elem> mat_vec(const Mat<Elem>& m, const std::vector<Elem>& v) {
  std::vector<Elem> r(m.rows(), m.proto().zero_like());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

template <class Elem, class Fn>
std::vector<Elem> vmap(const std::vector<Elem>& v, Fn&& fn) {
  std::vector<Elem> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(fn(x));
  return r;
}

/// Inverse of a square matrix with unit determinant.
template <class Elem>
Mat<Elem> unit_inverse(const Mat<Elem>& m) {
  const Elem d = m.det();
  if (!d.is_unit()) fail(ErrorCode::NotAUnit, "matrix is not invertible over the ring");
  return m.adjugate().scaled(d.inverse());
}

inline GRElem random_elem(const GaloisRing& R, std::mt19937_64& rng) {
  std::vector<int64_t> c(R.degree());
  std::uniform_int_distribution<int64_t> dist(0, R.modulus() - 1);
  for (auto& x : c) x = dist(rng);
  return R.from_coeffs(c);
}

/// Lift of a residue-field element of GR(p, d, 1) to GR(p^N, d) (same defining polynomial).
inline GRElem lift_residue(const GaloisRing& R, const GRElem& x) {
  std::vector<int64_t> c(R.degree());
  for (int i = 0; i < R.degree(); ++i) c[i] = x.coeff(i);
  return R.from_coeffs(c);
}

inline std::shared_ptr<const GaloisRing> residue_field(const GaloisRing& R) { return GaloisRing::make(R.p(), R.degree(), 1); }

/// Residues mod w^k with valuation at least v, as digit expansions over residue lifts.
template <class Elem>
std::vector<Elem> residue_reps(const Elem& proto, const GaloisRing& R, int k, int v) {
  std::vector<Elem> out{proto.zero_like()};
  for (int i = std::max(v, 0); i < k; ++i) {
    std::vector<Elem> next;
    next.reserve(out.size() * R.residue_size());
    for (const auto& x : out)
      for (int64_t idx = 0; idx < R.residue_size(); ++idx) {
        Elem t = proto.zero_like();
        if constexpr (std::is_same_v<Elem, GRElem>) t = R.residue_lift(idx);
        else t = RamElem::from_base(R.residue_lift(idx));
        next.push_back(x + t.mul_uniformizer(i));
      }
    out = std::move(next);
  }
  return out;
}

/// All rank-2 lattices L with w^c O^2 within L within w^{-c} O^2, optionally of a given volume.
template <class Elem>
std::vector<Lattice<Elem>> box_lattices(const Elem& proto, const GaloisRing& R, int c, int64_t* candidates = nullptr,
                                        std::optional<int> volume = std::nullopt) {
  std::vector<Lattice<Elem>> out;
  int64_t total = 0;
  for (int a0 = 0; a0 <= 2 * c; ++a0)
    for (int a1 = 0; a1 <= 2 * c; ++a1) {
      if (volume && a0 + a1 - 2 * c != *volume) continue;
      const int v = a0 + a1 - 2 * c;
      total += ipow(R.residue_size(), a0 - std::clamp(v, 0, a0));
    }
  if (candidates) *candidates = total;
  if (total > kMaxBoxCandidates) fail(ErrorCode::BoxTooLarge, std::to_string(total) + " candidate lattices");
  for (int a0 = 0; a0 <= 2 * c; ++a0)
    for (int a1 = 0; a1 <= 2 * c; ++a1) {
      if (volume && a0 + a1 - 2 * c != *volume) continue;
      for (const auto& x : residue_reps(proto, R, a0, a0 + a1 - 2 * c)) {
        Mat<Elem> g(2, 2, proto);
        g(0, 0) = proto.uniformizer_pow(a0);
        g(0, 1) = x;
        g(1, 1) = proto.uniformizer_pow(a1);
        out.push_back(Lattice<Elem>::from_generators(g, c));
      }
    }
  return out;
}

template <class Elem>
bool in_box(const Lattice<Elem>& L, int c) {
  const Elem one = L.proto().one_like();
  return Lattice<Elem>::diagonal({-c, -c}, one).contains(L) && L.contains(Lattice<Elem>::diagonal({c, c}, one));
}

/// small within mid within big, each of index one.
template <class Elem>
bool chain_of_index_one(const Lattice<Elem>& small, const Lattice<Elem>& mid, const Lattice<Elem>& big) {
  return big.contains(mid) && mid.contains(small) && mid.volume() - big.volume() == 1 &&
         small.volume() - mid.volume() == 1;
}

/// Lattice w^{-shift} * (w B + span(B c)): the preimage of the line [c] in L / wL, L = w^{-shift} B.
template <class Elem>
Lattice<Elem> line_preimage(const Mat<Elem>& B, int shift, const std::vector<Elem>& c) {
  Mat<Elem> col(2, 1, B.proto());
  col(0, 0) = c[0];
  col(1, 0) = c[1];
  return Lattice<Elem>::from_generators(B.map([](const Elem& x) { return x.mul_uniformizer(1); }).hcat(B * col), shift);
}

/// Coordinates of v (integral, relative to the same shift) in the basis B; exact division.
template <class Elem>
std::vector<Elem> coords_in_basis(const Mat<Elem>& B, const std::vector<Elem>& v) {
  const Elem d = B.det();
  const int k = d.val();
  const Elem u = d.div_uniformizer(k).inverse();
  const auto w = mat_vec(B.adjugate(), v);
  return vmap(w, [&](const Elem& x) { return x.div_uniformizer(k) * u; });
}

/// Rational lattice whose base change is L, found from the Hermite form.
template <class Elem>
Lattice<Elem> descend(const Lattice<Elem>& L, const Embedding& emb, const Elem& rational_proto) {
  const auto& B = L.basis();
  const auto& a = L.pivots();
  const int n = L.rank();
  Mat<Elem> g(n, n, rational_proto);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (i == j) {
        g(i, i) = rational_proto.uniformizer_pow(a[i]);
        continue;
      }
      auto pre = emb.preimage(B(i, j), a[i]);
      if (!pre) fail(ErrorCode::DescentObstruction, "entry " + B(i, j).to_string() + " is not rational");
      g(i, j) = *pre;
    }
  auto D = Lattice<Elem>::from_generators(g, L.shift());
  if (D.map_entries([&](const Elem& x) { return emb.apply(x); }) != L)
    fail(ErrorCode::DescentObstruction, "lattice " + L.to_string() + " is not defined over the base");
  return D;
}

template <class Elem>
Lattice<Elem> base_change(const Lattice<Elem>& L, const Embedding& emb) {
  return L.map_entries([&](const Elem& x) { return emb.apply(x); });
}

}  // namespace detail

// ===========================================================================
// Unramified framing

/// Graded Dieudonne lattice M = M0 + M1.
struct GradedLattice {
  UnrLattice M0, M1;

  bool operator==(const GradedLattice& o) const { return M0 == o.M0 && M1 == o.M1; }
  bool operator<(const GradedLattice& o) const {
    if (M0 < o.M0) return true;
    if (o.M0 < M0) return false;
    return M1 < o.M1;
  }
  GradedLattice scaled(int k) const { return {M0.scaled(k), M1.scaled(k)}; }
  std::string to_string() const { return "(" + M0.to_string() + ", " + M1.to_string() + ")"; }
};

/// V = Vm sigma^{-1}, F = Fm sigma on N = N0 + N1 (4-vectors, N0 first).
struct UnrFraming {
  ArithmeticContext ctx;
  std::shared_ptr<const GaloisRing> R;
  GRElem delta;             // delta moved into R
  Mat<GRElem> Vm, Fm;
  Mat<GRElem> pairing;      // <x, y> = x^T J y
  Mat<GRElem> iota_pi, iota_delta;
  Mat<GRElem> h_gram;       // on N0: h(x, y) = x^T H sigma(y), derived from J and F
  Mat<GRElem> tau_mat;      // tau = T sigma^2 on N0, derived from V

  GRElem sig(const GRElem& x, int k = 1) const { return x.frob(k * ctx.f); }
  std::vector<GRElem> sig(const std::vector<GRElem>& v, int k = 1) const {
    return detail::vmap(v, [&](const GRElem& x) { return sig(x, k); });
  }
  std::vector<GRElem> V(const std::vector<GRElem>& x) const { return detail::mat_vec(Vm, sig(x, -1)); }
  std::vector<GRElem> F(const std::vector<GRElem>& x) const { return detail::mat_vec(Fm, sig(x, 1)); }
  GRElem pair(const std::vector<GRElem>& x, const std::vector<GRElem>& y) const {
    GRElem acc = R->zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) acc += x[i] * pairing(i, j) * y[j];
    return acc;
  }
  /// pi^{-1} delta^{-1} <x, F y> for x, y in N0 (given as 2-vectors); exact division.
  GRElem h_from_pairing(const std::vector<GRElem>& x, const std::vector<GRElem>& y) const {
    const auto z = R->zero();
    return pair({x[0], x[1], z, z}, F({y[0], y[1], z, z})).div_uniformizer(1) * delta.inverse();
  }
  Form<GRElem> sharp_form() const {
    const int f = ctx.f;
    return Form<GRElem>::make(h_gram, [f](const GRElem& x) { return x.frob(f); });
  }
  Form<GRElem> pairing_01() const { return Form<GRElem>::make(detail::block(pairing, 0, 1), nullptr); }
  Form<GRElem> pairing_10() const { return Form<GRElem>::make(detail::block(pairing, 1, 0), nullptr); }

  // Lattice-level operators, read off the block matrices.
  UnrLattice V_on_N1(const UnrLattice& L) const {  // N1 -> N0
    return L.image(detail::block(Vm, 0, 1), 0, [this](const GRElem& x) { return sig(x, -1); });
  }
  UnrLattice V_on_N0(const UnrLattice& L) const {  // N0 -> N1
    return L.image(detail::block(Vm, 1, 0), 0, [this](const GRElem& x) { return sig(x, -1); });
  }
  /// Inverse of V_on_N1 (a lattice in N0 to one in N1).
  UnrLattice V_on_N1_inverse(const UnrLattice& L) const {
    const auto inv = detail::unit_inverse(detail::block(Vm, 0, 1));
    return L.image(inv.map([this](const GRElem& x) { return sig(x, 1); }), 0,
                   [this](const GRElem& x) { return sig(x, 1); });
  }
  UnrLattice tau(const UnrLattice& L) const {
    return L.image(tau_mat, 0, [this](const GRElem& x) { return sig(x, 2); });
  }
  UnrLattice tau_inverse(const UnrLattice& L) const {
    const auto inv = detail::unit_inverse(tau_mat);
    return L.image(inv.map([this](const GRElem& x) { return sig(x, -2); }), 0,
                   [this](const GRElem& x) { return sig(x, -2); });
  }
  UnrLattice sharp(const UnrLattice& L) const { return L.dual(sharp_form()); }
  /// (M1)^vee inside N0 and (M0)^vee inside N1.
  UnrLattice dual_in_N0(const UnrLattice& M1) const { return M1.dual(pairing_01()); }
  UnrLattice dual_in_N1(const UnrLattice& M0) const { return M0.dual(pairing_10()); }

  UnrLattice base_change(const UnrLattice& L) const { return detail::base_change(L, ctx.oe_to_coeff); }
  UnrLattice descend(const UnrLattice& L) const { return detail::descend(L, ctx.oe_to_coeff, ctx.OE->one()); }
};

inline UnrFraming build_framing_unramified(const ArithmeticContext& ctx) {
  if (!ctx.unramified()) fail(ErrorCode::NoFraming, "unramified framing needs an unramified context");
  UnrFraming fd;
  fd.ctx = ctx;
  fd.R = ctx.coeff;
  const auto& R = *fd.R;
  const GRElem one = R.one(), pi = R.from_int(ctx.p);
  fd.delta = ctx.oe_to_coeff.apply(ctx.delta);

  fd.Vm = Mat<GRElem>(4, 4, one);
  fd.Fm = Mat<GRElem>(4, 4, one);
  for (int i = 0; i < 2; ++i) {
    fd.Vm(i, 2 + i) = one;     // N1 -> N0: sigma^{-1}
    fd.Vm(2 + i, i) = pi;      // N0 -> N1: pi sigma^{-1}
    fd.Fm(2 + i, i) = pi;      // N0 -> N1: pi sigma
    fd.Fm(i, 2 + i) = one;     // N1 -> N0: sigma
  }
  // J = [[0, P], [-P^T, 0]], P = delta * antidiag(1, 1)
  fd.pairing = Mat<GRElem>(4, 4, one);
  fd.pairing(0, 3) = fd.delta;
  fd.pairing(1, 2) = fd.delta;
  fd.pairing(3, 0) = -fd.delta;
  fd.pairing(2, 1) = -fd.delta;
  // iota(Pi) = [[0, W], [pi W, 0]], W = diag(1, -1); iota(delta) = delta on N0, -delta on N1
  fd.iota_pi = Mat<GRElem>(4, 4, one);
  fd.iota_pi(0, 2) = one;
  fd.iota_pi(1, 3) = -one;
  fd.iota_pi(2, 0) = pi;
  fd.iota_pi(3, 1) = -pi;
  fd.iota_delta = Mat<GRElem>(4, 4, one);
  for (int i = 0; i < 4; ++i) fd.iota_delta(i, i) = i < 2 ? fd.delta : -fd.delta;

  // h = pi^{-1} delta^{-1} J01 F10; dividing F10 first keeps full precision
  const Mat<GRElem> F10 = detail::block(fd.Fm, 1, 0).map([](const GRElem& x) { return x.div_uniformizer(1); });
  fd.h_gram = (detail::block(fd.pairing, 0, 1) * F10).scaled(fd.delta.inverse());

  // V^2 on N0 is P sigma^{-2} with P = V01 sigma^{-1}(V10), so tau = pi V^{-2} = sigma^2(pi P^{-1}) sigma^2
  const Mat<GRElem> P = detail::block(fd.Vm, 0, 1) * detail::block(fd.Vm, 1, 0).map([&](const GRElem& x) {
    return fd.sig(x, -1);
  });
  const GRElem d = P.det();
  if (d.val() != 2) fail(ErrorCode::NoFraming, "V^2 on N0 is not pi times an isomorphism");
  const GRElem u = d.div_uniformizer(2).inverse();
  const Mat<GRElem> T = P.adjugate().map([&](const GRElem& x) { return x.div_uniformizer(1) * u; });
  fd.tau_mat = T.map([&](const GRElem& x) { return fd.sig(x, 2); });
  return fd;
}

// ---------------------------------------------------------------------------
// Admissibility and the square of Lemma-type correspondences

/// Conditions (a)(b)(c) with strict inclusions.
inline bool is_admissible(const UnrFraming& fd, const GradedLattice& M) {
  const auto VM1 = fd.V_on_N1(M.M1);
  const auto VM0 = fd.V_on_N0(M.M0);
  if (!detail::chain_of_index_one(M.M0.scaled(1), VM1, M.M0)) return false;
  if (!detail::chain_of_index_one(M.M1.scaled(1), VM0, M.M1)) return false;
  const auto D0 = fd.dual_in_N0(M.M1);
  const auto D1 = fd.dual_in_N1(M.M0);
  if (!detail::chain_of_index_one(M.M0, D0, M.M0.scaled(-1))) return false;
  if (!detail::chain_of_index_one(M.M1, D1, M.M1.scaled(-1))) return false;
  return true;
}

struct Square {
  UnrLattice A, B;
  bool operator==(const Square& o) const { return A == o.A && B == o.B; }
};

/// A = V(M1)^sharp, B = M0.
inline Square square_of_M(const UnrFraming& fd, const GradedLattice& M) {
  if (!is_admissible(fd, M)) fail(ErrorCode::NotAdmissible, M.to_string());
  return {fd.sharp(fd.V_on_N1(M.M1)), M.M0};
}

/// B within A, A^sharp within B and B^sharp, both within A; every step of length one.
inline bool is_valid_square(const UnrFraming& fd, const Square& s) {
  const auto As = fd.sharp(s.A), Bs = fd.sharp(s.B);
  return detail::chain_of_index_one(As, s.B, s.A) && detail::chain_of_index_one(As, Bs, s.A);
}

inline GradedLattice M_of_square(const UnrFraming& fd, const Square& s) {
  if (!is_valid_square(fd, s)) fail(ErrorCode::InvalidSquare, "A=" + s.A.to_string() + " B=" + s.B.to_string());
  // A^sharp = tau(V M1)
  GradedLattice M{s.B, fd.V_on_N1_inverse(fd.tau_inverse(fd.sharp(s.A)))};
  if (!is_admissible(fd, M)) fail(ErrorCode::InvalidSquare, "square does not come from an admissible lattice");
  return M;
}

enum class UnrTag { BSelfDual, APiModular, Both };

inline std::string_view to_string(UnrTag t) {
  switch (t) {
    case UnrTag::BSelfDual: return "B_selfdual";
    case UnrTag::APiModular: return "A_pi_modular";
    case UnrTag::Both: return "both";
  }
  return "both";
}

struct UnrClassification {
  UnrTag tag = UnrTag::Both;
  std::optional<UnrLattice> lambda0;  // type 0, when B = B^sharp
  std::optional<UnrLattice> lambda1;  // type 2, when A^sharp = pi A
};

/// Trichotomy: B = B^sharp or A^sharp = pi A. Throws NotAdmissible, or
/// InvalidSquare if neither holds.
inline UnrClassification classify_point(const UnrFraming& fd, const GradedLattice& M) {
  const Square s = square_of_M(fd, M);
  const bool b_self = fd.sharp(s.B) == s.B;
  const bool a_pi = fd.sharp(s.A) == s.A.scaled(1);
  if (!b_self && !a_pi) fail(ErrorCode::InvalidSquare, "neither B = B^sharp nor A^sharp = pi A for " + M.to_string());
  UnrClassification c;
  c.tag = b_self && a_pi ? UnrTag::Both : (b_self ? UnrTag::BSelfDual : UnrTag::APiModular);
  if (b_self) c.lambda0 = fd.descend(s.B);
  if (a_pi) c.lambda1 = fd.descend(s.A);
  return c;
}

enum class LineMap { SelfDual, PiModular, Ramified };  // map2.4, map2.6, map3.2

inline std::string_view to_string(LineMap v) {
  switch (v) {
    case LineMap::SelfDual: return "map2.4";
    case LineMap::PiModular: return "map2.6";
    case LineMap::Ramified: return "map3.2";
  }
  return "map2.4";
}

namespace detail {
/// Line coordinates (residue field of the coefficient ring) lifted to R; rejects the zero vector.
inline std::vector<GRElem> lift_line(const GaloisRing& R, const Line& l) {
  const auto k = residue_field(R);
  if (l.first.ring() != k.get() || l.second.ring() != k.get())
    fail(ErrorCode::LineNotInQuotient, "line coordinates must lie in the residue field of the coefficient ring");
  if (l.first.is_zero() && l.second.is_zero()) fail(ErrorCode::LineNotInQuotient, "zero vector spans no line");
  return {lift_residue(R, l.first), lift_residue(R, l.second)};
}
}  // namespace detail

/// map2.4: B = Lambda0 (x) O, A = preimage of l in pi^{-1}B.
/// map2.6: A = Lambda1 (x) O, B = preimage of l in A.
/// The line is given in coordinates of the basis of Lambda.
inline GradedLattice point_from_line(const UnrFraming& fd, const UnrLattice& lambda, const Line& l, LineMap variant) {
  const auto C = build_C_unramified(fd.ctx);
  const VertexType t = vertex_type(lambda, C);
  const VertexType want = variant == LineMap::SelfDual ? VertexType::Type0 : VertexType::Type2;
  if (variant == LineMap::Ramified || t != want)
    fail(ErrorCode::WrongType, std::string(to_string(variant)) + " given a " + std::string(to_string(t)) + " lattice");
  const auto c = detail::lift_line(*fd.R, l);
  const auto Bc = lambda.basis().map([&](const GRElem& x) { return fd.ctx.oe_to_coeff.apply(x); });
  const int s = lambda.shift();
  const auto big = UnrLattice::from_generators(Bc, s);
  Square sq;
  if (variant == LineMap::SelfDual) {
    sq.B = big;
    sq.A = detail::line_preimage(Bc, s + 1, c);
  } else {
    sq.A = big;
    sq.B = detail::line_preimage(Bc, s, c);
  }
  return M_of_square(fd, sq);
}

/// Line of A / B inside pi^{-1}B / B (map2.4 direction), in coordinates of the basis of Lambda0.
inline Line line_of_point(const UnrFraming& fd, const UnrLattice& lambda0, const Square& s) {
  const auto Bc = lambda0.basis().map([&](const GRElem& x) { return fd.ctx.oe_to_coeff.apply(x); });
  const int sh = lambda0.shift() + 1;
  const auto G = s.A.generators_at(std::max(sh, s.A.shift()));
  const int extra = std::max(sh, s.A.shift()) - sh;
  const auto k = detail::residue_field(*fd.R);
  for (int j = 0; j < G.cols(); ++j) {
    auto c = detail::coords_in_basis(Bc, G.col(j));
    if (extra > 0) c = detail::vmap(c, [&](const GRElem& x) { return x.div_uniformizer(extra); });
    if (c[0].val() == 0 || c[1].val() == 0) {
      Line l{detail::to_residue(*k, c[0]), detail::to_residue(*k, c[1])};
      // normalize to [1:t] or [0:1]
      if (!l.first.is_zero()) return {k->one(), l.second * l.first.inverse()};
      return {k->zero(), k->one()};
    }
  }
  fail(ErrorCode::LineNotInQuotient, "A equals B");
}

// ---------------------------------------------------------------------------
// M^-, M^+ attached to a vertex lattice

struct UnrMpm {
  GradedLattice minus, plus;
};

/// M^- = (Lambda, V Lambda) for type 0 and (pi Lambda, V Lambda) for type 2; M^+ = (M^-)^vee.
inline UnrMpm build_M_pm(const UnrFraming& fd, const UnrLattice& lambda) {
  const VertexType t = vertex_type(lambda, build_C_unramified(fd.ctx));
  if (t == VertexType::None) fail(ErrorCode::WrongType, "not a vertex lattice");
  const auto L = fd.base_change(lambda);
  UnrMpm r;
  r.minus = {t == VertexType::Type0 ? L : L.scaled(1), fd.V_on_N0(L)};
  r.plus = {fd.dual_in_N0(r.minus.M1), fd.dual_in_N1(r.minus.M0)};
  return r;
}

// ---------------------------------------------------------------------------
// Point-level content of the main theorem

struct ShadowResult {
  bool ok = true;
  std::string failure;
  std::pair<int, int> special_lengths{0, 0};  // lengths of (M/VM)_0, (M/VM)_1
};

/// iota(Pi) M within M and both graded pieces of M/VM of length one.
inline ShadowResult theorem_shadow_check(const UnrFraming& fd, const GradedLattice& M) {
  if (!is_admissible(fd, M)) fail(ErrorCode::NotAdmissible, M.to_string());
  ShadowResult r;
  const auto PiM1 = M.M1.image(detail::block(fd.iota_pi, 0, 1), 0, nullptr);
  const auto PiM0 = M.M0.image(detail::block(fd.iota_pi, 1, 0), 0, nullptr);
  if (!M.M0.contains(PiM1) || !M.M1.contains(PiM0)) {
    r.ok = false;
    r.failure = "iota(Pi) does not preserve " + M.to_string();
  }
  r.special_lengths = {fd.V_on_N1(M.M1).volume() - M.M0.volume(), fd.V_on_N0(M.M0).volume() - M.M1.volume()};
  if (r.special_lengths != std::pair{1, 1}) {
    r.ok = false;
    r.failure = "not special: lengths " + std::to_string(r.special_lengths.first) + "," +
                std::to_string(r.special_lengths.second);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Enumeration

struct EnumerationStats {
  int64_t candidates = 0;
  int64_t outer_lattices = 0;
};

/// All admissible M with both graded pieces in the box pi^c O^2 within M_i within pi^{-c} O^2.
/// M0 runs over the box; VM1 is then the preimage of a line in M0/pi M0.
inline std::vector<GradedLattice> enumerate_admissible(const UnrFraming& fd, int c, EnumerationStats* stats = nullptr) {
  if (c < 0) fail(ErrorCode::ConfigError, "box size must be non-negative");
  int64_t n0 = 0;
  const auto outer = detail::box_lattices(fd.R->one(), *fd.R, c, &n0);
  const auto k = detail::residue_field(*fd.R);
  const auto lines = projective_line(*k);
  if (n0 * static_cast<int64_t>(lines.size()) > kMaxBoxCandidates)
    fail(ErrorCode::BoxTooLarge, std::to_string(n0 * lines.size()) + " candidates");
  std::vector<GradedLattice> out;
  for (const auto& M0 : outer)
    for (const auto& l : lines) {
      const auto VM1 = M0.sub_from_line(detail::lift_line(*fd.R, l));
      GradedLattice M{M0, fd.V_on_N1_inverse(VM1)};
      if (!detail::in_box(M.M1, c)) continue;
      if (is_admissible(fd, M)) out.push_back(std::move(M));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (stats) {
    stats->outer_lattices = n0;
    stats->candidates = n0 * static_cast<int64_t>(lines.size());
  }
  return out;
}

// ===========================================================================
// Ramified framing

/// N = (coefficient ring)[Pi]^2, V = Vm sigma^{-1}, F = Fm sigma, h(x, y) = x^T H conj(y).
/// The alternating pairing lives over the framing ring, where delta is available.
struct RamFraming {
  ArithmeticContext ctx;
  std::shared_ptr<const GaloisRing> R, Rf;
  GRElem delta;            // in Rf, delta^2 = u, sigma(delta) = -delta
  Mat<RamElem> Vm, Fm;     // over R
  Mat<RamElem> h_gram;     // over R
  Mat<RamElem> zeta_W;     // iota(zeta) x = delta W conj(x), W over R
  Mat<RamElem> tau_mat;    // tau = T sigma, derived from V
  Mat<GRElem> pairing;     // Gram of <,> on e0, Pi e0, e1, Pi e1 (over Rf)

  RamElem sig(const RamElem& x, int k = 1) const { return x.frob(k * ctx.f); }
  std::vector<RamElem> sig(const std::vector<RamElem>& v, int k = 1) const {
    return detail::vmap(v, [&](const RamElem& x) { return sig(x, k); });
  }
  RamElem to_f(const RamElem& x) const { return ctx.coeff_to_framing.apply(x); }
  std::vector<RamElem> to_f(const std::vector<RamElem>& v) const {
    return detail::vmap(v, [&](const RamElem& x) { return to_f(x); });
  }
  Mat<RamElem> to_f(const Mat<RamElem>& m) const { return m.map([&](const RamElem& x) { return to_f(x); }); }

  // Vector operators; vectors may live over R or Rf (matrices are moved as needed).
  std::vector<RamElem> V(const std::vector<RamElem>& x) const { return detail::mat_vec(lift(Vm, x), sig(x, -1)); }
  std::vector<RamElem> F(const std::vector<RamElem>& x) const { return detail::mat_vec(lift(Fm, x), sig(x, 1)); }
  std::vector<RamElem> tau(const std::vector<RamElem>& x) const { return detail::mat_vec(lift(tau_mat, x), sig(x, 1)); }
  std::vector<RamElem> zeta(const std::vector<RamElem>& x) const {
    const auto xf = x.front().ring() == Rf.get() ? x : to_f(x);
    const auto y = detail::mat_vec(to_f(zeta_W), detail::vmap(xf, [](const RamElem& e) { return e.conj(); }));
    return detail::vmap(y, [&](const RamElem& e) { return RamElem::from_base(delta) * e; });
  }
  RamElem h(const std::vector<RamElem>& x, const std::vector<RamElem>& y) const {
    const auto H = lift(h_gram, x);
    RamElem acc = x[0].zero_like();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc += x[i] * H(i, j) * y[j].conj();
    return acc;
  }
  /// <x, y> = X^T G Y on O-coordinates (a0, b0, a1, b1); value in Rf.
  GRElem pair(const std::vector<RamElem>& x, const std::vector<RamElem>& y) const {
    const auto X = coords(x), Y = coords(y);
    GRElem acc = Rf->zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) acc += X[i] * pairing(i, j) * Y[j];
    return acc;
  }
  std::vector<GRElem> coords(const std::vector<RamElem>& x) const {
    const auto xf = x.front().ring() == Rf.get() ? x : to_f(x);
    return {xf[0].a(), xf[0].b(), xf[1].a(), xf[1].b()};
  }

  // Lattice-level operators.
  Form<RamElem> sharp_form() const { return Form<RamElem>::make(h_gram, [](const RamElem& x) { return x.conj(); }); }
  RamLattice sharp(const RamLattice& L) const { return L.dual(sharp_form()); }
  RamLattice V(const RamLattice& L) const {
    return L.image(Vm, 0, [this](const RamElem& x) { return sig(x, -1); });
  }
  RamLattice tau(const RamLattice& L) const {
    return L.image(tau_mat, 0, [this](const RamElem& x) { return sig(x, 1); });
  }
  RamLattice base_change(const RamLattice& L) const { return detail::base_change(L, ctx.of_to_coeff); }
  RamLattice descend(const RamLattice& L) const {
    return detail::descend(L, ctx.of_to_coeff, RamElem::from_base(ctx.OF->one()));
  }

  /// The O-lattice of rank 4 underlying an O[Pi]-lattice, over Rf.
  Lattice<GRElem> as_O_lattice(const RamLattice& L) const {
    const int s = L.shift();
    const int so = s >= 0 ? (s + 1) / 2 : -((-s) / 2);  // ceil(s / 2)
    const int e = 2 * so - s;
    Mat<GRElem> g(4, 2 * L.rank(), Rf->one());
    for (int j = 0; j < L.rank(); ++j)
      for (int t = 0; t < 2; ++t) {
        const auto v = detail::vmap(L.basis().col(j), [&](const RamElem& x) { return to_f(x).mul_uniformizer(e + t); });
        const auto c = coords(v);
        for (int i = 0; i < 4; ++i) g(i, 2 * j + t) = c[i];
      }
    return Lattice<GRElem>::from_generators(g, so);
  }
  /// M^vee for the alternating pairing, as an O-lattice.
  Lattice<GRElem> pairing_dual(const RamLattice& L) const {
    return as_O_lattice(L).dual(Form<GRElem>::make(pairing, nullptr));
  }

 private:
  Mat<RamElem> lift(const Mat<RamElem>& m, const std::vector<RamElem>& like) const {
    return like.front().ring() == Rf.get() && Rf != R ? to_f(m) : m;
  }
};

inline RamFraming build_framing_ramified(const ArithmeticContext& ctx) {
  if (ctx.unramified()) fail(ErrorCode::NoFraming, "ramified framing needs a ramified context");
  RamFraming fd;
  fd.ctx = ctx;
  fd.R = ctx.coeff;
  fd.Rf = ctx.framing;
  fd.delta = ctx.delta;
  const RamElem one = RamElem::from_base(fd.R->one());
  const RamElem Pi = RamElem::pi_elem(fd.R.get());
  fd.Vm = Mat<RamElem>::identity(2, one).scaled(Pi);
  fd.Fm = fd.Vm;
  fd.h_gram = split_gram(one);
  fd.zeta_W = Mat<RamElem>(2, 2, one);
  fd.zeta_W(0, 0) = one;
  fd.zeta_W(1, 1) = -one;

  // tau = Pi V^{-1} = Pi sigma(Vm)^{-1} sigma
  const Mat<RamElem> sV = fd.Vm.map([&](const RamElem& x) { return fd.sig(x, 1); });
  const RamElem d = sV.det();
  const RamElem u = d.div_uniformizer(d.val()).inverse();
  fd.tau_mat = sV.adjugate().map([&](const RamElem& x) { return (x.mul_uniformizer(1) * u).div_uniformizer(d.val()); });

  // <Pi^i e_k, Pi^j e_l> = delta^{-1} * (Pi-coefficient of h(Pi^i e_k, Pi^j e_l))
  const GRElem dinv = fd.delta.inverse();
  const RamElem onef = RamElem::from_base(fd.Rf->one());
  fd.pairing = Mat<GRElem>(4, 4, fd.Rf->one());
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      std::vector<RamElem> x(2, onef.zero_like()), y(2, onef.zero_like());
      x[a / 2] = onef.mul_uniformizer(a % 2);
      y[b / 2] = onef.mul_uniformizer(b % 2);
      fd.pairing(a, b) = fd.h(x, y).b() * dinv;
    }
  return fd;
}

/// (a) Pi^2 M within V M within M with quotients of length 2; (b) M^sharp = M.
inline bool is_admissible(const RamFraming& fd, const RamLattice& M) {
  if (fd.sharp(M) != M) return false;
  const auto VM = fd.V(M);
  return M.contains(VM) && VM.contains(M.scaled(2)) && VM.volume() - M.volume() == 2;
}

struct RamClassification {
  bool tau_stable = false;
  RamLattice lambda;   // type 0 when tau-stable, else the type-2 descent of M + tau(M)
  RamLattice hull;     // M + tau(M)
  bool hull_tau_stable = false;
};

inline RamClassification classify_point(const RamFraming& fd, const RamLattice& M) {
  if (!is_admissible(fd, M)) fail(ErrorCode::NotAdmissible, M.to_string());
  RamClassification c;
  const auto tM = fd.tau(M);
  c.tau_stable = tM == M;
  c.hull = M + tM;
  c.hull_tau_stable = fd.tau(c.hull) == c.hull;
  if (!c.hull_tau_stable) fail(ErrorCode::NotTauStable, "M + tau(M) is not tau-stable for " + M.to_string());
  c.lambda = fd.descend(c.tau_stable ? M : c.hull);
  const VertexType want = c.tau_stable ? VertexType::Type0 : VertexType::Type2;
  if (vertex_type(c.lambda, build_C_ramified(fd.ctx)) != want)
    fail(ErrorCode::DescentObstruction, "descended lattice has the wrong type: " + c.lambda.to_string());
  return c;
}

/// map3.2: M = preimage of l in Lambda1 (x) O[Pi], Lambda1 of type 2; checks M^sharp = M.
inline RamLattice point_from_line(const RamFraming& fd, const RamLattice& lambda, const Line& l,
                                  LineMap variant = LineMap::Ramified) {
  const VertexType t = vertex_type(lambda, build_C_ramified(fd.ctx));
  if (variant != LineMap::Ramified || t != VertexType::Type2)
    fail(ErrorCode::WrongType, std::string(to_string(variant)) + " given a " + std::string(to_string(t)) + " lattice");
  const auto c = detail::lift_line(*fd.R, l);
  const auto Bc = lambda.basis().map([&](const RamElem& x) { return fd.ctx.of_to_coeff.apply(x); });
  const auto M = detail::line_preimage(Bc, lambda.shift(), {RamElem::from_base(c[0]), RamElem::from_base(c[1])});
  if (fd.sharp(M) != M) fail(ErrorCode::NotAdmissible, "preimage of the line is not self-dual");
  return M;
}

struct RamMpm {
  RamLattice minus, plus;
};

/// Type-2 Lambda: M^+ = Lambda, M^- = Pi Lambda.
inline RamMpm build_M_pm(const RamFraming& fd, const RamLattice& lambda) {
  if (vertex_type(lambda, build_C_ramified(fd.ctx)) != VertexType::Type2)
    fail(ErrorCode::WrongType, "M^+- needs a type-2 lattice");
  const auto L = fd.base_change(lambda);
  return {L.scaled(1), L};
}

/// iota(zeta) M within M, checked over the framing ring.
inline ShadowResult theorem_shadow_check(const RamFraming& fd, const RamLattice& M) {
  if (!is_admissible(fd, M)) fail(ErrorCode::NotAdmissible, M.to_string());
  ShadowResult r;
  const auto Mf = detail::base_change(M, fd.ctx.coeff_to_framing);
  const auto Z = fd.to_f(fd.zeta_W).scaled(RamElem::from_base(fd.delta));
  const auto zM = Mf.image(Z, 0, [](const RamElem& x) { return x.conj(); });
  if (!Mf.contains(zM)) {
    r.ok = false;
    r.failure = "iota(zeta) does not preserve " + M.to_string();
  }
  const auto VM = fd.V(M);
  r.special_lengths = {VM.volume() - M.volume(), 0};
  return r;
}

/// All admissible M with pi^c O^2 within M within pi^{-c} O^2 (Pi-adic box of size 2c).
inline std::vector<RamLattice> enumerate_admissible(const RamFraming& fd, int c, EnumerationStats* stats = nullptr) {
  if (c < 0) fail(ErrorCode::ConfigError, "box size must be non-negative");
  int64_t n = 0;
  const auto cands = detail::box_lattices(RamElem::from_base(fd.R->one()), *fd.R, 2 * c, &n, 0);
  std::vector<RamLattice> out;
  for (const auto& M : cands)
    if (is_admissible(fd, M)) out.push_back(M);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (stats) {
    stats->outer_lattices = n;
    stats->candidates = n;
  }
  return out;
}

// ===========================================================================
// Framing validation

namespace detail {
inline std::string vec_string(const std::vector<GRElem>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i].to_string();
  return s + "]";
}
inline std::string vec_string(const std::vector<RamElem>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i].to_string();
  return s + "]";
}
}  // namespace detail

/// Every framing identity on basis vectors and `samples` seeded random vectors.
inline std::vector<CheckResult> validate_framing(const UnrFraming& fd, int samples = 20, uint64_t seed = 1) {
  const auto& R = *fd.R;
  std::mt19937_64 rng(seed);
  const GRElem zero = R.zero(), one = R.one(), pi = R.from_int(fd.ctx.p);
  std::vector<std::vector<GRElem>> vs;
  for (int i = 0; i < 4; ++i) {
    std::vector<GRElem> e(4, zero);
    e[i] = one;
    vs.push_back(e);
  }
  for (int k = 0; k < samples; ++k) {
    std::vector<GRElem> v;
    for (int i = 0; i < 4; ++i) v.push_back(detail::random_elem(R, rng));
    vs.push_back(v);
  }
  auto scale = [](const GRElem& a, const std::vector<GRElem>& v) {
    return detail::vmap(v, [&](const GRElem& x) { return a * x; });
  };
  auto mv = [](const Mat<GRElem>& m, const std::vector<GRElem>& v) { return detail::mat_vec(m, v); };
  std::vector<CheckResult> out;

  CheckTally vf("V F = F V = pi", "framing.vf");
  CheckTally adj("<Fx, y> = <x, Vy>^sigma", "framing.frobenius_adjoint");
  CheckTally alt("pairing alternating", "framing.alternating");
  CheckTally ia("iota(delta)* = -iota(delta), iota(Pi)* = iota(Pi)", "framing.iota_adjoint");
  CheckTally ic("iota(Pi), iota(delta) commute with V and F", "framing.iota_commutes");
  CheckTally ir("iota(Pi)^2 = pi, iota(Pi) iota(delta) = -iota(delta) iota(Pi)", "framing.iota_relations");
  CheckTally hr("h = pi^{-1} delta^{-1} <x, F y> on N0", "framing.h_reconstruction");
  const Mat<GRElem> ind = fd.iota_delta.scaled(-one);
  for (const auto& x : vs) {
    const std::string w = detail::vec_string(x);
    vf.record(fd.V(fd.F(x)) == scale(pi, x) && fd.F(fd.V(x)) == scale(pi, x), w);
    alt.record(fd.pair(x, x).is_zero(), w);
    ir.record(mv(fd.iota_pi, mv(fd.iota_pi, x)) == scale(pi, x) &&
                  mv(fd.iota_pi, mv(fd.iota_delta, x)) == mv(ind, mv(fd.iota_pi, x)),
              w);
    ic.record(mv(fd.iota_pi, fd.V(x)) == fd.V(mv(fd.iota_pi, x)) && mv(fd.iota_pi, fd.F(x)) == fd.F(mv(fd.iota_pi, x)) &&
                  mv(fd.iota_delta, fd.V(x)) == fd.V(mv(fd.iota_delta, x)) &&
                  mv(fd.iota_delta, fd.F(x)) == fd.F(mv(fd.iota_delta, x)),
              w);
    for (const auto& y : vs) {
      const std::string wy = w + " " + detail::vec_string(y);
      adj.record(fd.pair(fd.F(x), y) == fd.sig(fd.pair(x, fd.V(y))), wy);
      alt.record(fd.pair(x, y) == -fd.pair(y, x), wy);
      ia.record(fd.pair(mv(fd.iota_delta, x), y) == fd.pair(x, mv(ind, y)) &&
                    fd.pair(mv(fd.iota_pi, x), y) == fd.pair(x, mv(fd.iota_pi, y)),
                wy);
      // pi^{-1} loses the top digit
      const std::vector<GRElem> x0{x[0], x[1]}, y0{y[0], y[1]};
      const GRElem direct = Form<GRElem>::make(fd.h_gram, [&](const GRElem& t) { return fd.sig(t); }).eval(x0, y0);
      hr.record((fd.h_from_pairing(x0, y0) - direct).val() >= R.prec() - 1, wy);
    }
  }
  const auto C = build_C_unramified(fd.ctx);
  hr.record(fd.h_gram == C.gram.map([&](const GRElem& t) { return fd.ctx.oe_to_coeff.apply(t); }), "h Gram differs from C");
  for (auto* t : {&vf, &adj, &alt, &ia, &ic, &ir, &hr}) out.push_back(t->result());

  auto zero_block = [](const Mat<GRElem>& m, int b) { return detail::block(m, b, b) == Mat<GRElem>(2, 2, m.proto()); };
  out.push_back(make_check("deg V = deg F = 1", "framing.grading",
                           zero_block(fd.Vm, 0) && zero_block(fd.Vm, 1) && zero_block(fd.Fm, 0) && zero_block(fd.Fm, 1),
                           "V or F has a degree-0 block"));
  out.push_back(make_check("N0, N1 maximal isotropic", "framing.isotropic",
                           zero_block(fd.pairing, 0) && zero_block(fd.pairing, 1) &&
                               detail::block(fd.pairing, 0, 1).det().is_unit(),
                           "pairing Gram " + fd.pairing.to_string()));
  // tau = pi V^{-2} fixes O_E^2 inside N0, so C has E-dimension 2
  bool fixed = true;
  std::string wt;
  for (int i = 0; i < 2; ++i)
    for (const GRElem& a : {fd.ctx.oe_to_coeff.apply(fd.ctx.OE->gen()), one}) {
      std::vector<GRElem> e{zero, zero};
      e[i] = a;
      const auto t = mv(fd.tau_mat, fd.sig(e, 2));
      if (t != e) {
        fixed = false;
        wt = detail::vec_string(e);
      }
      // and directly: pi V^{-2} e = e, i.e. V^2 e = pi e
      const auto v2 = fd.V(fd.V({e[0], e[1], zero, zero}));
      if (v2 != std::vector<GRElem>{pi * e[0], pi * e[1], zero, zero}) {
        fixed = false;
        wt = "V^2 " + detail::vec_string(e);
      }
    }
  out.push_back(make_check("tau fixes O_E^2, rank 2", "framing.tau_fixed", fixed, wt));
  return out;
}

inline std::vector<CheckResult> validate_framing(const RamFraming& fd, int samples = 20, uint64_t seed = 1) {
  const auto& R = *fd.R;
  std::mt19937_64 rng(seed);
  const RamElem zero = RamElem::from_base(R.zero()), one = RamElem::from_base(R.one());
  const RamElem Pi = RamElem::pi_elem(&R), pi = Pi * Pi;
  std::vector<std::vector<RamElem>> vs;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      std::vector<RamElem> e(2, zero);
      e[i] = one.mul_uniformizer(k);
      vs.push_back(e);
    }
  for (int k = 0; k < samples; ++k) {
    std::vector<RamElem> v;
    for (int i = 0; i < 2; ++i) v.emplace_back(detail::random_elem(R, rng), detail::random_elem(R, rng));
    vs.push_back(v);
  }
  auto scale = [](const RamElem& a, const std::vector<RamElem>& v) {
    return detail::vmap(v, [&](const RamElem& x) { return a * x; });
  };
  const RamElem u = RamElem::from_base(fd.ctx.of_to_framing.apply(fd.ctx.nonnorm));
  const RamElem Pif = fd.to_f(Pi), delta = RamElem::from_base(fd.delta);
  auto sigf = [&](const GRElem& x) { return x.frob(fd.ctx.f); };

  CheckTally vf("V F = F V = pi", "framing.vf");
  CheckTally alt("pairing alternating", "framing.alternating");
  CheckTally pia("Pi* = -Pi", "framing.iota_adjoint");
  CheckTally adj("<Fx, y> = <x, Vy>^sigma", "framing.frobenius_adjoint");
  CheckTally hf("h(Fx, y) = -h(x, Vy)^sigma", "framing.h_frobenius");
  CheckTally ht("h(tau x, tau y) = h(x, y)^sigma", "framing.h_tau");
  CheckTally hr("h = delta (<Pi x, y> + Pi <x, y>)", "framing.h_reconstruction");
  CheckTally zr("iota(zeta)^2 = u, iota(zeta) Pi = -Pi iota(zeta)", "framing.iota_relations");
  CheckTally zc("iota(zeta) commutes with V and F", "framing.iota_commutes");
  CheckTally za("iota(zeta)* = iota(zeta)", "framing.zeta_adjoint");
  for (const auto& x : vs) {
    const std::string w = detail::vec_string(x);
    const auto xf = fd.to_f(x);
    vf.record(fd.V(fd.F(x)) == scale(pi, x) && fd.F(fd.V(x)) == scale(pi, x), w);
    alt.record(fd.pair(x, x).is_zero(), w);
    zr.record(fd.zeta(fd.zeta(x)) == scale(u, xf) && fd.zeta(scale(Pi, x)) == scale(-Pif, fd.zeta(x)), w);
    zc.record(fd.zeta(fd.V(x)) == fd.V(fd.zeta(x)) && fd.zeta(fd.F(x)) == fd.F(fd.zeta(x)), w);
    for (const auto& y : vs) {
      const std::string wy = w + " " + detail::vec_string(y);
      alt.record(fd.pair(x, y) == -fd.pair(y, x), wy);
      pia.record(fd.pair(scale(Pi, x), y) == -fd.pair(x, scale(Pi, y)), wy);
      adj.record(fd.pair(fd.F(x), y) == sigf(fd.pair(x, fd.V(y))), wy);
      hf.record(fd.h(fd.F(x), y) == -fd.sig(fd.h(x, fd.V(y))), wy);
      ht.record(fd.h(fd.tau(x), fd.tau(y)) == fd.sig(fd.h(x, y)), wy);
      const RamElem rec = delta * (RamElem::from_base(fd.pair(scale(Pi, x), y)) + Pif * RamElem::from_base(fd.pair(x, y)));
      hr.record(rec == fd.to_f(fd.h(x, y)), wy);
      za.record(fd.pair(fd.zeta(x), y) == fd.pair(x, fd.zeta(y)), wy);
    }
  }
  const auto C = build_C_ramified(fd.ctx);
  hr.record(fd.h_gram == C.gram.map([&](const RamElem& t) { return fd.ctx.of_to_coeff.apply(t); }), "h Gram differs from C");
  std::vector<CheckResult> out;
  for (auto* t : {&vf, &alt, &pia, &adj, &hf, &ht, &hr, &zr, &zc, &za}) out.push_back(t->result());

  bool fixed = true;
  std::string wt;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      std::vector<RamElem> e(2, zero);
      e[i] = one.mul_uniformizer(k);
      if (fd.tau(e) != e) {
        fixed = false;
        wt = detail::vec_string(e);
      }
    }
  out.push_back(make_check("tau fixes O_E^2, rank 2", "framing.tau_fixed", fixed, wt));

  // M^vee = M^sharp on a few lattices
  CheckTally dv("M^vee = M^sharp", "framing.dual_agree");
  std::vector<RamLattice> Ls{RamLattice::standard(2, one), RamLattice::diagonal({1, 0}, one),
                             RamLattice::diagonal({-1, 2}, one)};
  for (int k = 0; k < 3; ++k) {
    Mat<RamElem> g(2, 2, one);
    g(0, 0) = one.mul_uniformizer(k);
    g(0, 1) = RamElem(detail::random_elem(R, rng), detail::random_elem(R, rng));
    g(1, 1) = one.mul_uniformizer(2 - k);
    Ls.push_back(RamLattice::from_generators(g, 1));
  }
  for (const auto& L : Ls) dv.record(fd.as_O_lattice(fd.sharp(L)) == fd.pairing_dual(L), L.to_string());
  out.push_back(dv.result());
  return out;
}

}  // namespace dhp
