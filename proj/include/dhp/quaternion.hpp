#pragma once

// The quaternion division algebra B = E + E*j over F, with j*alpha = conj(alpha)*j.
// Unramified E: j = Pi, j^2 = pi. Ramified E = F(Pi): j = zeta, j^2 = u a unit
// that is not a norm from E.

#include <array>
#include <memory>
#include <random>
#include <string>

#include "dhp/local_arith.hpp"

namespace dhp {

/// Fixed data of B for one context. `E` is GRElem (unramified O_E) or RamElem.
template <class E>
struct QuatAlgebra {
  Case kind = Case::Unramified;
  int f = 1;
  E j2;        // j^2
  E pi_e;      // the uniformizer Pi of E (ramified only)
  E delta;     // delta in O_E (unramified only)
  E zero, one;

  E conj(const E& x) const {
    if constexpr (std::is_same_v<E, RamElem>) {
      return x.conj();
    } else {
      return x.frob(f);
    }
  }
  /// pi-adic valuation of an element of F (as embedded in E), in pi units.
  int f_val(const E& x) const {
    if constexpr (std::is_same_v<E, RamElem>) {
      return x.val() / 2;
    } else {
      return x.val();
    }
  }
};

inline std::shared_ptr<const QuatAlgebra<GRElem>> make_quat_algebra_unramified(const ArithmeticContext& ctx) {
  if (!ctx.unramified()) fail(ErrorCode::LevelMismatch, "context is ramified");
  auto alg = std::make_shared<QuatAlgebra<GRElem>>();
  alg->kind = Case::Unramified;
  alg->f = ctx.f;
  alg->zero = ctx.OE->zero();
  alg->one = ctx.OE->one();
  alg->j2 = ctx.OE->from_int(ctx.p);
  alg->delta = ctx.delta;
  return alg;
}

inline std::shared_ptr<const QuatAlgebra<RamElem>> make_quat_algebra_ramified(const ArithmeticContext& ctx) {
  if (ctx.unramified()) fail(ErrorCode::LevelMismatch, "context is unramified");
  auto alg = std::make_shared<QuatAlgebra<RamElem>>();
  alg->kind = Case::Ramified;
  alg->f = ctx.f;
  alg->zero = RamElem::from_base(ctx.OF->zero());
  alg->one = RamElem::from_base(ctx.OF->one());
  alg->j2 = RamElem::from_base(ctx.nonnorm);
  alg->pi_e = RamElem::pi_elem(ctx.OF.get());
  return alg;
}

/// a + b*j
template <class E>
class Quat {
 public:
  Quat() = default;
  Quat(const QuatAlgebra<E>* alg, E a, E b) : alg_(alg), a_(std::move(a)), b_(std::move(b)) {}

  static Quat scalar(const QuatAlgebra<E>* alg, const E& a) { return {alg, a, alg->zero}; }
  static Quat j(const QuatAlgebra<E>* alg) { return {alg, alg->zero, alg->one}; }
  /// The uniformizer Pi of B: j when E/F is unramified, Pi in E otherwise.
  static Quat uniformizer(const QuatAlgebra<E>* alg) {
    return alg->kind == Case::Unramified ? j(alg) : scalar(alg, alg->pi_e);
  }
  static Quat zero(const QuatAlgebra<E>* alg) { return {alg, alg->zero, alg->zero}; }
  static Quat one(const QuatAlgebra<E>* alg) { return {alg, alg->one, alg->zero}; }

  const QuatAlgebra<E>* alg() const { return alg_; }
  const E& a() const { return a_; }
  const E& b() const { return b_; }

  Quat operator+(const Quat& o) const { return {alg_, a_ + o.a_, b_ + o.b_}; }
  Quat operator-(const Quat& o) const { return {alg_, a_ - o.a_, b_ - o.b_}; }
  Quat operator-() const { return {alg_, -a_, -b_}; }
  /// (a+bj)(c+dj) = (ac + b conj(d) j^2) + (ad + b conj(c)) j
  Quat operator*(const Quat& o) const {
    return {alg_, a_ * o.a_ + b_ * alg_->conj(o.b_) * alg_->j2, a_ * o.b_ + b_ * alg_->conj(o.a_)};
  }
  bool operator==(const Quat& o) const { return a_ == o.a_ && b_ == o.b_; }

  /// x' = conj(a) - b j
  Quat main_involution() const { return {alg_, alg_->conj(a_), -b_}; }
  /// Pi x Pi^{-1}
  Quat conj_by_uniformizer() const {
    if (alg_->kind == Case::Unramified) return {alg_, alg_->conj(a_), alg_->conj(b_)};
    return {alg_, a_, -b_};
  }
  /// x* = Pi x' Pi^{-1}
  Quat star() const { return main_involution().conj_by_uniformizer(); }
  /// Reduced norm, an element of F embedded in E.
  E nrd() const { return a_ * alg_->conj(a_) - alg_->j2 * b_ * alg_->conj(b_); }
  E trd() const { return a_ + alg_->conj(a_); }

  /// Pi^k x (k >= 0)
  Quat mul_uniformizer_left(int k) const {
    Quat r = *this;
    const Quat u = uniformizer(alg_);
    for (int i = 0; i < k; ++i) r = u * r;
    return r;
  }
  /// Pi^k x Pi^{-k}
  Quat conj_by_uniformizer(int k) const {
    Quat r = *this;
    const int kk = ((k % 2) + 2) % 2;
    for (int i = 0; i < kk; ++i) r = r.conj_by_uniformizer();
    return r;
  }

  std::string to_string() const { return "<" + a_.to_string() + " + " + b_.to_string() + " j>"; }

 private:
  const QuatAlgebra<E>* alg_ = nullptr;
  E a_, b_;
};

/// Pi^{-shift} * x. Never normalized: equality clears denominators.
template <class E>
struct FracQuat {
  Quat<E> x;
  int shift = 0;

  static FracQuat of(const Quat<E>& q) { return {q, 0}; }

  /// Same element rewritten with a larger shift.
  FracQuat raised_to(int s) const { return {x.mul_uniformizer_left(s - shift), s}; }

  FracQuat operator+(const FracQuat& o) const {
    const int s = std::max(shift, o.shift);
    return {raised_to(s).x + o.raised_to(s).x, s};
  }
  FracQuat operator-(const FracQuat& o) const {
    const int s = std::max(shift, o.shift);
    return {raised_to(s).x - o.raised_to(s).x, s};
  }
  FracQuat operator-() const { return {-x, shift}; }
  /// Pi^{-k} x Pi^{-l} y = Pi^{-k-l} (Pi^l x Pi^{-l}) y
  FracQuat operator*(const FracQuat& o) const { return {x.conj_by_uniformizer(o.shift) * o.x, shift + o.shift}; }
  bool operator==(const FracQuat& o) const {
    const int s = std::max(shift, o.shift);
    return raised_to(s).x == o.raised_to(s).x;
  }

  /// (Pi^{-k} x)' = x' (-Pi)^{-k} = (-1)^k Pi^{-k} (Pi^k x' Pi^{-k})
  FracQuat main_involution() const {
    Quat<E> y = x.main_involution().conj_by_uniformizer(shift);
    return {(shift % 2 != 0) ? -y : y, shift};
  }
  FracQuat star() const {
    FracQuat m = main_involution();
    return {m.x.conj_by_uniformizer(), m.shift};
  }

  /// val(nrd x) in pi units, so that w(x) = nrd_val()/2.
  int nrd_val() const {
    const E n = x.nrd();
    if (n.is_zero()) fail(ErrorCode::PrecisionExhausted, "reduced norm vanishes at working precision");
    return x.alg()->f_val(n) - shift;
  }

  /// (Pi^{-k} x)^{-1} = Pi^{-2v} (x' u^{-1}) Pi^k where nrd(x) = pi^v u
  FracQuat inverse() const {
    const E n = x.nrd();
    if (n.is_zero()) fail(ErrorCode::NotAUnit, "zero divisor at working precision");
    const int v = x.alg()->f_val(n);
    const E unit = n.div_uniformizer(std::is_same_v<E, RamElem> ? 2 * v : v);
    const FracQuat xinv{x.main_involution() * Quat<E>::scalar(x.alg(), unit.inverse()), 2 * v};
    if (shift <= 0) return xinv * FracQuat{Quat<E>::one(x.alg()), shift};
    return xinv * FracQuat::of(Quat<E>::one(x.alg()).mul_uniformizer_left(shift));
  }

  bool in_order() const { return nrd_val() >= 0; }
  std::string to_string() const { return "Pi^-" + std::to_string(shift) + "*" + x.to_string(); }
};

template <class E>
using QuatMatrix = std::array<std::array<FracQuat<E>, 2>, 2>;

template <class E>
QuatMatrix<E> qm_mul(const QuatMatrix<E>& a, const QuatMatrix<E>& b) {
  QuatMatrix<E> r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

template <class E>
bool qm_equal(const QuatMatrix<E>& a, const QuatMatrix<E>& b) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!(a[i][j] == b[i][j])) return false;
  return true;
}

/// beta^vee = transpose of the entrywise main involution
template <class E>
QuatMatrix<E> qm_adjoint(const QuatMatrix<E>& a) {
  QuatMatrix<E> r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[j][i].main_involution();
  return r;
}

template <class E>
QuatMatrix<E> qm_diag(const FracQuat<E>& x, const FracQuat<E>& y) {
  const auto z = FracQuat<E>::of(Quat<E>::zero(x.x.alg()));
  return {{{x, z}, {z, y}}};
}

template <class E>
QuatMatrix<E> qm_antidiag(const FracQuat<E>& x, const FracQuat<E>& y) {
  const auto z = FracQuat<E>::of(Quat<E>::zero(x.x.alg()));
  return {{{z, x}, {y, z}}};
}

template <class E>
QuatMatrix<E> qm_identity(const QuatAlgebra<E>* alg) {
  const auto o = FracQuat<E>::of(Quat<E>::one(alg));
  return qm_diag(o, o);
}

template <class E>
struct Polarizations {
  QuatMatrix<E> lambda0, lambda;
};

/// lambda0 = antidiag(1,1); lambda = antidiag(-Pi delta, Pi delta) (unramified) or lambda0.
template <class E>
Polarizations<E> polarization_matrices(const QuatAlgebra<E>* alg) {
  const auto one = FracQuat<E>::of(Quat<E>::one(alg));
  Polarizations<E> pol;
  pol.lambda0 = qm_antidiag(one, one);
  if (alg->kind == Case::Unramified) {
    const auto pd = FracQuat<E>::of(Quat<E>::uniformizer(alg) * Quat<E>::scalar(alg, alg->delta));
    pol.lambda = qm_antidiag(-pd, pd);
  } else {
    pol.lambda = pol.lambda0;
  }
  return pol;
}

/// iota(b) = diag(b, Pi b Pi^{-1})
template <class E>
QuatMatrix<E> iota(const FracQuat<E>& b) {
  return qm_diag(b, FracQuat<E>{b.x.conj_by_uniformizer(), b.shift});
}

template <class E>
QuatMatrix<E> qm_inverse_antidiag(const QuatMatrix<E>& a) {
  // antidiag(x, y)^{-1} = antidiag(y^{-1}, x^{-1})
  return qm_antidiag(a[1][0].inverse(), a[0][1].inverse());
}

/// (lambda0)^{-1} iota(b)^vee lambda0 == iota(b*)
template <class E>
bool rosati_check(const FracQuat<E>& b) {
  const auto pol = polarization_matrices(b.x.alg());
  const auto lhs = qm_mul(qm_mul(qm_inverse_antidiag(pol.lambda0), qm_adjoint(iota(b))), pol.lambda0);
  return qm_equal(lhs, iota(b.star()));
}

/// lambda^{-1} [Pi]^vee lambda == [Pi]
template <class E>
bool pila_check(const QuatAlgebra<E>* alg) {
  const auto pol = polarization_matrices(alg);
  const auto pi = iota(FracQuat<E>::of(Quat<E>::uniformizer(alg)));
  const auto lhs = qm_mul(qm_mul(qm_inverse_antidiag(pol.lambda), qm_adjoint(pi)), pol.lambda);
  return qm_equal(lhs, pi);
}

/// transpose(lambda') == lambda
template <class E>
bool adjoint_symmetric(const QuatMatrix<E>& lam) {
  return qm_equal(qm_adjoint(lam), lam);
}

// ---------------------------------------------------------------------------
// SL2(F) and the exceptional isomorphism

/// pi^{-shift} * x with x in O_F.
struct FracF {
  GRElem x;
  int shift = 0;

  FracF raised_to(int s) const { return {x.mul_uniformizer(s - shift), s}; }
  FracF operator+(const FracF& o) const {
    const int s = std::max(shift, o.shift);
    return {raised_to(s).x + o.raised_to(s).x, s};
  }
  FracF operator-(const FracF& o) const {
    const int s = std::max(shift, o.shift);
    return {raised_to(s).x - o.raised_to(s).x, s};
  }
  FracF operator*(const FracF& o) const { return {x * o.x, shift + o.shift}; }
  bool operator==(const FracF& o) const {
    const int s = std::max(shift, o.shift);
    return raised_to(s).x == o.raised_to(s).x;
  }
};

using MatF = std::array<std::array<FracF, 2>, 2>;

inline MatF matf_mul(const MatF& a, const MatF& b) {
  MatF r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline FracF matf_det(const MatF& g) { return g[0][0] * g[1][1] - g[0][1] * g[1][0]; }

namespace detail {
inline GRElem f_to_e(const ArithmeticContext& ctx, const GRElem& x) { return ctx.of_to_oe.apply(x); }
}  // namespace detail

/// F-element pi^{-s} x as the quaternion Pi^{-2s} x.
template <class E>
FracQuat<E> frac_f_to_quat(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg, const FracF& v) {
  if constexpr (std::is_same_v<E, RamElem>) {
    return {Quat<E>::scalar(alg, RamElem::from_base(v.x)), 2 * v.shift};
  } else {
    return {Quat<E>::scalar(alg, detail::f_to_e(ctx, v.x)), 2 * v.shift};
  }
}

/// g = ((a,b),(c,d)) in SL2(F) -> ((a, b Pi), (Pi^{-1} c, d))
template <class E>
QuatMatrix<E> exceptional_iso(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg, const MatF& g) {
  const FracF one{ctx.OF->one(), 0};
  if (!(matf_det(g) == one)) fail(ErrorCode::NotUnimodular, "det(g) != 1");
  const auto pi = FracQuat<E>::of(Quat<E>::uniformizer(alg));
  const FracQuat<E> pi_inv{Quat<E>::one(alg), 1};
  QuatMatrix<E> r;
  r[0][0] = frac_f_to_quat(ctx, alg, g[0][0]);
  r[0][1] = frac_f_to_quat(ctx, alg, g[0][1]) * pi;
  r[1][0] = pi_inv * frac_f_to_quat(ctx, alg, g[1][0]);
  r[1][1] = frac_f_to_quat(ctx, alg, g[1][1]);
  return r;
}

/// The O_E generators used to test commutation with iota(O_E).
template <class E>
std::vector<Quat<E>> oe_generators(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg) {
  std::vector<Quat<E>> out{Quat<E>::one(alg)};
  if constexpr (std::is_same_v<E, RamElem>) {
    out.push_back(Quat<E>::scalar(alg, alg->pi_e));
    if (ctx.f > 1) out.push_back(Quat<E>::scalar(alg, RamElem::from_base(ctx.OF->gen())));
  } else {
    out.push_back(Quat<E>::scalar(alg, ctx.OE->gen()));
    out.push_back(Quat<E>::scalar(alg, alg->delta));
  }
  return out;
}

/// h^vee lambda h == lambda and h commutes with iota(O_E).
template <class E>
bool su_check(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg, const QuatMatrix<E>& h) {
  const auto pol = polarization_matrices(alg);
  if (!qm_equal(qm_mul(qm_mul(qm_adjoint(h), pol.lambda), h), pol.lambda)) return false;
  for (const auto& g : oe_generators(ctx, alg)) {
    const auto ig = iota(FracQuat<E>::of(g));
    if (!qm_equal(qm_mul(h, ig), qm_mul(ig, h))) return false;
  }
  return true;
}

/// A pseudorandom element of SL2(F): a product of unipotent, torus and
/// diagonal unit factors with small pi-denominators.
inline MatF sample_sl2(const ArithmeticContext& ctx, std::mt19937_64& rng) {
  const GaloisRing& R = *ctx.OF;
  std::uniform_int_distribution<int64_t> coef(0, R.modulus() - 1);
  std::uniform_int_distribution<int> small(0, 1);
  auto rand_elem = [&] {
    std::vector<int64_t> c(R.degree());
    for (auto& x : c) x = coef(rng);
    return R.from_coeffs(c);
  };
  auto rand_unit = [&] {
    for (;;) {
      GRElem u = rand_elem();
      if (u.is_unit()) return u;
    }
  };
  const FracF one{R.one(), 0}, zero{R.zero(), 0};
  MatF g{{{one, zero}, {zero, one}}};
  for (int step = 0; step < 3; ++step) {
    const FracF x{rand_elem(), small(rng)};
    const MatF upper{{{one, x}, {zero, one}}};
    const FracF y{rand_elem(), small(rng)};
    const MatF lower{{{one, zero}, {y, one}}};
    const GRElem u = rand_unit();
    const MatF diag{{{FracF{u, 0}, zero}, {zero, FracF{u.inverse(), 0}}}};
    g = matf_mul(matf_mul(matf_mul(g, upper), lower), diag);
  }
  if (small(rng) != 0) {
    const MatF torus{{{FracF{R.one().mul_uniformizer(1), 0}, zero}, {zero, FracF{R.one(), 1}}}};
    g = matf_mul(g, torus);
  }
  return g;
}

}  // namespace dhp
