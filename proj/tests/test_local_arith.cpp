#include <gtest/gtest.h>

#include <random>

#include "dhp/local_arith.hpp"

using namespace dhp;

namespace {

// Schoolbook product in (Z/p^N)[x]/(Phi) with 128-bit accumulation; kept
// independent of GaloisRing::mul.
std::vector<int64_t> oracle_mul(const GaloisRing& R, const GRElem& a, const GRElem& b) {
  const int d = R.degree();
  const __int128 m = R.modulus();
  std::vector<__int128> acc(2 * d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) acc[i + j] += static_cast<__int128>(a.coeff(i)) * b.coeff(j);
  const auto& phi = R.defining_poly();
  for (int k = 2 * d - 2; k >= d; --k) {
    __int128 t = acc[k] % m;
    for (int i = 0; i < d; ++i) acc[k - d + i] -= t * phi[i];
    acc[k] = 0;
  }
  std::vector<int64_t> out(d);
  for (int i = 0; i < d; ++i) out[i] = static_cast<int64_t>(((acc[i] % m) + m) % m);
  return out;
}

GRElem random_elem(const GaloisRing& R, std::mt19937_64& rng) {
  std::uniform_int_distribution<int64_t> dist(0, R.modulus() - 1);
  std::vector<int64_t> c(R.degree());
  for (auto& x : c) x = dist(rng);
  return R.from_coeffs(c);
}

}  // namespace

TEST(Context, ThreeUnramifiedUsesMinusOne) {
  auto ctx = make_context(3, 1, Case::Unramified, 1, 4);
  EXPECT_EQ(ctx.q, 3);
  EXPECT_EQ(ctx.delta_sq, ctx.OF->from_int(-1));
  EXPECT_EQ(ctx.delta * ctx.delta, ctx.of_to_oe.apply(ctx.OF->from_int(-1)));
}

TEST(Context, Errors) {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;
  };
  EXPECT_EQ(code_of([] { make_context(2, 1, Case::Ramified, 1, 4); }), ErrorCode::RamifiedP2);
  EXPECT_EQ(code_of([] { make_context(4, 1, Case::Unramified, 1, 4); }), ErrorCode::NotPrime);
  ContextOptions o;
  o.delta_sq = std::vector<int64_t>{4};
  EXPECT_EQ(code_of([&] { make_context(5, 1, Case::Unramified, 1, 4, o); }), ErrorCode::BadGenerator);
  o.delta_sq = std::vector<int64_t>{2};
  EXPECT_NO_THROW(make_context(5, 1, Case::Unramified, 1, 4, o));
}

TEST(RingOps, Examples) {
  auto R = GaloisRing::make(3, 1, 4);
  auto pi = R->from_int(3);
  EXPECT_EQ((R->one() + pi) * (R->one() - pi), R->from_int(-8));
  EXPECT_EQ(R->from_int(-8).coeff(0), 73);
  auto u = R->from_int(5);
  EXPECT_EQ((pi * pi * u).val(), 2);
  try {
    pi.inverse();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAUnit);
  }
  auto S = GaloisRing::make(3, 2, 4);
  try {
    (void)(R->one() + S->one());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LevelMismatch);
  }
}

TEST(RingOps, MatchesOracleAndAxioms) {
  std::mt19937_64 rng(7);
  for (auto [p, d, n] : {std::tuple{2, 3, 8}, {3, 2, 6}, {5, 4, 4}, {2, 8, 6}, {7, 1, 5}}) {
    auto R = GaloisRing::make(p, d, n);
    for (int it = 0; it < 200; ++it) {
      auto a = random_elem(*R, rng), b = random_elem(*R, rng), c = random_elem(*R, rng);
      auto ab = a * b;
      auto ref = oracle_mul(*R, a, b);
      for (int i = 0; i < d; ++i) ASSERT_EQ(ab.coeff(i), ref[i]);
      EXPECT_EQ((a * b) * c, a * (b * c));
      EXPECT_EQ(a * (b + c), a * b + a * c);
      EXPECT_EQ(ab, b * a);
      if (a.is_unit()) EXPECT_EQ(a * a.inverse(), R->one());
      if (!a.is_zero() && !b.is_zero() && a.val() + b.val() < n) EXPECT_EQ(ab.val(), a.val() + b.val());
    }
  }
}

TEST(Frobenius, LiftsPthPowerAndHasFullOrder) {
  std::mt19937_64 rng(11);
  for (auto [p, d] : {std::pair{2, 4}, {3, 2}, {5, 3}, {2, 6}}) {
    auto R = GaloisRing::make(p, d, 6);
    for (int it = 0; it < 50; ++it) {
      auto a = random_elem(*R, rng), b = random_elem(*R, rng);
      EXPECT_EQ((a.frob(1) - a.pow(p)).val() >= 1, true);
      EXPECT_EQ(a.frob(d), a);
      EXPECT_EQ(a.frob(1).frob(-1), a);
      EXPECT_EQ((a * b).frob(1), a.frob(1) * b.frob(1));
      EXPECT_EQ((a + b).frob(2), a.frob(2) + b.frob(2));
    }
    // Teichmueller lift of the generator: omega^(p^d) = omega, sigma(omega) = omega^p
    GRElem w = R->gen();
    for (int i = 0; i < 8; ++i) w = w.pow(R->residue_size());
    EXPECT_EQ(w.frob(1), w.pow(p));
    // sigma is not the identity before order d
    for (int k = 1; k < d; ++k) EXPECT_NE(w.frob(k), w);
  }
}

TEST(Galois, ConjugationAndRelativeFrobenius) {
  for (int p : {2, 3, 5}) {
    auto ctx = make_context(p, 2, Case::Unramified, 2, 6);
    EXPECT_EQ(galois_frobenius(ctx, ctx.delta, GaloisAction::ConjE), -ctx.delta);
    auto a = ctx.of_to_oe.apply(ctx.OF->gen() + ctx.OF->from_int(p));
    EXPECT_EQ(galois_frobenius(ctx, a, GaloisAction::ConjE), a);
    auto [tr, nm] = trace_norm(ctx, ctx.delta);
    EXPECT_TRUE(tr.is_zero());
    EXPECT_EQ(nm, -ctx.delta_sq);
    // relative sigma has order 2fm/f = 2m on the coefficient ring
    auto x = ctx.coeff->gen();
    GRElem y = x;
    int order = 0;
    do {
      y = galois_frobenius(ctx, y, GaloisAction::Sigma);
      ++order;
    } while (y != x);
    EXPECT_EQ(order, 2 * ctx.m);
  }
}

TEST(Galois, RamifiedPi) {
  auto ctx = make_context(3, 1, Case::Ramified, 1, 4);
  auto Pi = RamElem::pi_elem(ctx.OF.get());
  EXPECT_EQ(galois_frobenius(ctx, Pi, GaloisAction::ConjE), -Pi);
  auto [tr, nm] = trace_norm(ctx, Pi);
  EXPECT_TRUE(tr.is_zero());
  EXPECT_EQ(nm, ctx.OF->from_int(-3));
  EXPECT_EQ(Pi.val(), 1);
  EXPECT_EQ((Pi * Pi).val(), 2);
  EXPECT_EQ(Pi * Pi, RamElem::from_base(ctx.OF->from_int(3)));
  // inverse different: Tr(Pi^{-1} x) = Tr(Pi x) / pi is integral on O_E, Tr(pi^{-1} x) is not
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      RamElem x(ctx.OF->from_int(a), ctx.OF->from_int(b));
      EXPECT_EQ((x * Pi).trace().div_uniformizer(1), ctx.OF->from_int(2 * b));
      EXPECT_EQ(x.trace().val() >= 1, a % 3 == 0);
    }
  // delta in the framing ring: delta^2 = u, sigma(delta) = -delta
  EXPECT_EQ(ctx.delta * ctx.delta, ctx.of_to_framing.apply(ctx.nonnorm));
  EXPECT_EQ(ctx.delta.frob(ctx.f), -ctx.delta);
}

TEST(Embedding, PreimageRoundTrip) {
  auto A = GaloisRing::make(3, 2, 5);
  auto B = GaloisRing::make(3, 6, 5);
  Embedding e(A, B);
  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    auto a = random_elem(*A, rng), b = random_elem(*A, rng);
    EXPECT_EQ(e.apply(a * b), e.apply(a) * e.apply(b));
    EXPECT_EQ(e.apply(a.frob(1)), e.apply(a).frob(1));
    auto pre = e.preimage(e.apply(a), 5);
    ASSERT_TRUE(pre);
    EXPECT_EQ(*pre, a);
  }
  EXPECT_FALSE(e.preimage(B->gen(), 1));
}

TEST(Context, SecondGeneratorChoiceDiffers) {
  ContextOptions o;
  o.generator_choice = 1;
  auto c0 = make_context(5, 1, Case::Unramified, 1, 4);
  auto c1 = make_context(5, 1, Case::Unramified, 1, 4, o);
  EXPECT_NE(c0.delta_sq, c1.delta_sq);
  auto r1 = make_context(3, 1, Case::Ramified, 1, 4, o);
  EXPECT_NE(r1.nonnorm, make_context(3, 1, Case::Ramified, 1, 4).nonnorm);
}
