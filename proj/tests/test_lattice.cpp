#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dhp/lattice.hpp"
#include "dhp/local_arith.hpp"

using namespace dhp;

namespace {

template <class Elem>
Mat<Elem> mat2(const Elem& a, const Elem& b, const Elem& c, const Elem& d) {
  Mat<Elem> m(2, 2, a);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

template <class Elem>
using VecSet = std::set<std::vector<Elem>, std::less<>>;

// All x*g1 + y*g2 with x, y over the listed scalars.
template <class Elem>
std::set<std::pair<std::string, std::string>> span_set(const std::vector<Elem>& scalars, const std::vector<Elem>& g1,
                                                       const std::vector<Elem>& g2) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& x : scalars)
    for (const auto& y : scalars) out.insert({(x * g1[0] + y * g2[0]).to_string(), (x * g1[1] + y * g2[1]).to_string()});
  return out;
}

template <class Elem>
void check_against_brute_force(const std::vector<Elem>& scalars, int trials, std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> pick(0, scalars.size() - 1);
  std::map<std::set<std::pair<std::string, std::string>>, std::string> seen;
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    Elem a = scalars[pick(rng)], b = scalars[pick(rng)], c = scalars[pick(rng)], d = scalars[pick(rng)];
    Lattice<Elem> L;
    try {
      L = Lattice<Elem>::from_generators(mat2(a, b, c, d), 0);
    } catch (const Error& e) {
      ASSERT_TRUE(e.code() == ErrorCode::PrecisionExhausted || e.code() == ErrorCode::RankDeficient);
      continue;
    }
    // the stored lattice is w^{-shift} span(basis); compare w^{shift} of generated set
    auto gen = span_set(scalars, std::vector<Elem>{a, c}, std::vector<Elem>{b, d});
    const Mat<Elem> B = L.generators_at(0);
    auto hnf = span_set(scalars, B.col(0), B.col(1));
    ASSERT_EQ(gen, hnf) << L.to_string();
    auto [it, fresh] = seen.emplace(gen, L.to_string());
    if (!fresh) ASSERT_EQ(it->second, L.to_string());
    ++ok;
  }
  EXPECT_GT(ok, trials / 10);
}

}  // namespace

TEST(Canonicalize, Examples) {
  auto R = GaloisRing::make(3, 2, 6);
  const auto pi = R->from_int(3), one = R->one(), zero = R->zero();
  const auto x = R->gen() + R->from_int(7);
  auto L = Lattice<GRElem>::from_generators(mat2(pi, x, zero, one), 0);
  EXPECT_EQ(L.pivots(), (std::vector<int>{1, 0}));
  EXPECT_EQ(L.basis()(0, 1), x.reduce(1));
  auto L2 = Lattice<GRElem>::from_generators(mat2(x, pi, one, zero), 0);
  EXPECT_EQ(L, L2);
  try {
    Lattice<GRElem>::from_generators(mat2(pi, pi, zero, zero), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(Canonicalize, BruteForceGalois) {
  std::mt19937_64 rng(1);
  auto R = GaloisRing::make(2, 1, 3);
  std::vector<GRElem> s;
  for (int i = 0; i < 8; ++i) s.push_back(R->from_int(i));
  check_against_brute_force(s, 400, rng);
  auto R2 = GaloisRing::make(2, 2, 2);
  std::vector<GRElem> s2;
  for (int i = 0; i < 16; ++i) s2.push_back(R2->from_coeffs(std::vector<int64_t>{i % 4, i / 4}));
  check_against_brute_force(s2, 300, rng);
}

TEST(Canonicalize, BruteForceRamified) {
  std::mt19937_64 rng(2);
  auto R = GaloisRing::make(3, 1, 2);
  std::vector<RamElem> s;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) s.emplace_back(R->from_int(a), R->from_int(b));
  check_against_brute_force(s, 200, rng);
}

TEST(Dual, Examples) {
  auto R = GaloisRing::make(3, 2, 6);
  const auto one = R->one(), zero = R->zero();
  auto split = Form<GRElem>::make(mat2(zero, one, one, zero), [](const GRElem& x) { return x.frob(1); });
  auto std2 = Lattice<GRElem>::standard(2, one);
  EXPECT_EQ(std2.dual(split), std2);
  auto lam = Lattice<GRElem>::diagonal({0, 1}, one);
  EXPECT_EQ(lam.dual(split), Lattice<GRElem>::diagonal({-1, 0}, one));
  EXPECT_EQ(lam.dual(split).dual(split), lam);
}

TEST(Combine, SumIntersectIndex) {
  std::mt19937_64 rng(4);
  auto R = GaloisRing::make(3, 2, 8);
  const auto one = R->one();
  std::uniform_int_distribution<int64_t> d(0, R->modulus() - 1);
  auto rnd = [&] { return R->from_coeffs(std::vector<int64_t>{d(rng), d(rng)}); };
  auto form = Form<GRElem>::make(mat2(R->zero(), one, one, R->zero()), [](const GRElem& x) { return x.frob(1); });
  auto rand_lattice = [&] {
    for (;;) {
      Mat<GRElem> g(2, 2, one);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g(i, j) = rnd();
      if (g.det().val() > 2) continue;
      return Lattice<GRElem>::from_generators(g, static_cast<int>(rng() % 2));
    }
  };
  for (int it = 0; it < 200; ++it) {
    auto L = rand_lattice(), M = rand_lattice();
    EXPECT_EQ(L + L, L);
    EXPECT_EQ((L + M).dual(form), L.dual(form).intersect(M.dual(form)));
    auto S = L + M, I = L.intersect(M);
    EXPECT_TRUE(S.contains(L));
    EXPECT_TRUE(L.contains(I));
    // chain I <= L <= S
    EXPECT_EQ(I.index_in(S), I.index_in(L) + L.index_in(S));
    // dual reverses inclusions with equal index
    EXPECT_TRUE(L.dual(form).contains(S.dual(form)));
    EXPECT_EQ(S.dual(form).index_in(L.dual(form)), L.index_in(S));
    // volume from the generator determinant
    Mat<GRElem> g = L.generators_at(L.shift());
    EXPECT_EQ(L.volume(), g.det().val() - 2 * L.shift());
  }
  auto L = Lattice<GRElem>::diagonal({0, 1}, one), M = Lattice<GRElem>::diagonal({1, 0}, one);
  try {
    L.index_in(M);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNested);
  }
}
