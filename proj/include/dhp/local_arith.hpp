#pragma once

// Exact arithmetic in truncated unramified and ramified local rings.
//
// An unramified ring of integers of degree d over Z_p is realized as the
// Galois ring GR(p^N, d) = (Z/p^N)[x]/(Phi(x)), with Phi a fixed lift of the
// lexicographically first monic irreducible polynomial of degree d over F_p.
// Ramified elements a + b*Pi (Pi^2 = p) are pairs over such a ring.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dhp/errors.hpp"

namespace dhp {

inline constexpr int kMaxDegree = 8;

namespace detail {

inline bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

inline int64_t mod(int64_t a, int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

inline int64_t inv_mod(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1 != 0) {
    int64_t t = g / a1;
    g -= t * a1;
    std::swap(g, a1);
    x -= t * x1;
    std::swap(x, x1);
  }
  if (g != 1) fail(ErrorCode::NotAUnit, "integer " + std::to_string(a) + " not invertible");
  return mod(x, m);
}

// Dense polynomials over F_p, lowest coefficient first, no trailing zeros.
using Poly = std::vector<int64_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& m, int64_t p) {
  trim(a);
  const int64_t lead_inv = inv_mod(m.back(), p);
  while (a.size() >= m.size()) {
    const int64_t t = a.back() * lead_inv % p;
    const size_t off = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) a[off + i] = mod(a[off + i] - t * m[i], p);
    trim(a);
  }
  return a;
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, int64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod(std::move(r), m, p);
}

inline Poly poly_gcd(Poly a, Poly b, int64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// x^(p^k) mod m, by k repeated p-th powers.
inline Poly frobenius_power_of_x(const Poly& m, int64_t p, int k) {
  Poly r = poly_mod(Poly{0, 1}, m, p);
  for (int i = 0; i < k; ++i) {
    Poly base = r, acc{1};
    for (int64_t e = p; e > 0; e >>= 1) {
      if (e & 1) acc = poly_mulmod(acc, base, m, p);
      base = poly_mulmod(base, base, m, p);
    }
    r = acc;
  }
  return r;
}

// Rabin's irreducibility test.
inline bool is_irreducible(const Poly& f, int64_t p) {
  const int d = static_cast<int>(f.size()) - 1;
  if (d <= 0) return false;
  if (d == 1) return true;
  auto x_minus = [&](Poly a) {
    a.resize(std::max<size_t>(a.size(), 2), 0);
    a[1] = mod(a[1] - 1, p);
    trim(a);
    return a;
  };
  if (!x_minus(frobenius_power_of_x(f, p, d)).empty()) return false;
  for (int r = 2; r <= d; ++r) {
    if (d % r != 0 || !is_prime(r)) continue;
    Poly g = poly_gcd(f, x_minus(frobenius_power_of_x(f, p, d / r)), p);
    if (g.size() != 1) return false;
  }
  return true;
}

inline Poly first_irreducible(int64_t p, int d) {
  const int64_t total = ipow(p, d);
  for (int64_t idx = 0; idx < total; ++idx) {
    Poly f(d + 1, 0);
    int64_t t = idx;
    for (int i = 0; i < d; ++i) {
      f[i] = t % p;
      t /= p;
    }
    f[d] = 1;
    if (is_irreducible(f, p)) return f;
  }
  fail(ErrorCode::ConfigError, "no irreducible polynomial found");
}

inline int valuation_int(int64_t a, int64_t p, int cap) {
  if (a == 0) return cap;
  int v = 0;
  while (a % p == 0 && v < cap) {
    a /= p;
    ++v;
  }
  return v;
}

}  // namespace detail

class GaloisRing;

/// Element of a Galois ring GR(p^N, d), stored as d coefficients in [0, p^N).
class GRElem {
 public:
  using Coeffs = std::array<int64_t, kMaxDegree>;

  GRElem() = default;
  GRElem(const GaloisRing* ring, const Coeffs& c) : ring_(ring), c_(c) {}

  const GaloisRing* ring() const { return ring_; }
  const Coeffs& coeffs() const { return c_; }
  int64_t coeff(int i) const { return c_[i]; }

  inline bool is_zero() const;
  inline int prec() const;
  inline int val() const;
  bool is_unit() const { return val() == 0; }

  inline GRElem operator+(const GRElem& o) const;
  inline GRElem operator-(const GRElem& o) const;
  inline GRElem operator-() const;
  inline GRElem operator*(const GRElem& o) const;
  GRElem& operator+=(const GRElem& o) { return *this = *this + o; }
  GRElem& operator-=(const GRElem& o) { return *this = *this - o; }
  GRElem& operator*=(const GRElem& o) { return *this = *this * o; }

  inline GRElem inverse() const;
  inline GRElem pow(int64_t e) const;
  inline GRElem div_uniformizer(int k) const;
  inline GRElem mul_uniformizer(int k) const;
  inline GRElem reduce(int k) const;
  inline GRElem zero_like() const;
  inline GRElem one_like() const;
  inline GRElem uniformizer_pow(int k) const;
  /// Absolute Frobenius (lift of x -> x^p) applied `power` times; negative allowed.
  inline GRElem frob(int power) const;

  bool operator==(const GRElem& o) const { return ring_ == o.ring_ && c_ == o.c_; }
  std::strong_ordering operator<=>(const GRElem& o) const { return c_ <=> o.c_; }

  inline std::string to_string() const;

 private:
  const GaloisRing* ring_ = nullptr;
  Coeffs c_{};
};

class GaloisRing : public std::enable_shared_from_this<GaloisRing> {
 public:
  static std::shared_ptr<const GaloisRing> make(int p, int degree, int prec) {
    if (!detail::is_prime(p)) fail(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    if (degree < 1 || degree > kMaxDegree)
      fail(ErrorCode::ConfigError, "ring degree " + std::to_string(degree) + " out of range");
    if (prec < 1) fail(ErrorCode::ConfigError, "precision must be positive");
    const int64_t modulus = detail::ipow(p, prec);
    if (modulus >= (int64_t{1} << 28)) fail(ErrorCode::ConfigError, "p^N too large for the word-size kernel");
    // Rings are interned: elements hold raw ring pointers, so a ring must
    // outlive every element built over it.
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const GaloisRing>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = registry[{p, degree, prec}];
    if (!slot) slot = std::shared_ptr<const GaloisRing>(new GaloisRing(p, degree, prec));
    return slot;
  }

  int p() const { return p_; }
  int degree() const { return d_; }
  int prec() const { return n_; }
  int64_t modulus() const { return pow_p_[n_]; }
  int64_t pow_p(int k) const { return pow_p_[std::clamp(k, 0, n_)]; }
  int64_t residue_size() const { return detail::ipow(p_, d_); }
  const detail::Poly& defining_poly() const { return phi_; }

  GRElem zero() const { return GRElem(this, {}); }
  GRElem one() const { return from_int(1); }
  GRElem gen() const {
    if (d_ == 1) return from_int(-phi_[0]);
    GRElem::Coeffs c{};
    c[1] = 1;
    return GRElem(this, c);
  }
  GRElem from_int(int64_t v) const {
    GRElem::Coeffs c{};
    c[0] = detail::mod(v, modulus());
    return GRElem(this, c);
  }
  GRElem from_coeffs(std::span<const int64_t> v) const {
    GRElem::Coeffs c{};
    for (size_t i = 0; i < v.size() && i < static_cast<size_t>(d_); ++i) c[i] = detail::mod(v[i], modulus());
    return GRElem(this, c);
  }

  /// Canonical lift of the residue-field element with base-p digit index `idx`.
  GRElem residue_lift(int64_t idx) const {
    GRElem::Coeffs c{};
    for (int i = 0; i < d_; ++i) {
      c[i] = idx % p_;
      idx /= p_;
    }
    return GRElem(this, c);
  }
  int64_t residue_index(const GRElem& a) const {
    int64_t idx = 0;
    for (int i = d_ - 1; i >= 0; --i) idx = idx * p_ + a.coeff(i) % p_;
    return idx;
  }

  GRElem mul(const GRElem& a, const GRElem& b) const {
    const int64_t m = modulus();
    std::array<int64_t, 2 * kMaxDegree> acc{};
    for (int i = 0; i < d_; ++i) {
      if (a.coeff(i) == 0) continue;
      for (int j = 0; j < d_; ++j) acc[i + j] = (acc[i + j] + a.coeff(i) * b.coeff(j)) % m;
    }
    for (int k = 2 * d_ - 2; k >= d_; --k) {
      const int64_t t = acc[k];
      if (t == 0) continue;
      for (int i = 0; i < d_; ++i) acc[k - d_ + i] = (acc[k - d_ + i] - t * phi_lift_[i]) % m;
      acc[k] = 0;
    }
    GRElem::Coeffs c{};
    for (int i = 0; i < d_; ++i) c[i] = detail::mod(acc[i], m);
    return GRElem(this, c);
  }

  GRElem frob(const GRElem& a, int power) const {
    const int k = static_cast<int>(detail::mod(power, d_));
    if (k == 0) return a;
    const auto& mat = frob_[k];
    const int64_t m = modulus();
    GRElem::Coeffs c{};
    for (int i = 0; i < d_; ++i) {
      int64_t s = 0;
      for (int j = 0; j < d_; ++j) s = (s + mat[i * d_ + j] * a.coeff(j)) % m;
      c[i] = s;
    }
    return GRElem(this, c);
  }

  GRElem inverse(const GRElem& a) const {
    if (a.val() != 0) fail(ErrorCode::NotAUnit, "inverse of non-unit " + a.to_string());
    GRElem v = a.pow(residue_size() - 2);
    const GRElem two = from_int(2);
    for (int prec = 1; prec < n_; prec *= 2) v = v * (two - a * v);
    return v;
  }

 private:
  GaloisRing(int p, int d, int n) : p_(p), d_(d), n_(n) {
    pow_p_.resize(n + 1);
    pow_p_[0] = 1;
    for (int i = 1; i <= n; ++i) pow_p_[i] = pow_p_[i - 1] * p;
    phi_ = detail::first_irreducible(p, d);
    for (int i = 0; i < d; ++i) phi_lift_[i] = phi_[i];
    build_frobenius();
  }

  GRElem eval_phi(const GRElem& y) const {
    GRElem acc = one();
    for (int i = d_ - 1; i >= 0; --i) acc = acc * y + from_int(phi_[i]);
    return acc;
  }
  GRElem eval_phi_prime(const GRElem& y) const {
    GRElem acc = from_int(d_);
    for (int i = d_ - 1; i >= 1; --i) acc = acc * y + from_int(i * phi_[i]);
    return acc;
  }

  void build_frobenius() {
    frob_.assign(d_, std::vector<int64_t>(d_ * d_, 0));
    for (int i = 0; i < d_; ++i) frob_[0][i * d_ + i] = 1;
    if (d_ == 1) return;
    // sigma(x) is the root of Phi congruent to x^p; Newton converges because
    // Phi is separable mod p.
    GRElem y = gen().pow(p_);
    for (int it = 0; it < 2 * n_ + 2; ++it) y = y - eval_phi(y) * inverse(eval_phi_prime(y));
    GRElem img = gen();
    for (int k = 1; k < d_; ++k) {
      // image of x under sigma^k is sigma^(k-1)(y)
      img = (k == 1) ? y : frob_apply_matrix(frob_[k - 1], y);
      GRElem pw = one();
      for (int j = 0; j < d_; ++j) {
        for (int i = 0; i < d_; ++i) frob_[k][i * d_ + j] = pw.coeff(i);
        pw = pw * img;
      }
    }
  }

  GRElem frob_apply_matrix(const std::vector<int64_t>& mat, const GRElem& a) const {
    GRElem::Coeffs c{};
    for (int i = 0; i < d_; ++i) {
      int64_t s = 0;
      for (int j = 0; j < d_; ++j) s = (s + mat[i * d_ + j] * a.coeff(j)) % modulus();
      c[i] = s;
    }
    return GRElem(this, c);
  }

  int p_, d_, n_;
  std::vector<int64_t> pow_p_;
  detail::Poly phi_;
  std::array<int64_t, kMaxDegree> phi_lift_{};
  std::vector<std::vector<int64_t>> frob_;
};

inline bool GRElem::is_zero() const {
  for (int i = 0; i < ring_->degree(); ++i)
    if (c_[i] != 0) return false;
  return true;
}
inline int GRElem::prec() const { return ring_->prec(); }
inline int GRElem::val() const {
  int v = ring_->prec();
  for (int i = 0; i < ring_->degree(); ++i) v = std::min(v, detail::valuation_int(c_[i], ring_->p(), ring_->prec()));
  return v;
}

namespace detail {
inline void check_level(const GaloisRing* a, const GaloisRing* b) {
  if (a != b) fail(ErrorCode::LevelMismatch, "operands live in different rings");
}
}  // namespace detail

inline GRElem GRElem::operator+(const GRElem& o) const {
  detail::check_level(ring_, o.ring_);
  Coeffs c{};
  const int64_t m = ring_->modulus();
  for (int i = 0; i < ring_->degree(); ++i) c[i] = (c_[i] + o.c_[i]) % m;
  return GRElem(ring_, c);
}
inline GRElem GRElem::operator-(const GRElem& o) const {
  detail::check_level(ring_, o.ring_);
  Coeffs c{};
  const int64_t m = ring_->modulus();
  for (int i = 0; i < ring_->degree(); ++i) c[i] = detail::mod(c_[i] - o.c_[i], m);
  return GRElem(ring_, c);
}
inline GRElem GRElem::operator-() const { return zero_like() - *this; }
inline GRElem GRElem::operator*(const GRElem& o) const {
  detail::check_level(ring_, o.ring_);
  return ring_->mul(*this, o);
}
inline GRElem GRElem::inverse() const { return ring_->inverse(*this); }
inline GRElem GRElem::pow(int64_t e) const {
  GRElem base = *this, acc = one_like();
  for (; e > 0; e >>= 1) {
    if (e & 1) acc = acc * base;
    base = base * base;
  }
  return acc;
}
inline GRElem GRElem::div_uniformizer(int k) const {
  if (k <= 0) return mul_uniformizer(-k);
  if (val() < k) fail(ErrorCode::PrecisionExhausted, "division by p^" + std::to_string(k) + " is not exact");
  Coeffs c{};
  const int64_t pk = ring_->pow_p(k);
  for (int i = 0; i < ring_->degree(); ++i) c[i] = c_[i] / pk;
  return GRElem(ring_, c);
}
inline GRElem GRElem::mul_uniformizer(int k) const {
  if (k < 0) return div_uniformizer(-k);
  Coeffs c{};
  const int64_t m = ring_->modulus();
  const int64_t pk = ring_->pow_p(k);
  for (int i = 0; i < ring_->degree(); ++i) c[i] = (k >= ring_->prec()) ? 0 : (c_[i] * pk) % m;
  return GRElem(ring_, c);
}
inline GRElem GRElem::reduce(int k) const {
  Coeffs c{};
  const int64_t pk = ring_->pow_p(k);
  for (int i = 0; i < ring_->degree(); ++i) c[i] = c_[i] % pk;
  return GRElem(ring_, c);
}
inline GRElem GRElem::zero_like() const { return ring_->zero(); }
inline GRElem GRElem::one_like() const { return ring_->one(); }
inline GRElem GRElem::uniformizer_pow(int k) const { return ring_->one().mul_uniformizer(k); }
inline GRElem GRElem::frob(int power) const { return ring_->frob(*this, power); }
inline std::string GRElem::to_string() const {
  std::string s = "[";
  for (int i = 0; i < ring_->degree(); ++i) {
    if (i) s += ",";
    s += std::to_string(c_[i]);
  }
  return s + "]";
}

/// a + b*Pi with Pi^2 = p, over a Galois ring. Valuations are counted in
/// units of val(Pi), i.e. twice the pi-adic valuation.
class RamElem {
 public:
  RamElem() = default;
  RamElem(GRElem a, GRElem b) : a_(std::move(a)), b_(std::move(b)) { detail::check_level(a_.ring(), b_.ring()); }

  const GaloisRing* ring() const { return a_.ring(); }
  const GRElem& a() const { return a_; }
  const GRElem& b() const { return b_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  int prec() const { return 2 * a_.prec(); }
  int val() const { return std::min(2 * a_.val(), b_.is_zero() ? prec() : 2 * b_.val() + 1); }
  bool is_unit() const { return val() == 0; }

  RamElem operator+(const RamElem& o) const { return {a_ + o.a_, b_ + o.b_}; }
  RamElem operator-(const RamElem& o) const { return {a_ - o.a_, b_ - o.b_}; }
  RamElem operator-() const { return {-a_, -b_}; }
  RamElem operator*(const RamElem& o) const {
    return {a_ * o.a_ + (b_ * o.b_).mul_uniformizer(1), a_ * o.b_ + b_ * o.a_};
  }
  RamElem& operator+=(const RamElem& o) { return *this = *this + o; }
  RamElem& operator-=(const RamElem& o) { return *this = *this - o; }
  RamElem& operator*=(const RamElem& o) { return *this = *this * o; }

  /// Galois conjugation of E = F(Pi): Pi -> -Pi.
  RamElem conj() const { return {a_, -b_}; }
  RamElem frob(int power) const { return {a_.frob(power), b_.frob(power)}; }
  /// x * conj(x) = a^2 - p b^2
  GRElem norm() const { return a_ * a_ - (b_ * b_).mul_uniformizer(1); }
  GRElem trace() const { return a_ + a_; }

  RamElem inverse() const {
    if (!is_unit()) fail(ErrorCode::NotAUnit, "inverse of non-unit " + to_string());
    const GRElem n_inv = norm().inverse();
    return {a_ * n_inv, -(b_ * n_inv)};
  }
  RamElem pow(int64_t e) const {
    RamElem base = *this, acc = one_like();
    for (; e > 0; e >>= 1) {
      if (e & 1) acc = acc * base;
      base = base * base;
    }
    return acc;
  }
  RamElem div_uniformizer(int k) const {
    if (k <= 0) return mul_uniformizer(-k);
    if (val() < k) fail(ErrorCode::PrecisionExhausted, "division by Pi^" + std::to_string(k) + " is not exact");
    RamElem r = *this;
    for (int i = 0; i < k; ++i) r = RamElem(r.b_, r.a_.div_uniformizer(1));
    return r;
  }
  RamElem mul_uniformizer(int k) const {
    if (k < 0) return div_uniformizer(-k);
    RamElem r = *this;
    for (int i = 0; i < k; ++i) r = RamElem(r.b_.mul_uniformizer(1), r.a_);
    return r;
  }
  RamElem reduce(int k) const { return {a_.reduce((k + 1) / 2), b_.reduce(k / 2)}; }
  RamElem zero_like() const { return {a_.zero_like(), a_.zero_like()}; }
  RamElem one_like() const { return {a_.one_like(), a_.zero_like()}; }
  RamElem uniformizer_pow(int k) const { return one_like().mul_uniformizer(k); }

  static RamElem from_base(const GRElem& x) { return {x, x.zero_like()}; }
  static RamElem pi_elem(const GaloisRing* r) { return {r->zero(), r->one()}; }

  bool operator==(const RamElem& o) const { return a_ == o.a_ && b_ == o.b_; }
  std::strong_ordering operator<=>(const RamElem& o) const {
    if (auto c = a_ <=> o.a_; c != 0) return c;
    return b_ <=> o.b_;
  }
  std::string to_string() const { return "(" + a_.to_string() + "+" + b_.to_string() + "Pi)"; }

 private:
  GRElem a_, b_;
};

/// Ring embedding GR(p^N, d) -> GR(p^N, D) with d | D, fixed by the image of
/// the generator (the lexicographically smallest root of the source's
/// defining polynomial, Hensel-lifted).
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::shared_ptr<const GaloisRing> src, std::shared_ptr<const GaloisRing> dst)
      : src_(std::move(src)), dst_(std::move(dst)) {
    if (src_->p() != dst_->p() || src_->prec() != dst_->prec() || dst_->degree() % src_->degree() != 0)
      fail(ErrorCode::LevelMismatch, "no embedding between these rings");
    const int d = src_->degree(), D = dst_->degree();
    const auto& phi = src_->defining_poly();
    auto eval = [&](const GRElem& y) {
      GRElem acc = dst_->one();
      for (int i = d - 1; i >= 0; --i) acc = acc * y + dst_->from_int(phi[i]);
      return acc;
    };
    auto eval_prime = [&](const GRElem& y) {
      GRElem acc = dst_->from_int(d);
      for (int i = d - 1; i >= 1; --i) acc = acc * y + dst_->from_int(i * phi[i]);
      return acc;
    };
    std::optional<GRElem> root;
    for (int64_t idx = 0; idx < dst_->residue_size() && !root; ++idx) {
      GRElem y = dst_->residue_lift(idx);
      if (eval(y).val() >= 1) root = y;
    }
    if (!root) fail(ErrorCode::LevelMismatch, "defining polynomial has no root in target");
    GRElem y = *root;
    for (int it = 0; it < 2 * dst_->prec() + 2; ++it) y = y - eval(y) * eval_prime(y).inverse();
    gen_image_ = y;
    // columns: coefficients of y^j
    mat_.assign(D * d, 0);
    GRElem pw = dst_->one();
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < D; ++i) mat_[i * d + j] = pw.coeff(i);
      pw = pw * y;
    }
    build_left_inverse();
  }

  const GaloisRing* src() const { return src_.get(); }
  const GaloisRing* dst() const { return dst_.get(); }

  GRElem apply(const GRElem& a) const {
    detail::check_level(a.ring(), src_.get());
    const int d = src_->degree(), D = dst_->degree();
    const int64_t m = dst_->modulus();
    GRElem::Coeffs c{};
    for (int i = 0; i < D; ++i) {
      int64_t s = 0;
      for (int j = 0; j < d; ++j) s = (s + mat_[i * d + j] * a.coeff(j)) % m;
      c[i] = s;
    }
    return GRElem(dst_.get(), c);
  }
  RamElem apply(const RamElem& a) const { return {apply(a.a()), apply(a.b())}; }

  /// Preimage of `z` modulo p^k, if z lies in the image modulo p^k.
  std::optional<GRElem> preimage(const GRElem& z, int k) const {
    detail::check_level(z.ring(), dst_.get());
    const int d = src_->degree(), D = dst_->degree();
    const int64_t m = dst_->modulus();
    GRElem::Coeffs c{};
    for (int j = 0; j < d; ++j) {
      int64_t s = 0;
      for (int i = 0; i < D; ++i) s = (s + linv_[j * D + i] * z.coeff(i)) % m;
      c[j] = s;
    }
    GRElem x(src_.get(), c);
    if ((apply(x) - z).val() < k) return std::nullopt;
    return x.reduce(k);
  }
  std::optional<RamElem> preimage(const RamElem& z, int k) const {
    auto a = preimage(z.a(), (k + 1) / 2);
    auto b = preimage(z.b(), k / 2);
    if (!a || !b) return std::nullopt;
    return RamElem(*a, *b);
  }

 private:
  void build_left_inverse() {
    const int d = src_->degree(), D = dst_->degree();
    const int64_t p = dst_->p(), m = dst_->modulus();
    // pick d rows giving an invertible minor mod p (greedy elimination)
    std::vector<int> rows;
    std::vector<std::vector<int64_t>> basis;  // reduced row vectors mod p
    for (int i = 0; i < D && static_cast<int>(rows.size()) < d; ++i) {
      std::vector<int64_t> v(d);
      for (int j = 0; j < d; ++j) v[j] = mat_[i * d + j] % p;
      for (const auto& b : basis) {
        int piv = 0;
        while (b[piv] == 0) ++piv;
        const int64_t t = v[piv] * detail::inv_mod(b[piv], p) % p;
        for (int j = 0; j < d; ++j) v[j] = detail::mod(v[j] - t * b[j], p);
      }
      if (std::any_of(v.begin(), v.end(), [](int64_t x) { return x != 0; })) {
        rows.push_back(i);
        basis.push_back(v);
      }
    }
    // invert the d x d minor over Z/p^N by Gauss-Jordan with unit pivots
    std::vector<std::vector<int64_t>> a(d, std::vector<int64_t>(2 * d, 0));
    for (int r = 0; r < d; ++r) {
      for (int j = 0; j < d; ++j) a[r][j] = mat_[rows[r] * d + j];
      a[r][d + r] = 1;
    }
    for (int col = 0; col < d; ++col) {
      int piv = col;
      while (a[piv][col] % p == 0) ++piv;
      std::swap(a[piv], a[col]);
      const int64_t inv = detail::inv_mod(a[col][col], m);
      for (auto& x : a[col]) x = x * inv % m;
      for (int r = 0; r < d; ++r) {
        if (r == col || a[r][col] == 0) continue;
        const int64_t t = a[r][col];
        for (int j = 0; j < 2 * d; ++j) a[r][j] = detail::mod(a[r][j] - t * a[col][j], m);
      }
    }
    // minor^{-1} maps selected-row values to source coefficients
    linv_.assign(d * D, 0);
    for (int j = 0; j < d; ++j)
      for (int r = 0; r < d; ++r) linv_[j * D + rows[r]] = a[j][d + r];
  }

  std::shared_ptr<const GaloisRing> src_, dst_;
  GRElem gen_image_;
  std::vector<int64_t> mat_;
  std::vector<int64_t> linv_;
};

// ---------------------------------------------------------------------------
// Context

enum class Case { Unramified, Ramified };

inline std::string_view to_string(Case c) { return c == Case::Unramified ? "unramified" : "ramified"; }

struct ContextOptions {
  /// Coefficients (over O_F) of the square of delta; odd p only.
  std::optional<std::vector<int64_t>> delta_sq;
  /// Coefficients (over O_F) of the unit used for zeta^2 in the ramified case.
  std::optional<std::vector<int64_t>> nonnorm_unit;
  /// Which admissible generator to take when none is supplied (0 = first).
  int generator_choice = 0;
};

/// Global parameters and the fixed rings/generators derived from them.
///
/// Unramified: O_F = GR(p^N, f), O_E = GR(p^N, 2f), coefficient ring
/// GR(p^N, 2fm) (contains O_E). Ramified: O_F = GR(p^N, f), O_E = O_F[Pi],
/// coefficient ring GR(p^N, fm); the framing ring GR(p^N, lcm(fm, 2f)) is the
/// smallest one carrying delta with sigma(delta) = -delta.
struct ArithmeticContext {
  int p = 0, f = 0, m = 0, N = 0;
  int64_t q = 0;
  Case kind = Case::Unramified;

  std::shared_ptr<const GaloisRing> OF, OE, coeff, framing;
  Embedding of_to_oe;         // unramified only
  Embedding oe_to_coeff;      // unramified only
  Embedding of_to_coeff;      // both
  Embedding coeff_to_framing; // ramified only
  Embedding of_to_framing;    // ramified only

  GRElem delta_sq;  // in O_F
  GRElem delta;     // unramified: in O_E, conj(delta) = -delta; ramified: in framing ring
  GRElem nonnorm;   // ramified: unit of O_F, non-square mod p

  /// Relative Frobenius sigma of F-breve/F, as a power of the absolute one.
  int sigma() const { return f; }
  bool unramified() const { return kind == Case::Unramified; }
};

namespace detail {

inline GRElem residue_power(const GRElem& a, int64_t e) { return a.pow(e); }

/// Euler criterion in F_q for a unit of O_F.
inline bool is_residue_square(const GRElem& a) {
  const int64_t q = a.ring()->residue_size();
  if (a.ring()->p() == 2) return true;
  return (a.pow((q - 1) / 2) - a.one_like()).val() >= 1;
}

inline GRElem hensel_sqrt(const GRElem& c, const GaloisRing& ring) {
  std::optional<GRElem> root;
  for (int64_t idx = 1; idx < ring.residue_size() && !root; ++idx) {
    GRElem y = ring.residue_lift(idx);
    if ((y * y - c).val() >= 1) root = y;
  }
  if (!root) fail(ErrorCode::BadGenerator, "no square root of " + c.to_string());
  GRElem y = *root;
  const GRElem two = ring.from_int(2);
  for (int it = 0; it < 2 * ring.prec() + 2; ++it) y = y - (y * y - c) * (two * y).inverse();
  return y;
}

/// Candidate units of O_F in deterministic order: -1, 2, -2, 3, -3, ... then
/// residue lifts.
inline std::vector<GRElem> unit_candidates(const GaloisRing& of) {
  std::vector<GRElem> out;
  for (int k = 1; k <= of.p(); ++k) {
    if (k > 1) out.push_back(of.from_int(k));
    out.push_back(of.from_int(-k));
  }
  for (int64_t idx = 1; idx < of.residue_size(); ++idx) out.push_back(of.residue_lift(idx));
  return out;
}

inline GRElem choose_nonsquare(const GaloisRing& of, const std::optional<std::vector<int64_t>>& supplied,
                               int choice, const char* what) {
  if (supplied) {
    GRElem c = of.from_coeffs(*supplied);
    if (!c.is_unit()) fail(ErrorCode::BadGenerator, std::string(what) + " must be a unit");
    if (is_residue_square(c)) fail(ErrorCode::BadGenerator, std::string(what) + " is a square mod p");
    return c;
  }
  int seen = 0;
  for (const auto& c : unit_candidates(of)) {
    if (!c.is_unit() || is_residue_square(c)) continue;
    if (seen++ == choice) return c;
  }
  fail(ErrorCode::BadGenerator, std::string("no non-square unit with index ") + std::to_string(choice));
}

}  // namespace detail

inline ArithmeticContext make_context(int p, int f, Case kind, int m, int N, const ContextOptions& opt = {}) {
  if (!detail::is_prime(p)) fail(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (kind == Case::Ramified && p == 2) fail(ErrorCode::RamifiedP2, "p = 2 is excluded in the ramified case");
  if (f < 1 || m < 1) fail(ErrorCode::ConfigError, "f and m must be positive");
  if (N < 4) fail(ErrorCode::ConfigError, "precision N must be at least 4");

  ArithmeticContext ctx;
  ctx.p = p;
  ctx.f = f;
  ctx.m = m;
  ctx.N = N;
  ctx.kind = kind;
  ctx.q = detail::ipow(p, f);
  ctx.OF = GaloisRing::make(p, f, N);

  if (kind == Case::Unramified) {
    ctx.OE = GaloisRing::make(p, 2 * f, N);
    ctx.coeff = GaloisRing::make(p, 2 * f * m, N);
    ctx.framing = ctx.coeff;
    ctx.of_to_oe = Embedding(ctx.OF, ctx.OE);
    ctx.oe_to_coeff = Embedding(ctx.OE, ctx.coeff);
    ctx.of_to_coeff = Embedding(ctx.OF, ctx.coeff);
    if (p == 2) {
      // No residue non-squares exist; take a trace-zero unit delta = w - conj(w).
      if (opt.delta_sq) fail(ErrorCode::BadGenerator, "p = 2 takes delta from generator_choice, not delta_sq");
      int seen = 0;
      for (int64_t idx = 1; idx < ctx.OE->residue_size(); ++idx) {
        GRElem w = ctx.OE->residue_lift(idx);
        GRElem d = w - w.frob(f);
        if (!d.is_unit()) continue;
        if (seen++ == opt.generator_choice) {
          ctx.delta = d;
          break;
        }
      }
      if (ctx.delta.ring() == nullptr) fail(ErrorCode::BadGenerator, "no trace-zero unit with that index");
      auto pre = ctx.of_to_oe.preimage(ctx.delta * ctx.delta, N);
      if (!pre) fail(ErrorCode::BadGenerator, "delta^2 not in O_F");
      ctx.delta_sq = *pre;
    } else {
      ctx.delta_sq = detail::choose_nonsquare(*ctx.OF, opt.delta_sq, opt.generator_choice, "delta_sq");
      ctx.delta = detail::hensel_sqrt(ctx.of_to_oe.apply(ctx.delta_sq), *ctx.OE);
    }
  } else {
    ctx.coeff = GaloisRing::make(p, f * m, N);
    const int fd = std::lcm(f * m, 2 * f);
    ctx.framing = GaloisRing::make(p, fd, N);
    ctx.of_to_coeff = Embedding(ctx.OF, ctx.coeff);
    ctx.coeff_to_framing = Embedding(ctx.coeff, ctx.framing);
    ctx.of_to_framing = Embedding(ctx.OF, ctx.framing);
    ctx.nonnorm = detail::choose_nonsquare(*ctx.OF, opt.nonnorm_unit, opt.generator_choice, "nonnorm_unit");
    ctx.delta_sq = ctx.nonnorm;
    ctx.delta = detail::hensel_sqrt(ctx.of_to_framing.apply(ctx.delta_sq), *ctx.framing);
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Galois actions, trace and norm

enum class GaloisAction { Sigma, SigmaInverse, ConjE };

/// sigma / sigma^{-1} are the relative Frobenius of F-breve over F. On the
/// unramified O_E, conj_E coincides with sigma.
inline GRElem galois_frobenius(const ArithmeticContext& ctx, const GRElem& x, GaloisAction action) {
  switch (action) {
    case GaloisAction::Sigma: return x.frob(ctx.f);
    case GaloisAction::SigmaInverse: return x.frob(-ctx.f);
    case GaloisAction::ConjE:
      if (!ctx.unramified() || x.ring() != ctx.OE.get())
        fail(ErrorCode::LevelMismatch, "conj_E on a Galois-ring element needs the unramified O_E level");
      return x.frob(ctx.f);
  }
  return x;
}

inline RamElem galois_frobenius(const ArithmeticContext& ctx, const RamElem& x, GaloisAction action) {
  switch (action) {
    case GaloisAction::Sigma: return x.frob(ctx.f);
    case GaloisAction::SigmaInverse: return x.frob(-ctx.f);
    case GaloisAction::ConjE: return x.conj();
  }
  return x;
}

/// Trace and norm of E/F for an unramified O_E element, landing in O_F.
inline std::pair<GRElem, GRElem> trace_norm(const ArithmeticContext& ctx, const GRElem& x) {
  if (!ctx.unramified() || x.ring() != ctx.OE.get())
    fail(ErrorCode::LevelMismatch, "trace_norm expects an element of the unramified O_E");
  const GRElem c = x.frob(ctx.f);
  auto tr = ctx.of_to_oe.preimage(x + c, ctx.N);
  auto nm = ctx.of_to_oe.preimage(x * c, ctx.N);
  return {*tr, *nm};
}

/// Trace and norm of E/F for E = F(Pi), landing in the base ring.
inline std::pair<GRElem, GRElem> trace_norm(const ArithmeticContext&, const RamElem& x) {
  return {x.trace(), x.norm()};
}

}  // namespace dhp
