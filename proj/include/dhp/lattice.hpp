#pragma once

// Full-rank lattices over a truncated DVR (GRElem: uniformizer p; RamElem:
// uniformizer Pi). A lattice is w^{-shift} times the column span of an
// integral upper-triangular Hermite form: pivot (i,i) = w^{a_i}, entries
// above a pivot reduced modulo it, and not all entries divisible by w.

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dhp/errors.hpp"
#include "dhp/matrix.hpp"

namespace dhp {

/// h(x, y) = x^T G twist(y)
template <class Elem>
struct Form {
  Mat<Elem> gram;
  std::function<Elem(const Elem&)> twist;
  Mat<Elem> adj_gram;
  int gram_val = 0;

  static Form make(const Mat<Elem>& gram, std::function<Elem(const Elem&)> twist) {
    Form f;
    f.gram = gram;
    f.twist = twist ? std::move(twist) : [](const Elem& x) { return x; };
    const Elem d = gram.det();
    if (d.is_zero()) fail(ErrorCode::PrecisionExhausted, "Gram matrix degenerate at working precision");
    f.gram_val = d.val();
    f.adj_gram = gram.adjugate();
    return f;
  }
  static Form standard(int n, const Elem& proto) { return make(Mat<Elem>::identity(n, proto), nullptr); }

  Elem eval(const std::vector<Elem>& x, const std::vector<Elem>& y) const {
    Elem acc = x.front().zero_like();
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t j = 0; j < y.size(); ++j) {
        if (gram(i, j).is_zero()) continue;
        acc += x[i] * gram(i, j) * twist(y[j]);
      }
    return acc;
  }
};

template <class Elem>
class Lattice {
 public:
  Lattice() = default;

  /// Lattice w^{-shift} * span(columns of gens).
  static Lattice from_generators(const Mat<Elem>& gens, int shift) {
    const int n = gens.rows();
    const int P = gens.proto().prec();
    int content = P;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < gens.cols(); ++j)
        if (!gens(i, j).is_zero()) content = std::min(content, gens(i, j).val());
    if (content > 0 && content < P)
      return from_generators(gens.map([content](const Elem& x) { return x.div_uniformizer(content); }), shift - content);
    std::vector<std::vector<Elem>> pool;
    for (int j = 0; j < gens.cols(); ++j) {
      auto c = gens.col(j);
      if (std::any_of(c.begin(), c.end(), [](const Elem& e) { return !e.is_zero(); })) pool.push_back(std::move(c));
    }
    std::vector<std::vector<Elem>> piv(n);
    std::vector<int> a(n, 0);
    for (int i = n - 1; i >= 0; --i) {
      int best = -1, bv = P;
      for (size_t k = 0; k < pool.size(); ++k) {
        if (pool[k][i].is_zero()) continue;
        const int v = pool[k][i].val();
        if (v < bv) {
          bv = v;
          best = static_cast<int>(k);
        }
      }
      if (best < 0) fail(ErrorCode::RankDeficient, "generators do not span a full-rank lattice");
      std::vector<Elem> c = std::move(pool[best]);
      pool.erase(pool.begin() + best);
      const Elem uinv = c[i].div_uniformizer(bv).inverse();
      for (auto& x : c) x = uinv * x;
      c[i] = c[i].uniformizer_pow(bv);
      for (auto& g : pool) {
        if (g[i].is_zero()) continue;
        const Elem t = g[i].div_uniformizer(bv);
        for (int r = 0; r < i; ++r) g[r] -= t * c[r];
        g[i] = g[i].zero_like();
      }
      piv[i] = std::move(c);
      a[i] = bv;
    }
    if (std::accumulate(a.begin(), a.end(), 0) >= P)
      fail(ErrorCode::PrecisionExhausted, "lattice index exceeds working precision");
    Mat<Elem> B(n, n, gens.proto());
    for (int j = 0; j < n; ++j) B.set_col(j, piv[j]);
    for (int j = 0; j < n; ++j)
      for (int i = j - 1; i >= 0; --i) {
        const Elem x = B(i, j);
        const Elem r = x.reduce(a[i]);
        if (r == x) continue;
        const Elem q = (x - r).div_uniformizer(a[i]);
        for (int k = 0; k < i; ++k) B(k, j) -= q * B(k, i);
        B(i, j) = r;
      }
    int m = P;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (!B(i, j).is_zero()) m = std::min(m, B(i, j).val());
    if (m > 0) return from_generators(B.map([m](const Elem& x) { return x.div_uniformizer(m); }), shift - m);
    Lattice L;
    L.basis_ = std::move(B);
    L.pivots_ = std::move(a);
    L.shift_ = shift;
    return L;
  }

  static Lattice standard(int n, const Elem& proto) { return from_generators(Mat<Elem>::identity(n, proto), 0); }
  static Lattice diagonal(const std::vector<int>& exps, const Elem& proto) {
    const int n = static_cast<int>(exps.size());
    const int lo = *std::min_element(exps.begin(), exps.end());
    Mat<Elem> g(n, n, proto);
    for (int i = 0; i < n; ++i) g(i, i) = proto.uniformizer_pow(exps[i] - lo);
    return from_generators(g, -lo);
  }

  int rank() const { return basis_.rows(); }
  int shift() const { return shift_; }
  const Mat<Elem>& basis() const { return basis_; }
  const std::vector<int>& pivots() const { return pivots_; }
  const Elem& proto() const { return basis_.proto(); }

  /// length of O^n / L, extended additively to all lattices
  int volume() const { return std::accumulate(pivots_.begin(), pivots_.end(), 0) - rank() * shift_; }

  /// Integral generator matrix of w^{s} L (requires s >= shift).
  Mat<Elem> generators_at(int s) const {
    const int k = s - shift_;
    if (k < 0) fail(ErrorCode::PrecisionExhausted, "cannot lower the shift of a lattice basis");
    if (k == 0) return basis_;
    return basis_.map([k](const Elem& x) { return x.mul_uniformizer(k); });
  }

  /// w^k L
  Lattice scaled(int k) const {
    Lattice r = *this;
    r.shift_ -= k;
    return r;
  }

  Lattice operator+(const Lattice& o) const {
    const int s = std::max(shift_, o.shift_);
    return from_generators(generators_at(s).hcat(o.generators_at(s)), s);
  }

  Lattice dual(const Form<Elem>& form) const {
    const Mat<Elem> tb = basis_.map(form.twist);
    const int e = tb.det().val();
    const Mat<Elem> X = tb.adjugate() * form.adj_gram;
    return from_generators(X.transpose(), e + form.gram_val - shift_);
  }

  Lattice intersect(const Lattice& o) const {
    const auto std_form = Form<Elem>::standard(rank(), proto());
    return (dual(std_form) + o.dual(std_form)).dual(std_form);
  }

  bool contains(const Lattice& o) const { return (*this + o) == *this; }
  bool contains_vector(const std::vector<Elem>& v, int vshift) const {
    const int s = std::max(shift_, vshift);
    Mat<Elem> col(rank(), 1, proto());
    const int k = s - vshift;
    for (int i = 0; i < rank(); ++i) col(i, 0) = v[i].mul_uniformizer(k);
    return from_generators(generators_at(s).hcat(col), s) == *this;
  }

  /// length of bigger / this
  int index_in(const Lattice& bigger) const {
    if (!bigger.contains(*this)) fail(ErrorCode::NotNested, "lattice is not contained in the other");
    return volume() - bigger.volume();
  }

  /// A * twist(L), where A is integral and represents w^{-a_shift} A.
  Lattice image(const Mat<Elem>& A, int a_shift, const std::function<Elem(const Elem&)>& twist) const {
    const Mat<Elem> tb = twist ? basis_.map(twist) : basis_;
    return from_generators(A * tb, shift_ + a_shift);
  }

  /// Entrywise ring map (base change) of the basis.
  template <class Fn>
  auto map_entries(Fn&& fn) const {
    using Out = std::decay_t<decltype(fn(basis_(0, 0)))>;
    const Out proto_out = fn(basis_(0, 0));
    Mat<Out> g(rank(), rank(), proto_out);
    for (int i = 0; i < rank(); ++i)
      for (int j = 0; j < rank(); ++j) g(i, j) = fn(basis_(i, j));
    return Lattice<Out>::from_generators(g, shift_);
  }

  /// Preimage in L of the line spanned by `coords` in L / wL.
  Lattice sub_from_line(const std::vector<Elem>& coords) const {
    Mat<Elem> c(rank(), 1, proto());
    for (int i = 0; i < rank(); ++i) c(i, 0) = coords[i];
    const Mat<Elem> v = basis_ * c;
    return from_generators(basis_.map([](const Elem& x) { return x.mul_uniformizer(1); }).hcat(v), shift_);
  }

  /// Preimage in w^{-1}L of the line spanned by `coords` in w^{-1}L / L.
  Lattice super_from_line(const std::vector<Elem>& coords) const {
    return sub_from_line(coords).scaled(-1);
  }

  bool operator==(const Lattice& o) const { return shift_ == o.shift_ && basis_ == o.basis_; }
  bool operator<(const Lattice& o) const {
    if (shift_ != o.shift_) return shift_ < o.shift_;
    for (int i = 0; i < rank(); ++i)
      for (int j = 0; j < rank(); ++j) {
        const auto c = basis_(i, j) <=> o.basis_(i, j);
        if (c != 0) return c < 0;
      }
    return false;
  }

  std::string to_string() const { return "w^" + std::to_string(-shift_) + "*" + basis_.to_string(); }

 private:
  Mat<Elem> basis_;
  std::vector<int> pivots_;
  int shift_ = 0;
};

}  // namespace dhp
