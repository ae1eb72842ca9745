#pragma once

// Small dense matrices over a truncated ring. Elements carry their ring, so
// every matrix is built from a prototype element.

#include <functional>
#include <string>
#include <vector>

#include "dhp/errors.hpp"

namespace dhp {

template <class Elem>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, const Elem& proto) : rows_(rows), cols_(cols), d_(rows * cols, proto.zero_like()) {}

  static Mat identity(int n, const Elem& proto) {
    Mat m(n, n, proto);
    for (int i = 0; i < n; ++i) m(i, i) = proto.one_like();
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Elem& operator()(int i, int j) { return d_[i * cols_ + j]; }
  const Elem& operator()(int i, int j) const { return d_[i * cols_ + j]; }
  const Elem& proto() const { return d_.front(); }

  std::vector<Elem> col(int j) const {
    std::vector<Elem> v;
    v.reserve(rows_);
    for (int i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
    return v;
  }
  void set_col(int j, const std::vector<Elem>& v) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  Mat operator*(const Mat& o) const {
    if (cols_ != o.rows_) fail(ErrorCode::ConfigError, "matrix shape mismatch");
    Mat r(rows_, o.cols_, proto());
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Elem& a = (*this)(i, k);
        if (a.is_zero()) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }
  Mat operator+(const Mat& o) const {
    Mat r = *this;
    for (size_t i = 0; i < d_.size(); ++i) r.d_[i] += o.d_[i];
    return r;
  }
  Mat operator-(const Mat& o) const {
    Mat r = *this;
    for (size_t i = 0; i < d_.size(); ++i) r.d_[i] -= o.d_[i];
    return r;
  }
  Mat scaled(const Elem& s) const {
    Mat r = *this;
    for (auto& x : r.d_) x = s * x;
    return r;
  }
  Mat transpose() const {
    Mat r(cols_, rows_, proto());
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  template <class Fn>
  Mat map(Fn&& fn) const {
    Mat r = *this;
    for (auto& x : r.d_) x = fn(x);
    return r;
  }
  Mat hcat(const Mat& o) const {
    Mat r(rows_, cols_ + o.cols_, proto());
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
      for (int j = 0; j < o.cols_; ++j) r(i, cols_ + j) = o(i, j);
    }
    return r;
  }
  Mat minor(int skip_r, int skip_c) const {
    Mat r(rows_ - 1, cols_ - 1, proto());
    for (int i = 0, ri = 0; i < rows_; ++i) {
      if (i == skip_r) continue;
      for (int j = 0, rj = 0; j < cols_; ++j) {
        if (j == skip_c) continue;
        r(ri, rj++) = (*this)(i, j);
      }
      ++ri;
    }
    return r;
  }

  /// Laplace expansion; n <= 4 here.
  Elem det() const {
    if (rows_ == 1) return d_[0];
    if (rows_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
    Elem acc = proto().zero_like();
    for (int j = 0; j < cols_; ++j) {
      if ((*this)(0, j).is_zero()) continue;
      const Elem t = (*this)(0, j) * minor(0, j).det();
      if (j % 2 == 0) acc += t;
      else acc -= t;
    }
    return acc;
  }
  Mat adjugate() const {
    Mat r(rows_, cols_, proto());
    if (rows_ == 1) {
      r(0, 0) = proto().one_like();
      return r;
    }
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) {
        const Elem c = minor(i, j).det();
        r(j, i) = ((i + j) % 2 == 0) ? c : -c;
      }
    return r;
  }

  bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_; }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < rows_; ++i) {
      if (i) s += ";";
      for (int j = 0; j < cols_; ++j) {
        if (j) s += " ";
        s += (*this)(i, j).to_string();
      }
    }
    return s + "]";
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Elem> d_;
};

}  // namespace dhp
