#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mql/coeff_algebra.hpp"
#include "mql/hurwitz.hpp"

namespace mql {

/// Quaternion with rational coordinates in the basis {1, i, j, ij}. Needed
/// where inverses leave the order, e.g. (1+i)^{-1} = (1-i)/2.
class RationalQuaternion {
 public:
  RationalQuaternion() = default;
  RationalQuaternion(Rational x, Rational y, Rational z, Rational w) : c_{x, y, z, w} {}
  explicit RationalQuaternion(const HurwitzQuaternion& q)
      : c_{Rational(q[0], 2), Rational(q[1], 2), Rational(q[2], 2), Rational(q[3], 2)} {
    for (auto& v : c_) v.canonicalize();
  }

  const Rational& operator[](std::size_t k) const { return c_[k]; }
  bool is_zero() const { return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0; }

  RationalQuaternion conjugate() const { return {c_[0], -c_[1], -c_[2], -c_[3]}; }
  Rational norm() const { return c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2] + c_[3] * c_[3]; }
  RationalQuaternion inverse() const {
    const Rational n = norm();
    if (n == 0) throw std::domain_error("inverse of the zero quaternion");
    const auto b = conjugate();
    return {b[0] / n, b[1] / n, b[2] / n, b[3] / n};
  }

  friend RationalQuaternion operator+(const RationalQuaternion& x, const RationalQuaternion& y) {
    return {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]};
  }
  friend RationalQuaternion operator-(const RationalQuaternion& x, const RationalQuaternion& y) {
    return {x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]};
  }
  friend RationalQuaternion operator*(const RationalQuaternion& x, const RationalQuaternion& y) {
    return {x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
            x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
            x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0]};
  }
  friend bool operator==(const RationalQuaternion& x, const RationalQuaternion& y) { return x.c_ == y.c_; }

 private:
  std::array<Rational, 4> c_{};
};

std::string to_string(const RationalQuaternion& q);

inline Rational inverse(const Rational& x) {
  if (x == 0) throw std::domain_error("inverse of zero");
  return 1 / x;
}
inline RationalQuaternion inverse(const RationalQuaternion& x) { return x.inverse(); }
inline bool is_zero(const Rational& x) { return x == 0; }
inline bool is_zero(const RationalQuaternion& x) { return x.is_zero(); }

/// Square matrix over a (possibly non-commutative) division ring.
template <class T>
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n, const T& zero = T()) : n_(n), a_(n * n, zero), zero_(zero) {}

  static SquareMatrix diagonal(const std::vector<T>& d, const T& zero = T()) {
    SquareMatrix m(d.size(), zero);
    for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
    return m;
  }
  /// 1 on the antidiagonal.
  static SquareMatrix antidiagonal(std::size_t n, const T& one, const T& zero = T()) {
    SquareMatrix m(n, zero);
    for (std::size_t k = 0; k < n; ++k) m(k, n - 1 - k) = one;
    return m;
  }

  std::size_t size() const { return n_; }
  T& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

  friend SquareMatrix operator*(const SquareMatrix& x, const SquareMatrix& y) {
    if (x.n_ != y.n_) throw std::invalid_argument("matrix size mismatch");
    SquareMatrix out(x.n_, x.zero_);
    for (std::size_t r = 0; r < x.n_; ++r) {
      for (std::size_t c = 0; c < x.n_; ++c) {
        T acc = x.zero_;
        for (std::size_t k = 0; k < x.n_; ++k) acc = acc + x(r, k) * y(k, c);
        out(r, c) = acc;
      }
    }
    return out;
  }
  friend bool operator==(const SquareMatrix& x, const SquareMatrix& y) { return x.n_ == y.n_ && x.a_ == y.a_; }

  /// Gauss-Jordan with row operations applied on the left, valid over
  /// non-commutative rings. Throws std::domain_error when singular.
  SquareMatrix inverse(const T& one) const {
    SquareMatrix left = *this;
    SquareMatrix right = diagonal(std::vector<T>(n_, one), zero_);
    for (std::size_t col = 0; col < n_; ++col) {
      std::size_t pivot = col;
      while (pivot < n_ && is_zero(left(pivot, col))) ++pivot;
      if (pivot == n_) throw std::domain_error("singular matrix");
      if (pivot != col) {
        for (std::size_t c = 0; c < n_; ++c) {
          std::swap(left(pivot, c), left(col, c));
          std::swap(right(pivot, c), right(col, c));
        }
      }
      const T inv = mql::inverse(left(col, col));
      for (std::size_t c = 0; c < n_; ++c) {
        left(col, c) = inv * left(col, c);
        right(col, c) = inv * right(col, c);
      }
      for (std::size_t r = 0; r < n_; ++r) {
        if (r == col || is_zero(left(r, col))) continue;
        const T f = left(r, col);
        for (std::size_t c = 0; c < n_; ++c) {
          left(r, c) = left(r, c) - f * left(col, c);
          right(r, c) = right(r, c) - f * right(col, c);
        }
      }
    }
    return right;
  }

 private:
  std::size_t n_;
  std::vector<T> a_;
  T zero_;
};

template <class T>
std::string to_string(const SquareMatrix<T>& m) {
  std::string out = "[";
  for (std::size_t r = 0; r < m.size(); ++r) {
    out += r ? ";" : "";
    for (std::size_t c = 0; c < m.size(); ++c) {
      out += c ? "," : "";
      out += to_string(m(r, c));
    }
  }
  return out + "]";
}

}  // namespace mql
