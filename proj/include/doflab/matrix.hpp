#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doflab/scalar.hpp"

namespace doflab {

/// Dense row-major matrix over any of the doflab scalar types.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, ScalarTraits<T>::zero()) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ScalarTraits<T>::one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<T>& data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix operator+(const Matrix& o) const {
    check_same_shape(o);
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + o.data_[i];
    return out;
  }

  Matrix operator-(const Matrix& o) const {
    check_same_shape(o);
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - o.data_[i];
    return out;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_)
      throw std::invalid_argument("matrix product shape mismatch: " + shape() + " * " + o.shape());
    Matrix out(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(r, k);
        if (ScalarTraits<T>::is_zero(a, 0.0)) continue;
        for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
      }
    }
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  std::size_t count_nonzero() const {
    std::size_t n = 0;
    for (const auto& x : data_)
      if (!ScalarTraits<T>::is_zero(x, 0.0)) ++n;
    return n;
  }

  /// Largest entry magnitude (for exact types: 1 if any entry is nonzero).
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, ScalarTraits<T>::magnitude(x));
    return m;
  }

  bool is_zero(double tol = 0.0) const {
    for (const auto& x : data_)
      if (!ScalarTraits<T>::is_zero(x, tol)) return false;
    return true;
  }

  template <class U, class F>
  Matrix<U> map(F&& f) const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = f((*this)(r, c));
    return out;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("shape mismatch: " + shape() + " vs " + o.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// [A B ...] side by side; all blocks must share a row count.
template <class T>
Matrix<T> hstack(const std::vector<Matrix<T>>& blocks) {
  if (blocks.empty()) return {};
  std::size_t rows = blocks.front().rows(), cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw std::invalid_argument("hstack row mismatch");
    cols += b.cols();
  }
  Matrix<T> out(rows, cols);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, off + c) = b(r, c);
    off += b.cols();
  }
  return out;
}

/// Maps an exact rational matrix into another scalar type.
template <class U>
Matrix<U> convert(const Matrix<Rational>& m) {
  return m.template map<U>([](const Rational& x) { return ScalarTraits<U>::from_rational(x); });
}

inline Matrix<double> to_double_matrix(const Matrix<Rational>& m) { return convert<double>(m); }

}  // namespace doflab
