#pragma once

// Rank and null-space routines for the three scalar backends.
//
//   Rational : fraction-free (Bareiss) elimination on an integer-scaled copy,
//              no tolerance anywhere.
//   ModP     : plain Gaussian elimination over GF(2^61 - 1). A rank computed
//              here is a lower bound on the rank over Q of the preimage.
//   double   : singular values with threshold rel_tol * sigma_max * max_dim.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "doflab/matrix.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

inline constexpr double kDefaultSvdRankTolerance = 1e-9;

namespace detail {

/// Rows scaled by the lcm of their denominators so every entry is an integer.
inline std::vector<std::vector<mpz_class>> integer_rows(const Matrix<Rational>& m) {
  std::vector<std::vector<mpz_class>> out(m.rows(), std::vector<mpz_class>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    mpz_class l = 1;
    for (std::size_t c = 0; c < m.cols(); ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c).get_num() * (l / m(r, c).get_den());
  }
  return out;
}

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

/// Reduced row echelon form over an exact field; returns pivot columns.
template <class F>
std::vector<std::size_t> rref_in_place(Matrix<F>& a) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t p = row;
    while (p < a.rows() && ScalarTraits<F>::is_zero(a(p, col), 0.0)) ++p;
    if (p == a.rows()) continue;
    if (p != row)
      for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(p, c), a(row, c));
    F inv = ScalarTraits<F>::one() / a(row, col);
    for (std::size_t c = col; c < a.cols(); ++c) a(row, c) *= inv;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || ScalarTraits<F>::is_zero(a(r, col), 0.0)) continue;
      F factor = a(r, col);
      for (std::size_t c = col; c < a.cols(); ++c) a(r, c) -= factor * a(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

/// Exact rank of a rational matrix by fraction-free Gaussian elimination.
inline std::size_t rank_exact(const Matrix<Rational>& m) {
  auto a = detail::integer_rows(m);
  const std::size_t rows = m.rows(), cols = m.cols();
  mpz_class prev = 1, t;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        t = a[r][c] * a[i][j];
        t -= a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

inline std::size_t rank_modp(const Matrix<ModP>& m) {
  Matrix<ModP> a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c).v == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t k = c; k < cols; ++k) std::swap(a(p, k), a(r, k));
    ModP inv = a(r, c).inverse();
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (a(i, c).v == 0) continue;
      ModP f = a(i, c) * inv;
      for (std::size_t k = c; k < cols; ++k) a(i, k) -= f * a(r, k);
    }
    ++r;
  }
  return r;
}

inline Eigen::VectorXd singular_values(const Matrix<double>& m) {
  if (m.empty()) return {};
  return Eigen::BDCSVD<Eigen::MatrixXd>(detail::to_eigen(m)).singularValues();
}

inline std::size_t rank_svd(const Matrix<double>& m, double rel_tol = kDefaultSvdRankTolerance) {
  if (m.empty()) return 0;
  Eigen::VectorXd s = singular_values(m);
  double smax = s.size() ? s(0) : 0.0;
  if (smax == 0.0) return 0;
  double thresh = rel_tol * smax * static_cast<double>(std::max(m.rows(), m.cols()));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++r;
  return r;
}

inline std::size_t rank(const Matrix<Rational>& m, double = 0.0) { return rank_exact(m); }
inline std::size_t rank(const Matrix<ModP>& m, double = 0.0) { return rank_modp(m); }
inline std::size_t rank(const Matrix<double>& m, double rel_tol = kDefaultSvdRankTolerance) {
  return rank_svd(m, rel_tol);
}

/// Rows form a basis of { u : u^T A = 0 }.
template <class F>
Matrix<F> left_null_space(const Matrix<F>& a) {
  Matrix<F> t = a.transpose();  // null(A^T) = left null(A)
  auto pivots = detail::rref_in_place(t);
  const std::size_t n = t.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free.push_back(c);
  Matrix<F> basis(free.size(), n);
  for (std::size_t k = 0; k < free.size(); ++k) {
    basis(k, free[k]) = ScalarTraits<F>::one();
    for (std::size_t i = 0; i < pivots.size(); ++i) basis(k, pivots[i]) = -t(i, free[k]);
  }
  return basis;
}

template <>
inline Matrix<double> left_null_space(const Matrix<double>& a) {
  const std::size_t m = a.rows();
  if (a.cols() == 0) return Matrix<double>::identity(m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_eigen(a), Eigen::ComputeFullU);
  std::size_t r = rank_svd(a);
  const Eigen::MatrixXd& u = svd.matrixU();
  Matrix<double> basis(m - r, m);
  for (std::size_t k = r; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i) basis(k - r, i) = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  return basis;
}

}  // namespace doflab
