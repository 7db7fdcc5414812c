#pragma once

#include <random>

#include "doflab/matrix.hpp"
#include "doflab/scalar.hpp"

namespace testutil {

using doflab::Matrix;
using doflab::Rational;

inline Rational small_rational(std::mt19937_64& rng, int q = 8) {
  std::uniform_int_distribution<long> num(-3L * q, 3L * q);
  std::uniform_int_distribution<long> den(1, q);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

/// rows x cols rational matrix of rank at most r, built as a product of random factors.
inline Matrix<Rational> random_rank_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t r) {
  Matrix<Rational> a(rows, r), b(r, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < r; ++j) a(i, j) = small_rational(rng);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = small_rational(rng);
  return a * b;
}

}  // namespace testutil
