#include <gtest/gtest.h>

#include <random>

#include "doflab/linalg.hpp"
#include "test_util.hpp"

using namespace doflab;

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(format_rational(Rational(3)), "3/1");
  EXPECT_EQ(format_rational(parse_rational("-4/6")), "-2/3");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x/2"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
}

TEST(ModP, FieldAxioms) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    ModP a(rng()), b(rng());
    if (b.v == 0) continue;
    EXPECT_EQ((a / b) * b, a);
    EXPECT_EQ(a - a, ModP(0));
    EXPECT_EQ(a * ModP(1), a);
  }
  EXPECT_EQ(ModP::from_rational(Rational(1, 2)) * ModP(2), ModP(1));
  EXPECT_EQ(ModP::from_rational(Rational(-3)), ModP(0) - ModP(3));
}

TEST(Rank, IdentityIsFull) {
  auto id = Matrix<Rational>::identity(3);
  EXPECT_EQ(rank_exact(id), 3u);
  EXPECT_EQ(rank_modp(convert<ModP>(id)), 3u);
  EXPECT_EQ(rank_svd(to_double_matrix(id)), 3u);
}

TEST(Rank, RepeatedColumnIsDeficient) {
  Matrix<Rational> m(3, 3);
  m(0, 0) = 1; m(1, 0) = 2; m(2, 0) = Rational(1, 3);
  m(0, 1) = 4; m(1, 1) = -1; m(2, 1) = 5;
  for (int r = 0; r < 3; ++r) m(r, 2) = m(r, 0);
  EXPECT_EQ(rank_exact(m), 2u);
  EXPECT_LT(rank_exact(m), m.cols());
}

TEST(Rank, EmptyAndZero) {
  EXPECT_EQ(rank_exact(Matrix<Rational>(0, 4)), 0u);
  EXPECT_EQ(rank_exact(Matrix<Rational>(3, 4)), 0u);
  EXPECT_EQ(rank_svd(Matrix<double>(3, 4)), 0u);
}

// Exact rank, prime-field rank and SVD rank agree on matrices of known rank.
TEST(Rank, BackendsAgreeOnRandomLowRank) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    std::size_t r = static_cast<std::size_t>(t % 11);
    auto m = testutil::random_rank_matrix(rng, 10, 10, r);
    const auto exact = rank_exact(m);
    EXPECT_EQ(exact, r) << "trial " << t;
    EXPECT_EQ(rank_modp(convert<ModP>(m)), exact) << "trial " << t;
    EXPECT_EQ(rank_svd(to_double_matrix(m)), exact) << "trial " << t;
  }
}

TEST(NullSpace, LeftNullSpaceAnnihilatesExact) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    auto a = testutil::random_rank_matrix(rng, 8, 5, 1 + t % 5);
    auto u = left_null_space(a);
    EXPECT_EQ(u.rows(), 8 - rank_exact(a));
    EXPECT_TRUE((u * a).is_zero());
    EXPECT_EQ(rank_exact(u), u.rows());
    auto up = left_null_space(convert<ModP>(a));
    EXPECT_EQ(up.rows(), u.rows());
    EXPECT_TRUE((up * convert<ModP>(a)).is_zero());
  }
}

TEST(NullSpace, FloatMatchesExactDimension) {
  std::mt19937_64 rng(8);
  auto a = testutil::random_rank_matrix(rng, 9, 6, 4);
  auto u = left_null_space(to_double_matrix(a));
  EXPECT_EQ(u.rows(), 5u);
  EXPECT_LT((u * to_double_matrix(a)).max_abs(), 1e-9 * std::max(1.0, to_double_matrix(a).max_abs()));
}

TEST(Matrix, ShapeErrors) {
  Matrix<double> a(2, 3), b(2, 3);
  EXPECT_THROW(a * b, std::invalid_argument);
  EXPECT_NO_THROW(a + b);
  EXPECT_THROW(hstack(std::vector<Matrix<double>>{a, Matrix<double>(3, 1)}), std::invalid_argument);
}

TEST(Rational, MakeRationalReduces) {
  EXPECT_EQ(make_rational(2, 4), Rational(1, 2));
  EXPECT_EQ(make_rational(4, 4) + make_rational(0, 4), Rational(1));
  EXPECT_EQ(make_rational(3, -6), Rational(-1, 2));
  EXPECT_THROW(make_rational(1, 0), std::invalid_argument);
}
