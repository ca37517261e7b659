#include <gtest/gtest.h>

#include "support.hpp"

using namespace ddw;
using linalg::Matrix;

namespace {
Matrix from(std::initializer_list<std::initializer_list<int>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (int v : r) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}
}  // namespace

TEST(Linalg, RankAndNullspace) {
  Matrix m = from({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  EXPECT_EQ(linalg::rank(m), 2u);
  auto ns = linalg::nullspace(m);
  ASSERT_EQ(ns.size(), 1u);
  Matrix v(3, 1);
  for (std::size_t i = 0; i < 3; ++i) v(i, 0) = ns[0][i];
  EXPECT_TRUE((m * v).is_zero());
}

TEST(Linalg, PseudoInverseOfSingularMatrix) {
  Matrix m = from({{1, 1}, {1, 1}});
  Matrix p = linalg::pseudo_inverse(m);
  EXPECT_EQ(p(0, 0), Rational(1, 4));
  EXPECT_TRUE((m * p * m - m).is_zero());
  EXPECT_TRUE((p * m * p - p).is_zero());
}

TEST(Linalg, PseudoInverseOfRectangular) {
  Matrix m = from({{1, 0, 1}, {0, 1, 1}});
  Matrix p = linalg::pseudo_inverse(m);
  EXPECT_TRUE((m * p - Matrix::identity(2)).is_zero());
  EXPECT_TRUE(((p * m).transpose() - p * m).is_zero());
}

TEST(Linalg, SolveSquare) {
  auto x = linalg::solve_square(from({{2, 1}, {1, 3}}), {Rational(3), Rational(5)});
  EXPECT_EQ(x[0], Rational(4, 5));
  EXPECT_EQ(x[1], Rational(7, 5));
}

TEST(Linalg, MinimalNormSolution) {
  // x + y = 2 has minimal-norm solution (1, 1)
  std::vector<linalg::SparseRow> rows{{{0, Rational(1)}, {1, Rational(1)}}};
  auto x = linalg::min_norm_solution(rows, {Rational(2)}, 2);
  EXPECT_EQ(x[0], Rational(1));
  EXPECT_EQ(x[1], Rational(1));
}

TEST(Linalg, MinimalNormRedundantRows) {
  std::vector<linalg::SparseRow> rows{{{0, Rational(1)}, {2, Rational(1)}}, {{0, Rational(2)}, {2, Rational(2)}}};
  auto x = linalg::min_norm_solution(rows, {Rational(4), Rational(8)}, 3);
  EXPECT_EQ(x[0], Rational(2));
  EXPECT_EQ(x[1], Rational(0));
  EXPECT_EQ(x[2], Rational(2));
}

TEST(Linalg, InconsistentSystemThrows) {
  std::vector<linalg::SparseRow> rows{{{0, Rational(1)}}, {{0, Rational(1)}}};
  EXPECT_THROW(linalg::min_norm_solution(rows, {Rational(1), Rational(2)}, 1), NoSolution);
}
