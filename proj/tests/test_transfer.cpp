#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mlnmf/transfer.hpp"

using namespace mlnmf;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < M.size(); ++i) M.data()[i] = rng.next_uniform();
  return M;
}

// The explicit 4x9 restriction for the 3x3 -> 2x2 case.
Matrix golden_restriction_3x3() {
  std::vector<double> d = {
      4, 2, 0, 2, 1, 0, 0, 0, 0,  //
      0, 2, 4, 0, 1, 2, 0, 0, 0,  //
      0, 0, 0, 2, 1, 0, 4, 2, 0,  //
      0, 0, 0, 0, 1, 2, 0, 2, 4};
  for (double& v : d) v /= 9.0;
  return Matrix::from_data(4, 9, std::move(d));
}

}  // namespace

TEST_CASE("coarsen_grid ceil rule") {
  CHECK(coarsen_grid({3, 3}).height == 2);
  CHECK(coarsen_grid({3, 3}).width == 2);
  CHECK(coarsen_grid({112, 92}).height == 56);
  CHECK(coarsen_grid({112, 92}).width == 46);
  CHECK(coarsen_grid({2, 2}).height == 1);
  CHECK_THROWS_AS(coarsen_grid({1, 5}), std::invalid_argument);
}

TEST_CASE("power-of-two-plus-one sizes follow the level formula") {
  const std::size_t a = 5, b = 4;
  ImageGrid g{(1u << a) + 1, (1u << b) + 1};
  for (std::size_t l = 1; l < 4; ++l) {
    CHECK(g.height == (1u << (a - l + 1)) + 1);
    CHECK(g.width == (1u << (b - l + 1)) + 1);
    g = coarsen_grid(g);
  }
}

TEST_CASE("restriction matches the explicit 3x3 matrix") {
  const TransferOperator R = build_restriction({3, 3});
  const Matrix golden = golden_restriction_3x3();
  const Matrix dense = R.to_dense();
  REQUIRE(dense.rows() == 4);
  REQUIRE(dense.cols() == 9);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 9; ++j)
      CHECK(dense(i, j) == doctest::Approx(golden(i, j)).epsilon(1e-12));
}

TEST_CASE("prolongation matches the explicit 3x3 matrix (transpose, scaled)") {
  const TransferOperator P = build_prolongation({3, 3});
  const Matrix golden = golden_restriction_3x3();  // P^T = (9/4) * R row-wise
  const Matrix dense = P.to_dense();
  REQUIRE(dense.rows() == 9);
  REQUIRE(dense.cols() == 4);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(dense(i, j) ==
            doctest::Approx(golden(j, i) * 9.0 / 4.0).epsilon(1e-12));
  // fine corner maps straight to the coarse corner
  CHECK(dense(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("interior restriction stencil on a 5x5 grid") {
  const TransferOperator R = build_restriction({5, 5});
  const ImageGrid fine{5, 5};
  const ImageGrid coarse{3, 3};
  const auto& row = R.row_entries(coarse.index(1, 1));
  REQUIRE(row.size() == 9);
  double center = 0, edge = 0, corner = 0;
  for (const auto& e : row) {
    if (e.index == fine.index(2, 2)) center = e.weight;
    if (e.index == fine.index(1, 2)) edge = e.weight;
    if (e.index == fine.index(1, 1)) corner = e.weight;
  }
  CHECK(center == doctest::Approx(4.0 / 16.0).epsilon(1e-12));
  CHECK(edge == doctest::Approx(2.0 / 16.0).epsilon(1e-12));
  CHECK(corner == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("operator rows are nonnegative and sum to 1 for all sizes 2..33") {
  for (std::size_t h = 2; h <= 33; ++h) {
    for (std::size_t w = 2; w <= 33; ++w) {
      const TransferOperator R = build_restriction({h, w});
      const TransferOperator P = build_prolongation({h, w});
      for (const TransferOperator* op : {&R, &P}) {
        for (std::size_t i = 0; i < op->out_dim(); ++i) {
          CHECK(op->row_sum(i) == doctest::Approx(1.0).epsilon(1e-12));
          for (const auto& e : op->row_entries(i)) CHECK(e.weight >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("restrict on a worked 3x3 example image") {
  const TransferOperator R = build_restriction({3, 3});
  // image [[1,2,3],[4,5,6],[7,8,9]] column-vectorized
  const Matrix x = Matrix::from_data(9, 1, {1, 4, 7, 2, 5, 8, 3, 6, 9});
  const Matrix y = restrict_columns(R, x);
  REQUIRE(y.rows() == 4);
  CHECK(y(0, 0) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(y(1, 0) == doctest::Approx(19.0 / 3.0).epsilon(1e-12));
  CHECK(y(2, 0) == doctest::Approx(11.0 / 3.0).epsilon(1e-12));
  CHECK(y(3, 0) == doctest::Approx(23.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("constants and zeros are fixed points of the transfers") {
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{3, 3}, {8, 6}, {13, 9}}) {
    const TransferOperator R = build_restriction({h, w});
    const TransferOperator P = build_prolongation({h, w});
    const Matrix ones(h * w, 2, 1.0);
    const Matrix rc = restrict_columns(R, ones);
    for (std::size_t i = 0; i < rc.size(); ++i)
      CHECK(rc.data()[i] == doctest::Approx(1.0).epsilon(1e-12));
    const Matrix back = prolong_columns(P, rc);
    for (std::size_t i = 0; i < back.size(); ++i)
      CHECK(back.data()[i] == doctest::Approx(1.0).epsilon(1e-12));
    const Matrix zeros(h * w, 2, 0.0);
    const Matrix rz = restrict_columns(R, zeros);
    CHECK(frobenius_norm(rz) == 0.0);
  }
}

TEST_CASE("prolongation of a 2x2 coarse image fills the 3x3 center with the mean") {
  const TransferOperator P = build_prolongation({3, 3});
  const Matrix coarse = Matrix::from_data(4, 1, {1, 2, 3, 4});
  const Matrix fine = prolong_columns(P, coarse);
  CHECK(fine(ImageGrid{3, 3}.index(1, 1), 0) == doctest::Approx(2.5));
}

TEST_CASE("transfers preserve nonnegativity on random data") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 2 + rng.next_u64() % 20;
    const std::size_t w = 2 + rng.next_u64() % 20;
    const Matrix X = random_matrix(h * w, 3, rng);
    const TransferOperator R = build_restriction({h, w});
    const TransferOperator P = build_prolongation({h, w});
    CHECK(restrict_columns(R, X).is_nonnegative());
    CHECK(prolong_columns(P, restrict_columns(R, X)).is_nonnegative());
  }
}

TEST_CASE("smoothness") {
  const TransferOperator R = build_restriction({3, 3});
  const TransferOperator P = build_prolongation({3, 3});
  const Matrix ones(9, 4, 1.0);
  CHECK(smoothness(ones, R, P) == doctest::Approx(0.0));
  CHECK_THROWS_AS(smoothness(Matrix(9, 4, 0.0), R, P), std::invalid_argument);

  // checkerboard, value checked against a dense mat-vec oracle built from
  // the explicit operator matrices
  std::vector<double> cb(9);
  const ImageGrid g{3, 3};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) cb[g.index(i, j)] = (i + j) % 2;
  const Matrix M = Matrix::from_data(9, 1, cb);
  const Matrix Rd = R.to_dense();
  const Matrix Pd = P.to_dense();
  // oracle: P * (R * m) with plain loops
  std::vector<double> rm(4, 0.0), prm(9, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 9; ++j) rm[i] += Rd(i, j) * cb[j];
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 4; ++j) prm[i] += Pd(i, j) * rm[j];
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 9; ++i) {
    num += (cb[i] - prm[i]) * (cb[i] - prm[i]);
    den += cb[i] * cb[i];
  }
  CHECK(smoothness(M, R, P) ==
        doctest::Approx(std::sqrt(num) / std::sqrt(den)).epsilon(1e-12));
}

TEST_CASE("initialization bound holds on seeded instances") {
  const ImageGrid fine{3, 3};
  const TransferOperator R = build_restriction(fine);
  const TransferOperator P = build_prolongation(fine);
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix M = random_matrix(9, 5, rng);
    const Matrix Vc = random_matrix(4, 2, rng);
    const Matrix W = random_matrix(2, 5, rng);
    const auto [lhs, rhs] = initialization_bound(M, R, P, Vc, W);
    CHECK(lhs <= rhs + 1e-9 * rhs);
  }

  // V'W = R(M) exactly (rank-1 coarse data) -> lhs bounded by s_M ||M||_F
  const Matrix col = random_matrix(9, 1, rng);
  Matrix M(9, 3);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 3; ++j) M(i, j) = col(i, 0);
  const Matrix Mc = R.apply(M);
  Matrix Vc(4, 1);
  for (std::size_t i = 0; i < 4; ++i) Vc(i, 0) = Mc(i, 0);
  const Matrix W(1, 3, 1.0);
  const auto [lhs, rhs] = initialization_bound(M, R, P, Vc, W);
  CHECK(lhs <= smoothness(M, R, P) * frobenius_norm(M) + 1e-9);

  // constant M with exact coarse factorization -> lhs = 0
  const Matrix C(9, 3, 0.5);
  const Matrix Cc = R.apply(C);
  Matrix Vc2(4, 1);
  for (std::size_t i = 0; i < 4; ++i) Vc2(i, 0) = Cc(i, 0);
  const auto [lhs2, rhs2] = initialization_bound(C, R, P, Vc2, Matrix(1, 3, 1.0));
  CHECK(lhs2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rhs2 >= lhs2);
}

TEST_CASE("hierarchy caches restrictions once per level") {
  Rng rng(33);
  const ImageGrid grid{9, 9};
  const Matrix M = random_matrix(81, 4, rng);
  const GridHierarchy h = GridHierarchy::build(M, grid, 3);
  REQUIRE(h.levels.size() == 3);
  CHECK(h.levels[1].height == 5);
  CHECK(h.levels[2].height == 3);
  const Matrix r1 = h.restrictions[0].apply(M);
  const Matrix r2 = h.restrictions[1].apply(r1);
  for (std::size_t i = 0; i < r1.size(); ++i)
    CHECK(h.restricted_data[1].data()[i] == r1.data()[i]);
  for (std::size_t i = 0; i < r2.size(); ++i)
    CHECK(h.restricted_data[2].data()[i] == r2.data()[i]);
  CHECK_THROWS_AS(GridHierarchy::build(M, grid, 6), std::invalid_argument);
}
