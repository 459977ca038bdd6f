#include "mlnmf/transfer.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace mlnmf {

void TransferOperator::normalize_row(std::size_t i) {
  double s = 0.0;
  for (const auto& e : rows_[i]) s += e.weight;
  if (s <= 0.0)
    throw std::invalid_argument("TransferOperator: empty or zero row");
  for (auto& e : rows_[i]) e.weight /= s;
}

Matrix TransferOperator::apply(const Matrix& X) const {
  if (X.rows() != in_dim_)
    throw std::invalid_argument("TransferOperator::apply: dimension mismatch");
  const std::size_t n = X.cols();
  Matrix Y(out_dim_, n);
  const std::int64_t out = static_cast<std::int64_t>(out_dim_);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < out; ++i) {
    double* yi = Y.data() + static_cast<std::size_t>(i) * n;
    for (const auto& e : rows_[static_cast<std::size_t>(i)]) {
      const double w = e.weight;
      const double* xr = X.data() + e.index * n;
      for (std::size_t j = 0; j < n; ++j) yi[j] += w * xr[j];
    }
  }
  return Y;
}

double TransferOperator::row_sum(std::size_t i) const {
  double s = 0.0;
  for (const auto& e : rows_[i]) s += e.weight;
  return s;
}

double TransferOperator::frobenius_norm() const {
  double s = 0.0;
  for (const auto& row : rows_)
    for (const auto& e : row) s += e.weight * e.weight;
  return std::sqrt(s);
}

Matrix TransferOperator::to_dense() const {
  Matrix D(out_dim_, in_dim_);
  for (std::size_t i = 0; i < out_dim_; ++i)
    for (const auto& e : rows_[i]) D(i, e.index) += e.weight;
  return D;
}

ImageGrid coarsen_grid(const ImageGrid& g) {
  if (g.height < 2 || g.width < 2)
    throw std::invalid_argument("coarsen_grid: grid below 2x2 cannot be coarsened");
  return {(g.height + 1) / 2, (g.width + 1) / 2};
}

TransferOperator build_restriction(const ImageGrid& fine) {
  const ImageGrid coarse = coarsen_grid(fine);
  TransferOperator op(coarse.pixels(), fine.pixels());
  for (std::size_t cj = 0; cj < coarse.width; ++cj) {
    for (std::size_t ci = 0; ci < coarse.height; ++ci) {
      const std::size_t row = coarse.index(ci, cj);
      const long fi = 2 * static_cast<long>(ci);
      const long fj = 2 * static_cast<long>(cj);
      for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          const long i = fi + di, j = fj + dj;
          if (i < 0 || j < 0 || i >= static_cast<long>(fine.height) ||
              j >= static_cast<long>(fine.width))
            continue;
          const double w = (di == 0 && dj == 0) ? 4.0
                           : (di == 0 || dj == 0) ? 2.0
                                                  : 1.0;
          op.add_entry(row, fine.index(i, j), w / 16.0);
        }
      }
      op.normalize_row(row);
    }
  }
  return op;
}

namespace {
// rd(k/2) clipped to [0, limit)
inline void rd_half(std::size_t k, std::size_t limit, std::size_t out[2],
                    std::size_t& count) {
  count = 0;
  if (k % 2 == 0) {
    if (k / 2 < limit) out[count++] = k / 2;
  } else {
    if ((k - 1) / 2 < limit) out[count++] = (k - 1) / 2;
    if ((k + 1) / 2 < limit) out[count++] = (k + 1) / 2;
  }
}
}  // namespace

TransferOperator build_prolongation(const ImageGrid& fine) {
  const ImageGrid coarse = coarsen_grid(fine);
  TransferOperator op(fine.pixels(), coarse.pixels());
  for (std::size_t j = 0; j < fine.width; ++j) {
    std::size_t js[2], jn;
    rd_half(j, coarse.width, js, jn);
    for (std::size_t i = 0; i < fine.height; ++i) {
      std::size_t is[2], in;
      rd_half(i, coarse.height, is, in);
      const std::size_t row = fine.index(i, j);
      const double w = 1.0 / static_cast<double>(in * jn);
      for (std::size_t a = 0; a < in; ++a)
        for (std::size_t b = 0; b < jn; ++b)
          op.add_entry(row, coarse.index(is[a], js[b]), w);
    }
  }
  return op;
}

Matrix restrict_columns(const TransferOperator& op, const Matrix& X) {
  return op.apply(X);
}

Matrix prolong_columns(const TransferOperator& op, const Matrix& X) {
  return op.apply(X);
}

double smoothness(const Matrix& M, const TransferOperator& R,
                  const TransferOperator& P) {
  const double norm = frobenius_norm(M);
  if (norm <= 0.0)
    throw std::invalid_argument("smoothness: undefined for the zero matrix");
  const Matrix rec = P.apply(R.apply(M));
  double s = 0.0;
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) {
      const double d = M(i, j) - rec(i, j);
      s += d * d;
    }
  return std::sqrt(s) / norm;
}

BoundCheck initialization_bound(const Matrix& M, const TransferOperator& R,
                                const TransferOperator& P,
                                const Matrix& V_coarse, const Matrix& W) {
  const Matrix V_fine = P.apply(V_coarse);
  const double lhs = frobenius_error(M, V_fine, W);
  const Matrix RM = R.apply(M);
  const double coarse_err = frobenius_error(RM, V_coarse, W);
  const double s_M = smoothness(M, R, P);
  const double rhs = s_M * frobenius_norm(M) + P.frobenius_norm() * coarse_err;
  return {lhs, rhs};
}

GridHierarchy GridHierarchy::build(const Matrix& M, const ImageGrid& grid,
                                   std::size_t level_count) {
  if (level_count < 1)
    throw std::invalid_argument("GridHierarchy: need at least one level");
  if (grid.pixels() != M.rows())
    throw std::invalid_argument("GridHierarchy: grid does not match matrix rows");
  GridHierarchy h;
  h.levels.push_back(grid);
  h.restricted_data.push_back(M);
  for (std::size_t l = 0; l + 1 < level_count; ++l) {
    const ImageGrid& cur = h.levels[l];
    if (cur.height < 2 || cur.width < 2)
      throw std::invalid_argument("GridHierarchy: too many levels for this grid");
    h.restrictions.push_back(build_restriction(cur));
    h.prolongations.push_back(build_prolongation(cur));
    h.levels.push_back(coarsen_grid(cur));
    h.restricted_data.push_back(h.restrictions.back().apply(h.restricted_data[l]));
  }
  return h;
}

}  // namespace mlnmf
