#ifndef MLNMF_TRANSFER_HPP_
#define MLNMF_TRANSFER_HPP_

#include <cstddef>
#include <vector>

#include "mlnmf/matrix.hpp"

namespace mlnmf {

/// Pixel grid of one pyramid level. Images are vectorized by column
/// concatenation: pixel (i, j) maps to index j * height + i.
struct ImageGrid {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t pixels() const { return height * width; }
  std::size_t index(std::size_t i, std::size_t j) const {
    return j * height + i;
  }
};

/// Sparse nonnegative row-stochastic operator between pixel spaces.
/// Restriction rows have at most 9 entries (full-weighting stencil),
/// prolongation rows at most 4 (neighbor mean).
class TransferOperator {
 public:
  struct Entry {
    std::size_t index;
    double weight;
  };

  TransferOperator(std::size_t out_dim, std::size_t in_dim)
      : out_dim_(out_dim), in_dim_(in_dim), rows_(out_dim) {}

  std::size_t out_dim() const { return out_dim_; }
  std::size_t in_dim() const { return in_dim_; }
  const std::vector<Entry>& row_entries(std::size_t i) const { return rows_[i]; }

  void add_entry(std::size_t row, std::size_t col, double weight) {
    rows_[row].push_back({col, weight});
  }
  // Scales row `i` so its weights sum to 1.
  void normalize_row(std::size_t i);

  /// Applies the operator to every column of X (X.rows() == in_dim).
  Matrix apply(const Matrix& X) const;

  double row_sum(std::size_t i) const;
  double frobenius_norm() const;
  /// Dense materialization, for golden tests against the explicit matrices.
  Matrix to_dense() const;

 private:
  std::size_t out_dim_, in_dim_;
  std::vector<std::vector<Entry>> rows_;
};

/// Keep one of every two points per direction: coarse (i,j) sits at fine
/// (2i,2j); coarse size is ceil(fine/2). Throws if the grid is below 2x2.
ImageGrid coarsen_grid(const ImageGrid& g);

/// Full-weighting restriction: interior weights 4/16 center, 2/16 edges,
/// 1/16 corners; boundary rows drop out-of-range entries and renormalize.
TransferOperator build_restriction(const ImageGrid& fine);

/// Neighbor-mean prolongation: fine (i,j) takes the mean over coarse
/// rd(i/2) x rd(j/2), index sets clipped to the coarse grid.
TransferOperator build_prolongation(const ImageGrid& fine);

Matrix restrict_columns(const TransferOperator& op, const Matrix& X);
Matrix prolong_columns(const TransferOperator& op, const Matrix& X);

/// s_M = ||M - P(R(M))||_F / ||M||_F. Throws on a zero matrix.
double smoothness(const Matrix& M, const TransferOperator& R,
                  const TransferOperator& P);

struct BoundCheck {
  double lhs;  // ||M - P(V')W||_F
  double rhs;  // s_M ||M||_F + ||P||_F ||R(M) - V'W||_F
};

/// Both sides of the coarse-initialization error bound; lhs <= rhs holds for
/// any conformable inputs.
BoundCheck initialization_bound(const Matrix& M, const TransferOperator& R,
                                const TransferOperator& P,
                                const Matrix& V_coarse, const Matrix& W);

/// Pyramid of grids with cached operators and restricted data. Restrictions
/// of M are computed once per level and reused by every cycle.
struct GridHierarchy {
  std::vector<ImageGrid> levels;                 // [0] = finest
  std::vector<TransferOperator> restrictions;    // level l -> l+1
  std::vector<TransferOperator> prolongations;   // level l+1 -> l
  std::vector<Matrix> restricted_data;           // M, R(M), R(R(M)), ...

  static GridHierarchy build(const Matrix& M, const ImageGrid& grid,
                             std::size_t level_count);
};

}  // namespace mlnmf

#endif  // MLNMF_TRANSFER_HPP_
