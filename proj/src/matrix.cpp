#include "mlnmf/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "mlnmf/kernels.hpp"

namespace mlnmf {

Matrix Matrix::from_data(std::size_t rows, std::size_t cols,
                         std::vector<double> data) {
  if (rows == 0 || cols == 0 || data.size() != rows * cols)
    throw std::invalid_argument("Matrix::from_data: bad dimensions");
  for (double v : data)
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("Matrix::from_data: negative or non-finite entry");
  Matrix M;
  M.rows_ = rows;
  M.cols_ = cols;
  M.data_ = std::move(data);
  return M;
}

bool Matrix::is_nonnegative() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v >= 0.0; });
}

double Matrix::min_entry() const {
  return *std::min_element(data_.begin(), data_.end());
}

double Matrix::max_entry() const {
  return *std::max_element(data_.begin(), data_.end());
}

double frobenius_error(const Matrix& M, const Matrix& V, const Matrix& W) {
  const auto col_sq = kernels::column_sq_errors(M, V, W);
  double s = 0.0;
  for (double v : col_sq) s += v;
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& A) {
  double s = 0.0;
  const double* p = A.data();
  for (std::size_t i = 0; i < A.size(); ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

std::pair<Matrix, Matrix> random_init(std::size_t m, std::size_t n,
                                      std::size_t r, std::uint64_t seed) {
  if (r < 1 || r > std::min(m, n))
    throw std::invalid_argument("random_init: rank must satisfy 1 <= r <= min(m,n)");
  Rng rng(seed);
  Matrix V(m, r), W(r, n);
  for (std::size_t i = 0; i < V.size(); ++i) V.data()[i] = rng.next_uniform();
  for (std::size_t i = 0; i < W.size(); ++i) W.data()[i] = rng.next_uniform();
  return {std::move(V), std::move(W)};
}

}  // namespace mlnmf
