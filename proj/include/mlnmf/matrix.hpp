#ifndef MLNMF_MATRIX_HPP_
#define MLNMF_MATRIX_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mlnmf {

// Raised by dataset ingestion on malformed or inconsistent input.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the NNLS active-set loop exceeds its exchange cap.
class NnlsCapExceeded : public std::runtime_error {
 public:
  explicit NnlsCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Dense nonnegative matrix, row-major. Carrier for the data matrix M and the
/// factors V (m x r) and W (r x n).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("Matrix: dimensions must be positive");
    if (fill < 0.0)
      throw std::invalid_argument("Matrix: negative fill value");
  }

  // Takes ownership of `data` (row-major); rejects negative entries.
  static Matrix from_data(std::size_t rows, std::size_t cols,
                          std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  bool is_nonnegative() const;
  double min_entry() const;
  double max_entry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// SplitMix64. Fully specified by its integer constants, so sequences are
/// bit-identical across platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// ||M - VW||_F (unsquared). Throws std::invalid_argument on a dimension
/// mismatch. Deterministic regardless of thread count.
double frobenius_error(const Matrix& M, const Matrix& V, const Matrix& W);

/// ||A||_F.
double frobenius_norm(const Matrix& A);

/// Seeded uniform [0,1) factors: V0 filled row-major first, then W0 row-major,
/// from a single generator.
std::pair<Matrix, Matrix> random_init(std::size_t m, std::size_t n,
                                      std::size_t r, std::uint64_t seed);

}  // namespace mlnmf

#endif  // MLNMF_MATRIX_HPP_
