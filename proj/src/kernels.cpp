#include "mlnmf/kernels.hpp"

#include <stdexcept>

namespace mlnmf::kernels {

namespace {

void check(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline void row_ab(const Matrix& A, const Matrix& B, Matrix& C, std::size_t i) {
  const std::size_t k = A.cols(), n = B.cols();
  double* ci = C.data() + i * n;
  const double* ai = A.data() + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double a = ai[p];
    const double* bp = B.data() + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += a * bp[j];
  }
}

inline void row_abt(const Matrix& A, const Matrix& B, Matrix& C,
                    std::size_t i) {
  const std::size_t n = A.cols(), r = B.rows();
  const double* ai = A.data() + i * n;
  for (std::size_t j = 0; j < r; ++j) {
    const double* bj = B.data() + j * n;
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) s += ai[p] * bj[p];
    C(i, j) = s;
  }
}

inline void row_atb(const Matrix& A, const Matrix& B, Matrix& C,
                    std::size_t k) {
  const std::size_t m = A.rows(), r = A.cols(), n = B.cols();
  double* ck = C.data() + k * n;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = A(i, k);
    const double* bi = B.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) ck[j] += a * bi[j];
  }
  (void)r;
}

inline double col_sq_error(const Matrix& M, const Matrix& V, const Matrix& W,
                           std::size_t j) {
  const std::size_t m = M.rows(), r = V.cols();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double pred = 0.0;
    const double* vi = V.data() + i * r;
    for (std::size_t k = 0; k < r; ++k) pred += vi[k] * W(k, j);
    const double d = M(i, j) - pred;
    s += d * d;
  }
  return s;
}

}  // namespace

Matrix matmul_ab(const Matrix& A, const Matrix& B) {
  check(A.cols() == B.rows(), "matmul_ab: dimension mismatch");
  Matrix C(A.rows(), B.cols());
  const std::int64_t m = static_cast<std::int64_t>(A.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) row_ab(A, B, C, i);
  return C;
}

Matrix matmul_abt(const Matrix& A, const Matrix& B) {
  check(A.cols() == B.cols(), "matmul_abt: dimension mismatch");
  Matrix C(A.rows(), B.rows());
  const std::int64_t m = static_cast<std::int64_t>(A.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) row_abt(A, B, C, i);
  return C;
}

Matrix matmul_atb(const Matrix& A, const Matrix& B) {
  check(A.rows() == B.rows(), "matmul_atb: dimension mismatch");
  Matrix C(A.cols(), B.cols());
  const std::int64_t r = static_cast<std::int64_t>(A.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < r; ++k) row_atb(A, B, C, k);
  return C;
}

std::vector<double> column_sq_errors(const Matrix& M, const Matrix& V,
                                     const Matrix& W) {
  check(V.rows() == M.rows() && W.cols() == M.cols() && V.cols() == W.rows(),
        "column_sq_errors: dimension mismatch");
  std::vector<double> out(M.cols());
  const std::int64_t n = static_cast<std::int64_t>(M.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) out[j] = col_sq_error(M, V, W, j);
  return out;
}

namespace serial {

Matrix matmul_ab(const Matrix& A, const Matrix& B) {
  check(A.cols() == B.rows(), "matmul_ab: dimension mismatch");
  Matrix C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) row_ab(A, B, C, i);
  return C;
}

Matrix matmul_abt(const Matrix& A, const Matrix& B) {
  check(A.cols() == B.cols(), "matmul_abt: dimension mismatch");
  Matrix C(A.rows(), B.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) row_abt(A, B, C, i);
  return C;
}

Matrix matmul_atb(const Matrix& A, const Matrix& B) {
  check(A.rows() == B.rows(), "matmul_atb: dimension mismatch");
  Matrix C(A.cols(), B.cols());
  for (std::size_t k = 0; k < A.cols(); ++k) row_atb(A, B, C, k);
  return C;
}

std::vector<double> column_sq_errors(const Matrix& M, const Matrix& V,
                                     const Matrix& W) {
  check(V.rows() == M.rows() && W.cols() == M.cols() && V.cols() == W.rows(),
        "column_sq_errors: dimension mismatch");
  std::vector<double> out(M.cols());
  for (std::size_t j = 0; j < M.cols(); ++j) out[j] = col_sq_error(M, V, W, j);
  return out;
}

}  // namespace serial

}  // namespace mlnmf::kernels
