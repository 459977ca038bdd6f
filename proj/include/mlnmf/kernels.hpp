#ifndef MLNMF_KERNELS_HPP_
#define MLNMF_KERNELS_HPP_

#include "mlnmf/matrix.hpp"

// Dense kernels backing the solvers. The default entry points are
// OpenMP-parallel over independent output rows/columns, so results are
// bit-identical to the serial reference for any thread count. The serial
// versions live in kernels::serial and are kept for testing and as the
// baseline of the bench_kernels tool.

namespace mlnmf::kernels {

// C (m x n) = A (m x k) * B (k x n)
Matrix matmul_ab(const Matrix& A, const Matrix& B);

// C (m x r) = A (m x n) * B(r x n)^T
Matrix matmul_abt(const Matrix& A, const Matrix& B);

// C (r x n) = A (m x r)^T * B (m x n)
Matrix matmul_atb(const Matrix& A, const Matrix& B);

// Per-column squared residual of M - V*W, length n. Summing the result
// serially gives ||M - VW||_F^2 independent of the thread count.
std::vector<double> column_sq_errors(const Matrix& M, const Matrix& V,
                                     const Matrix& W);

namespace serial {
Matrix matmul_ab(const Matrix& A, const Matrix& B);
Matrix matmul_abt(const Matrix& A, const Matrix& B);
Matrix matmul_atb(const Matrix& A, const Matrix& B);
std::vector<double> column_sq_errors(const Matrix& M, const Matrix& V,
                                     const Matrix& W);
}  // namespace serial

}  // namespace mlnmf::kernels

#endif  // MLNMF_KERNELS_HPP_
