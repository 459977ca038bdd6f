// Timing comparison of the OpenMP kernels against the serial reference,
// on shapes typical of a fine-level factorization sweep.

#include <chrono>
#include <cstdio>
#include <functional>

#include "mlnmf/kernels.hpp"
#include "mlnmf/matrix.hpp"

using namespace mlnmf;
using Clock = std::chrono::steady_clock;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < M.size(); ++i) M.data()[i] = rng.next_uniform();
  return M;
}

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

void report(const char* name, double flops, double serial_s, double parallel_s) {
  std::printf("%-18s serial %8.2f ms (%7.2f GFLOP/s)   omp %8.2f ms (%7.2f GFLOP/s)   speedup %.2fx\n",
              name, serial_s * 1e3, flops / serial_s * 1e-9, parallel_s * 1e3,
              flops / parallel_s * 1e-9, serial_s / parallel_s);
}

}  // namespace

int main() {
  const std::size_t m = 10304, n = 400, r = 40;  // 112x92 pixels, 400 images
  Rng rng(1);
  const Matrix M = random_matrix(m, n, rng);
  const Matrix V = random_matrix(m, r, rng);
  const Matrix W = random_matrix(r, n, rng);
  const int reps = 5;

  std::printf("m = %zu, n = %zu, r = %zu, best of %d\n\n", m, n, r, reps);

  {
    const double flops = 2.0 * m * n * r;
    const double ts = time_best_of(reps, [&] { kernels::serial::matmul_abt(M, W); });
    const double tp = time_best_of(reps, [&] { kernels::matmul_abt(M, W); });
    report("M * W^T", flops, ts, tp);
  }
  {
    const double flops = 2.0 * m * n * r;
    const double ts = time_best_of(reps, [&] { kernels::serial::matmul_atb(V, M); });
    const double tp = time_best_of(reps, [&] { kernels::matmul_atb(V, M); });
    report("V^T * M", flops, ts, tp);
  }
  {
    const double flops = 2.0 * m * n * r;
    const double ts = time_best_of(reps, [&] { kernels::serial::matmul_ab(V, W); });
    const double tp = time_best_of(reps, [&] { kernels::matmul_ab(V, W); });
    report("V * W", flops, ts, tp);
  }
  {
    const double flops = 2.0 * m * n * (r + 1);
    const double ts = time_best_of(reps, [&] { kernels::serial::column_sq_errors(M, V, W); });
    const double tp = time_best_of(reps, [&] { kernels::column_sq_errors(M, V, W); });
    report("residual norms", flops, ts, tp);
  }
  return 0;
}
