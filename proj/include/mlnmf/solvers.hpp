#ifndef MLNMF_SOLVERS_HPP_
#define MLNMF_SOLVERS_HPP_

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "mlnmf/cost_model.hpp"
#include "mlnmf/matrix.hpp"

namespace mlnmf {

struct TraceSample {
  double elapsed_s;
  double work_units;
  int level;  // 1 = finest
  double error;
};

/// Nominal budget handed to one solver phase of a cycle (before whole-step
/// rounding); nominal amounts at each recursion node sum exactly to T.
struct PhaseAllocation {
  int level;
  double amount;
};

struct RunTrace {
  std::vector<TraceSample> samples;
  std::vector<int> nnls_iteration_counts;  // per NNLS subproblem (ANLS only)
  std::vector<PhaseAllocation> allocations;
  int hals_degenerate_columns = 0;

  double final_error() const { return samples.back().error; }
};

struct Budget {
  enum class Mode { kWorkUnits, kWallClockSeconds };
  Mode mode = Mode::kWorkUnits;
  double amount = 0.0;
};

/// One MU sweep: V then W, W using the updated V. Denominators are floored
/// at 1e-16.
void mu_step(const Matrix& M, Matrix& V, Matrix& W);

/// One HALS sweep: all columns of V, then all rows of W, Gauss-Seidel within
/// each half-sweep. A degenerate diagonal (B_kk = 0) leaves that block
/// unchanged and bumps *degenerate when given.
void hals_step(const Matrix& M, Matrix& V, Matrix& W, int* degenerate = nullptr);

struct NnlsResult {
  std::vector<double> x;
  int iterations;  // active-set exchanges
};

/// Active-set NNLS on the normal-equations form: min_x>=0 x'Gx/2 - h'x.
/// Warm-started from the support of x0. Throws NnlsCapExceeded after
/// 3*2^r + 10r exchanges.
NnlsResult nnls_active_set(const Matrix& G, std::span<const double> h,
                           std::span<const double> x0);

/// One ANLS sweep: exact NNLS minimization over V rows, then over W columns.
/// Subproblem Gram matrices are formed once per half-step; the m (resp. n)
/// independent subproblems run in parallel. Appends per-subproblem exchange
/// counts to iter_counts when given.
void anls_step(const Matrix& M, Matrix& V, Matrix& W,
               std::vector<int>* iter_counts = nullptr);

// Mutable state threaded through a run so that multilevel cycles share one
// clock, one cumulative work counter and one trace.
struct SolveContext {
  double unit_flops = 1.0;  // budget currency: flops of one finest-level step
  double work_consumed = 0.0;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  RunTrace trace;

  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

/// Runs `kind` on M until `amount` (work units or seconds) is spent, charging
/// step_flops/unit_flops per step in work mode. Records samples at start, end
/// and every trace_every steps. Returns the unconsumed amount (work mode
/// floors to whole steps).
double run_solver_phase(const Matrix& M, Matrix& V, Matrix& W, SolverKind kind,
                        Budget::Mode mode, double amount, double step_flops,
                        int level, std::size_t trace_every, SolveContext& ctx);

struct SolveResult {
  Matrix V;
  Matrix W;
  RunTrace trace;
};

/// Single-level solver run; one work unit is one iteration of `kind` on M.
SolveResult run_solver(const Matrix& M, const Matrix& V0, const Matrix& W0,
                       SolverKind kind, Budget budget,
                       std::size_t trace_every = 1);

}  // namespace mlnmf

#endif  // MLNMF_SOLVERS_HPP_
