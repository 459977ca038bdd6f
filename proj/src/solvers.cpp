#include "mlnmf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "mlnmf/kernels.hpp"

namespace mlnmf {

namespace {

constexpr double kDenomFloor = 1e-16;

void check_factor_dims(const Matrix& M, const Matrix& V, const Matrix& W) {
  if (V.rows() != M.rows() || W.cols() != M.cols() || V.cols() != W.rows())
    throw std::invalid_argument("solver step: dimension mismatch");
}

// Plain Cholesky solve of Ax = b for a p x p SPD matrix (row-major, packed).
// Returns false on a non-positive pivot.
bool cholesky_solve(std::vector<double> A, std::vector<double> b,
                    std::size_t p, std::vector<double>& x) {
  for (std::size_t k = 0; k < p; ++k) {
    double d = A[k * p + k];
    for (std::size_t q = 0; q < k; ++q) d -= A[k * p + q] * A[k * p + q];
    if (d <= 0.0 || !std::isfinite(d)) return false;
    const double lkk = std::sqrt(d);
    A[k * p + k] = lkk;
    for (std::size_t i = k + 1; i < p; ++i) {
      double s = A[i * p + k];
      for (std::size_t q = 0; q < k; ++q) s -= A[i * p + q] * A[k * p + q];
      A[i * p + k] = s / lkk;
    }
  }
  // forward then backward substitution
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t q = 0; q < i; ++q) s -= A[i * p + q] * b[q];
    b[i] = s / A[i * p + i];
  }
  for (std::size_t ii = p; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t q = ii + 1; q < p; ++q) s -= A[q * p + ii] * b[q];
    b[ii] = s / A[ii * p + ii];
  }
  x = std::move(b);
  return true;
}

// Reduced solve on the passive set, with a ridge fallback for singular
// subsystems.
std::vector<double> solve_passive(const Matrix& G, std::span<const double> h,
                                  const std::vector<std::size_t>& passive) {
  const std::size_t p = passive.size();
  std::vector<double> A(p * p), b(p), z;
  for (std::size_t a = 0; a < p; ++a) {
    b[a] = h[passive[a]];
    for (std::size_t c = 0; c < p; ++c) A[a * p + c] = G(passive[a], passive[c]);
  }
  if (cholesky_solve(A, b, p, z)) return z;
  double trace = 0.0;
  for (std::size_t k = 0; k < G.rows(); ++k) trace += G(k, k);
  double ridge = 1e-12 * trace / static_cast<double>(G.rows());
  if (ridge <= 0.0) ridge = 1e-12;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<double> Ar = A;
    for (std::size_t a = 0; a < p; ++a) Ar[a * p + a] += ridge;
    if (cholesky_solve(Ar, b, p, z)) return z;
    ridge *= 100.0;
  }
  throw std::runtime_error("nnls_active_set: singular passive subsystem");
}

}  // namespace

void mu_step(const Matrix& M, Matrix& V, Matrix& W) {
  check_factor_dims(M, V, W);
  {
    const Matrix WWt = kernels::matmul_abt(W, W);
    const Matrix MWt = kernels::matmul_abt(M, W);
    const Matrix VWWt = kernels::matmul_ab(V, WWt);
    const std::int64_t sz = static_cast<std::int64_t>(V.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i)
      V.data()[i] *= MWt.data()[i] / std::max(VWWt.data()[i], kDenomFloor);
  }
  {
    const Matrix VtV = kernels::matmul_atb(V, V);
    const Matrix VtM = kernels::matmul_atb(V, M);
    const Matrix VtVW = kernels::matmul_ab(VtV, W);
    const std::int64_t sz = static_cast<std::int64_t>(W.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i)
      W.data()[i] *= VtM.data()[i] / std::max(VtVW.data()[i], kDenomFloor);
  }
}

void hals_step(const Matrix& M, Matrix& V, Matrix& W, int* degenerate) {
  check_factor_dims(M, V, W);
  const std::size_t r = V.cols();
  {
    const Matrix A = kernels::matmul_abt(M, W);
    const Matrix B = kernels::matmul_abt(W, W);
    const std::int64_t m = static_cast<std::int64_t>(V.rows());
    for (std::size_t k = 0; k < r; ++k) {
      const double bkk = B(k, k);
      if (bkk <= 0.0) {
        if (degenerate) ++*degenerate;
        continue;
      }
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < m; ++i) {
        double num = A(i, k) + V(i, k) * bkk;
        const double* vi = V.data() + static_cast<std::size_t>(i) * r;
        for (std::size_t l = 0; l < r; ++l) num -= vi[l] * B(l, k);
        V(i, k) = std::max(0.0, num / bkk);
      }
    }
  }
  {
    const Matrix C = kernels::matmul_atb(V, M);
    const Matrix D = kernels::matmul_atb(V, V);
    const std::int64_t n = static_cast<std::int64_t>(W.cols());
    for (std::size_t k = 0; k < r; ++k) {
      const double dkk = D(k, k);
      if (dkk <= 0.0) {
        if (degenerate) ++*degenerate;
        continue;
      }
#pragma omp parallel for schedule(static)
      for (std::int64_t j = 0; j < n; ++j) {
        double num = C(k, j) + dkk * W(k, j);
        for (std::size_t l = 0; l < r; ++l) num -= D(k, l) * W(l, j);
        W(k, j) = std::max(0.0, num / dkk);
      }
    }
  }
}

NnlsResult nnls_active_set(const Matrix& G, std::span<const double> h,
                           std::span<const double> x0) {
  const std::size_t r = G.rows();
  if (G.cols() != r || h.size() != r || x0.size() != r)
    throw std::invalid_argument("nnls_active_set: dimension mismatch");

  double scale = 1.0;
  for (std::size_t i = 0; i < r; ++i)
    scale = std::max({scale, std::abs(h[i]), G(i, i)});
  const double tol = 1e-10 * scale;

  const std::uint64_t cap =
      r < 50 ? 3ull * (1ull << r) + 10ull * r
             : std::numeric_limits<std::uint64_t>::max();

  std::vector<double> x(r, 0.0);
  std::vector<bool> in_passive(r, false);
  std::vector<std::size_t> passive;
  for (std::size_t i = 0; i < r; ++i) {
    if (x0[i] > 0.0) {
      x[i] = x0[i];
      in_passive[i] = true;
      passive.push_back(i);
    }
  }

  std::uint64_t exchanges = 0;
  auto bump = [&] {
    if (++exchanges > cap)
      throw NnlsCapExceeded("nnls_active_set: exchange cap exceeded");
  };

  while (true) {
    // Inner loop: make x the LS solution on the passive set, trimming
    // coordinates that would go negative.
    while (!passive.empty()) {
      std::vector<double> z = solve_passive(G, h, passive);
      bool feasible = true;
      double alpha = 1.0;
      for (std::size_t a = 0; a < passive.size(); ++a) {
        if (z[a] <= 0.0) {
          feasible = false;
          const double xi = x[passive[a]];
          const double denom = xi - z[a];
          alpha = std::min(alpha, denom > 0.0 ? xi / denom : 0.0);
        }
      }
      if (feasible) {
        for (std::size_t a = 0; a < passive.size(); ++a) x[passive[a]] = z[a];
        break;
      }
      for (std::size_t a = 0; a < passive.size(); ++a) {
        const std::size_t i = passive[a];
        x[i] += alpha * (z[a] - x[i]);
      }
      // drop coordinates that hit zero
      std::vector<std::size_t> kept;
      for (std::size_t a = 0; a < passive.size(); ++a) {
        const std::size_t i = passive[a];
        if (z[a] <= 0.0 && x[i] <= tol * 1e-2) {
          x[i] = 0.0;
          in_passive[i] = false;
          bump();
        } else {
          kept.push_back(i);
        }
      }
      if (kept.size() == passive.size()) {
        // numerical stall: force out the most negative z
        std::size_t worst = 0;
        for (std::size_t a = 1; a < passive.size(); ++a)
          if (z[a] < z[worst]) worst = a;
        x[passive[worst]] = 0.0;
        in_passive[passive[worst]] = false;
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(worst));
        bump();
      }
      passive = std::move(kept);
    }

    // Outer optimality: negative gradient w = h - Gx on active coordinates.
    double best_w = tol;
    std::size_t best_i = r;
    for (std::size_t i = 0; i < r; ++i) {
      if (in_passive[i]) continue;
      double gx = 0.0;
      for (std::size_t q = 0; q < r; ++q) gx += G(i, q) * x[q];
      const double w = h[i] - gx;
      if (w > best_w) {
        best_w = w;
        best_i = i;
      }
    }
    if (best_i == r) break;
    in_passive[best_i] = true;
    passive.push_back(best_i);
    bump();
  }

  return {std::move(x), static_cast<int>(exchanges)};
}

void anls_step(const Matrix& M, Matrix& V, Matrix& W,
               std::vector<int>* iter_counts) {
  check_factor_dims(M, V, W);
  const std::size_t m = M.rows(), n = M.cols(), r = V.cols();

  {
    const Matrix G = kernels::matmul_abt(W, W);
    const Matrix H = kernels::matmul_abt(M, W);  // m x r
    std::vector<int> counts(m);
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
      if (failed) continue;
      try {
        NnlsResult res = nnls_active_set(G, H.row(i), V.row(i));
        std::copy(res.x.begin(), res.x.end(), V.row(i).begin());
        counts[static_cast<std::size_t>(i)] = res.iterations;
      } catch (...) {
#pragma omp atomic write
        failed = true;
      }
    }
    if (failed) throw NnlsCapExceeded("anls_step: NNLS failed on a V row");
    if (iter_counts)
      iter_counts->insert(iter_counts->end(), counts.begin(), counts.end());
  }
  {
    const Matrix G = kernels::matmul_atb(V, V);
    const Matrix C = kernels::matmul_atb(V, M);  // r x n
    std::vector<int> counts(n);
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(n); ++j) {
      if (failed) continue;
      std::vector<double> hj(r), x0(r);
      for (std::size_t k = 0; k < r; ++k) {
        hj[k] = C(k, static_cast<std::size_t>(j));
        x0[k] = W(k, static_cast<std::size_t>(j));
      }
      try {
        NnlsResult res = nnls_active_set(G, hj, x0);
        for (std::size_t k = 0; k < r; ++k)
          W(k, static_cast<std::size_t>(j)) = res.x[k];
        counts[static_cast<std::size_t>(j)] = res.iterations;
      } catch (...) {
#pragma omp atomic write
        failed = true;
      }
    }
    if (failed) throw NnlsCapExceeded("anls_step: NNLS failed on a W column");
    if (iter_counts)
      iter_counts->insert(iter_counts->end(), counts.begin(), counts.end());
  }
}

double run_solver_phase(const Matrix& M, Matrix& V, Matrix& W, SolverKind kind,
                        Budget::Mode mode, double amount, double step_flops,
                        int level, std::size_t trace_every, SolveContext& ctx) {
  const double charge = step_flops / ctx.unit_flops;
  const double eps = 1e-12 * std::max(1.0, amount);
  const double phase_start_s = ctx.elapsed_s();

  auto sample = [&] {
    ctx.trace.samples.push_back({ctx.elapsed_s(), ctx.work_consumed, level,
                                 frobenius_error(M, V, W)});
  };
  sample();

  double consumed = 0.0;
  std::size_t steps = 0;
  while (true) {
    if (mode == Budget::Mode::kWorkUnits) {
      if (consumed + charge > amount + eps) break;
    } else {
      if (ctx.elapsed_s() - phase_start_s >= amount) break;
    }
    switch (kind) {
      case SolverKind::kMu:
        mu_step(M, V, W);
        break;
      case SolverKind::kHals:
        hals_step(M, V, W, &ctx.trace.hals_degenerate_columns);
        break;
      case SolverKind::kAnls:
        anls_step(M, V, W, &ctx.trace.nnls_iteration_counts);
        break;
    }
    consumed += charge;
    ctx.work_consumed += charge;
    ++steps;
    if (trace_every > 0 && steps % trace_every == 0) sample();
  }
  sample();

  if (mode == Budget::Mode::kWorkUnits) return amount - consumed;
  return std::max(0.0, amount - (ctx.elapsed_s() - phase_start_s));
}

SolveResult run_solver(const Matrix& M, const Matrix& V0, const Matrix& W0,
                       SolverKind kind, Budget budget,
                       std::size_t trace_every) {
  check_factor_dims(M, V0, W0);
  SolveContext ctx;
  ctx.unit_flops = iteration_cost(
      CostParams::with_default_sr(M.rows(), M.cols(), V0.cols()), kind);
  Matrix V = V0, W = W0;
  ctx.trace.allocations.push_back({1, budget.amount});
  run_solver_phase(M, V, W, kind, budget.mode, budget.amount, ctx.unit_flops,
                   1, trace_every, ctx);
  return {std::move(V), std::move(W), std::move(ctx.trace)};
}

}  // namespace mlnmf
