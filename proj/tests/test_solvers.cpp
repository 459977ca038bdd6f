#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mlnmf/kernels.hpp"
#include "mlnmf/solvers.hpp"

using namespace mlnmf;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                     double lo = 0.0, double hi = 1.0) {
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < M.size(); ++i)
    M.data()[i] = lo + rng.next_uniform() * (hi - lo);
  return M;
}

Matrix random_spd(std::size_t r, Rng& rng) {
  // G = A A^T + small diagonal
  const Matrix A = random_matrix(r, r + 2, rng);
  Matrix G = kernels::matmul_abt(A, A);
  for (std::size_t i = 0; i < r; ++i) G(i, i) += 0.1;
  return G;
}

double quad_objective(const Matrix& G, std::span<const double> h,
                      std::span<const double> x) {
  const std::size_t r = G.rows();
  double obj = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double gx = 0.0;
    for (std::size_t j = 0; j < r; ++j) gx += G(i, j) * x[j];
    obj += 0.5 * x[i] * gx - h[i] * x[i];
  }
  return obj;
}

// Brute-force oracle: enumerate all 2^r passive sets, solve each reduced
// system by Gaussian elimination, keep the KKT-feasible candidate with the
// lowest objective.
std::vector<double> nnls_bruteforce(const Matrix& G, std::span<const double> h) {
  const std::size_t r = G.rows();
  std::vector<double> best(r, 0.0);
  double best_obj = 0.0;  // empty passive set: x = 0
  for (std::size_t mask = 1; mask < (1u << r); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const std::size_t p = idx.size();
    // dense solve of G_PP y = h_P
    std::vector<double> A(p * (p + 1));
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) A[a * (p + 1) + b] = G(idx[a], idx[b]);
      A[a * (p + 1) + p] = h[idx[a]];
    }
    bool singular = false;
    for (std::size_t c = 0; c < p && !singular; ++c) {
      std::size_t piv = c;
      for (std::size_t rr = c + 1; rr < p; ++rr)
        if (std::abs(A[rr * (p + 1) + c]) > std::abs(A[piv * (p + 1) + c]))
          piv = rr;
      if (std::abs(A[piv * (p + 1) + c]) < 1e-13) {
        singular = true;
        break;
      }
      for (std::size_t k = 0; k <= p; ++k)
        std::swap(A[c * (p + 1) + k], A[piv * (p + 1) + k]);
      for (std::size_t rr = 0; rr < p; ++rr) {
        if (rr == c) continue;
        const double f = A[rr * (p + 1) + c] / A[c * (p + 1) + c];
        for (std::size_t k = c; k <= p; ++k)
          A[rr * (p + 1) + k] -= f * A[c * (p + 1) + k];
      }
    }
    if (singular) continue;
    std::vector<double> x(r, 0.0);
    bool ok = true;
    for (std::size_t a = 0; a < p; ++a) {
      x[idx[a]] = A[a * (p + 1) + p] / A[a * (p + 1) + a];
      if (x[idx[a]] < -1e-12) ok = false;
    }
    if (!ok) continue;
    // dual feasibility on the active coordinates
    for (std::size_t i = 0; i < r && ok; ++i) {
      if (mask & (1u << i)) continue;
      double gx = 0.0;
      for (std::size_t j = 0; j < r; ++j) gx += G(i, j) * x[j];
      if (gx - h[i] < -1e-9) ok = false;
    }
    if (!ok) continue;
    const double obj = quad_objective(G, h, x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

double kkt_residual(const Matrix& G, std::span<const double> h,
                    std::span<const double> x) {
  const std::size_t r = G.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double gx = 0.0;
    for (std::size_t j = 0; j < r; ++j) gx += G(i, j) * x[j];
    const double grad = gx - h[i];
    worst = std::max(worst, -x[i]);              // primal feasibility
    worst = std::max(worst, -grad);              // dual feasibility
    worst = std::max(worst, std::abs(grad * x[i]));  // complementarity
  }
  return worst;
}

}  // namespace

TEST_CASE("mu_step hand example and fixed point") {
  Matrix V = Matrix::from_data(1, 1, {1});
  Matrix W = Matrix::from_data(1, 1, {1});
  const Matrix M = Matrix::from_data(1, 1, {2});
  mu_step(M, V, W);
  CHECK(V(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(W(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(1);
  const Matrix V0 = random_matrix(6, 2, rng, 0.1, 1.0);
  const Matrix W0 = random_matrix(2, 5, rng, 0.1, 1.0);
  const Matrix exact = kernels::matmul_ab(V0, W0);
  Matrix V1 = V0, W1 = W0;
  mu_step(exact, V1, W1);
  for (std::size_t i = 0; i < V1.size(); ++i)
    CHECK(V1.data()[i] == doctest::Approx(V0.data()[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < W1.size(); ++i)
    CHECK(W1.data()[i] == doctest::Approx(W0.data()[i]).epsilon(1e-12));
}

TEST_CASE("mu and hals are monotone and preserve nonnegativity") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Matrix M = random_matrix(10, 8, rng);
    auto [V, W] = random_init(10, 8, 3, seed + 1000);
    Matrix Vm = V, Wm = W, Vh = V, Wh = W;
    double prev_mu = frobenius_error(M, Vm, Wm);
    double prev_hals = prev_mu;
    for (int it = 0; it < (seed < 5 ? 100 : 10); ++it) {
      mu_step(M, Vm, Wm);
      const double e = frobenius_error(M, Vm, Wm);
      CHECK(e <= prev_mu + 1e-9 * prev_mu);
      prev_mu = e;
      hals_step(M, Vh, Wh);
      const double eh = frobenius_error(M, Vh, Wh);
      CHECK(eh <= prev_hals + 1e-9 * prev_hals);
      prev_hals = eh;
    }
    CHECK(Vm.is_nonnegative());
    CHECK(Wm.is_nonnegative());
    CHECK(Vh.is_nonnegative());
    CHECK(Wh.is_nonnegative());
  }
}

TEST_CASE("hals fixed point and rank-1 closed form") {
  Rng rng(2);
  const Matrix V0 = random_matrix(6, 2, rng, 0.1, 1.0);
  const Matrix W0 = random_matrix(2, 5, rng, 0.1, 1.0);
  const Matrix exact = kernels::matmul_ab(V0, W0);
  Matrix V1 = V0, W1 = W0;
  hals_step(exact, V1, W1);
  for (std::size_t i = 0; i < V1.size(); ++i)
    CHECK(V1.data()[i] == doctest::Approx(V0.data()[i]).epsilon(1e-12));

  // r = 1: the V update is the closed-form best rank-one column for fixed W
  const Matrix M = random_matrix(5, 4, rng);
  Matrix V = random_matrix(5, 1, rng);
  Matrix W = random_matrix(1, 4, rng, 0.1, 1.0);
  const Matrix A = kernels::matmul_abt(M, W);
  const Matrix B = kernels::matmul_abt(W, W);
  Matrix Vexp(5, 1);
  for (std::size_t i = 0; i < 5; ++i)
    Vexp(i, 0) = std::max(0.0, A(i, 0) / B(0, 0));
  const Matrix Wkeep = W;
  hals_step(M, V, W, nullptr);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(V(i, 0) == doctest::Approx(Vexp(i, 0)).epsilon(1e-12));
}

TEST_CASE("hals leaves a degenerate column untouched") {
  Rng rng(4);
  const Matrix M = random_matrix(6, 5, rng);
  Matrix V = random_matrix(6, 2, rng);
  Matrix W = random_matrix(2, 5, rng);
  for (std::size_t j = 0; j < 5; ++j) W(1, j) = 0.0;  // row 2 of W all zero
  const Matrix Vbefore = V;
  int degenerate = 0;
  hals_step(M, V, W, &degenerate);
  CHECK(degenerate >= 1);
  for (std::size_t i = 0; i < 6; ++i) CHECK(V(i, 1) == Vbefore(i, 1));
}

TEST_CASE("nnls trivial cases") {
  const Matrix I2 = Matrix::from_data(2, 2, {1, 0, 0, 1});
  const std::vector<double> x0(2, 0.0);
  {
    const std::vector<double> h = {0.5, 2.0};
    const auto res = nnls_active_set(I2, h, x0);
    CHECK(res.x[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.x[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
  {
    const std::vector<double> h = {3.0, -2.0};
    const auto res = nnls_active_set(I2, h, x0);
    CHECK(res.x[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(res.x[1] == 0.0);
  }
}

TEST_CASE("nnls matches brute-force enumeration for r <= 3") {
  for (std::size_t r : {1UL, 2UL, 3UL}) {
    Rng rng(100 + r);
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix G = random_spd(r, rng);
      std::vector<double> h(r);
      for (auto& v : h) v = 2.0 * rng.next_uniform() - 1.0;
      const auto res = nnls_active_set(G, h, std::vector<double>(r, 0.0));
      const auto want = nnls_bruteforce(G, h);
      for (std::size_t i = 0; i < r; ++i)
        CHECK(res.x[i] == doctest::Approx(want[i]).epsilon(1e-8).scale(1.0));
      CHECK(kkt_residual(G, h, res.x) <= 1e-8);
    }
  }
}

TEST_CASE("nnls warm start reaches the same optimum") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix G = random_spd(3, rng);
    std::vector<double> h(3), warm(3);
    for (auto& v : h) v = 2.0 * rng.next_uniform() - 1.0;
    for (auto& v : warm) v = rng.next_uniform();
    const auto cold = nnls_active_set(G, h, std::vector<double>(3, 0.0));
    const auto warm_res = nnls_active_set(G, h, warm);
    CHECK(quad_objective(G, h, warm_res.x) <=
          quad_objective(G, h, cold.x) + 1e-10);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(warm_res.x[i] == doctest::Approx(cold.x[i]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("anls step is an exact block minimizer") {
  Rng rng(77);
  int anls_wins = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix M = random_matrix(8, 6, rng);
    auto [V, W] = random_init(8, 6, 2, 500 + trial);
    Matrix Va = V, Wa = W, Vm = V, Wm = W;
    anls_step(M, Va, Wa);
    mu_step(M, Vm, Wm);
    if (frobenius_error(M, Va, Wa) <= frobenius_error(M, Vm, Wm) + 1e-12)
      ++anls_wins;
    CHECK(Va.is_nonnegative());
    CHECK(Wa.is_nonnegative());
  }
  CHECK(anls_wins >= 45);
}

TEST_CASE("anls fixed point and KKT residuals") {
  Rng rng(88);
  const Matrix V0 = random_matrix(7, 2, rng, 0.1, 1.0);
  const Matrix W0 = random_matrix(2, 5, rng, 0.1, 1.0);
  const Matrix exact = kernels::matmul_ab(V0, W0);
  Matrix V = V0, W = W0;
  anls_step(exact, V, W);
  for (std::size_t i = 0; i < V.size(); ++i)
    CHECK(V.data()[i] == doctest::Approx(V0.data()[i]).epsilon(1e-7).scale(1.0));

  // KKT residuals of every V-row subproblem after one sweep
  const Matrix M = random_matrix(12, 9, rng);
  auto [V1, W1] = random_init(12, 9, 3, 9);
  std::vector<int> counts;
  anls_step(M, V1, W1, &counts);
  CHECK(counts.size() == 12 + 9);
  // re-do the V half against the final W to check the W-half optimality
  const Matrix G = kernels::matmul_atb(V1, V1);
  const Matrix C = kernels::matmul_atb(V1, M);
  for (std::size_t j = 0; j < 9; ++j) {
    std::vector<double> h(3), x(3);
    for (std::size_t k = 0; k < 3; ++k) {
      h[k] = C(k, j);
      x[k] = W1(k, j);
    }
    CHECK(kkt_residual(G, h, x) <= 1e-6);
  }
}

TEST_CASE("run_solver budget accounting and tracing") {
  Rng rng(6);
  const Matrix M = random_matrix(10, 8, rng);
  auto [V0, W0] = random_init(10, 8, 3, 3);

  // zero-ish budget: inputs unchanged, single-step granularity
  const auto r0 = run_solver(M, V0, W0, SolverKind::kMu,
                             {Budget::Mode::kWorkUnits, 0.5});
  for (std::size_t i = 0; i < V0.size(); ++i)
    CHECK(r0.V.data()[i] == V0.data()[i]);
  CHECK(r0.trace.samples.size() >= 1);

  // a work budget of 10 fine iterations runs exactly 10 steps
  const auto r10 = run_solver(M, V0, W0, SolverKind::kMu,
                              {Budget::Mode::kWorkUnits, 10.0}, 1);
  CHECK(r10.trace.samples.size() == 2 + 10);  // start + end + one per step
  CHECK(r10.trace.samples.back().work_units == doctest::Approx(10.0));

  // trace errors nonincreasing and work nondecreasing
  for (std::size_t i = 1; i < r10.trace.samples.size(); ++i) {
    CHECK(r10.trace.samples[i].work_units >=
          r10.trace.samples[i - 1].work_units);
    CHECK(r10.trace.samples[i].error <=
          r10.trace.samples[i - 1].error * (1 + 1e-9));
  }

  // work mode is deterministic
  const auto again = run_solver(M, V0, W0, SolverKind::kMu,
                                {Budget::Mode::kWorkUnits, 10.0}, 1);
  for (std::size_t i = 0; i < again.V.size(); ++i)
    CHECK(again.V.data()[i] == r10.V.data()[i]);
}
