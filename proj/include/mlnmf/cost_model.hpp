#ifndef MLNMF_COST_MODEL_HPP_
#define MLNMF_COST_MODEL_HPP_

#include <cstddef>
#include <cstdint>

namespace mlnmf {

enum class SolverKind { kAnls, kMu, kHals };

/// Per-iteration flop model parameters. s_r is the assumed number of
/// active-set exchanges per NNLS solve; default policy is 2r unless a
/// measured value is supplied.
struct CostParams {
  std::size_t m;
  std::size_t n;
  std::size_t r;
  double s_r;

  static CostParams with_default_sr(std::size_t m, std::size_t n,
                                    std::size_t r) {
    return {m, n, r, 2.0 * static_cast<double>(r)};
  }
};

/// Model flops of one MU (or HALS) sweep: 2m(nr + r^2) + 2nr^2.
double mu_iteration_cost(const CostParams& p);

/// Model flops of one ANLS sweep: mnr + (m + n) s_r r^3 (unit constants).
double anls_iteration_cost(const CostParams& p);

/// Model flops per iteration for the given solver at row dimension m.
double iteration_cost(const CostParams& p, SolverKind kind);

/// g(r) = sum_{i=1..r} C(r,i) i^3, the worst-case NNLS enumeration cost.
/// Valid for 1 <= r <= 30.
std::uint64_t g_of_r(unsigned r);

/// Fine/coarse per-iteration cost ratio when m shrinks to m_prime.
double reduction_factor(const CostParams& p, std::size_t m_prime,
                        SolverKind kind);

enum class Regime { kBeneficialAll, kBeneficialMuHalsOnly };

/// Multilevel payoff regime: beneficial for all three solvers when
/// m >= min(n, s_r r^2), otherwise only for MU and HALS.
Regime classify_regime(const CostParams& p);

}  // namespace mlnmf

#endif  // MLNMF_COST_MODEL_HPP_
