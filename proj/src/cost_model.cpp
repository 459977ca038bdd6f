#include "mlnmf/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace mlnmf {

double mu_iteration_cost(const CostParams& p) {
  const double m = static_cast<double>(p.m), n = static_cast<double>(p.n),
               r = static_cast<double>(p.r);
  return 2.0 * m * (n * r + r * r) + 2.0 * n * r * r;
}

double anls_iteration_cost(const CostParams& p) {
  const double m = static_cast<double>(p.m), n = static_cast<double>(p.n),
               r = static_cast<double>(p.r);
  return m * n * r + (m + n) * p.s_r * r * r * r;
}

double iteration_cost(const CostParams& p, SolverKind kind) {
  return kind == SolverKind::kAnls ? anls_iteration_cost(p)
                                   : mu_iteration_cost(p);
}

std::uint64_t g_of_r(unsigned r) {
  if (r < 1 || r > 30)
    throw std::invalid_argument("g_of_r: r must be in [1, 30]");
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(r, 0)
  for (unsigned i = 1; i <= r; ++i) {
    binom = binom * (r - i + 1) / i;
    total += binom * static_cast<std::uint64_t>(i) * i * i;
  }
  return total;
}

double reduction_factor(const CostParams& p, std::size_t m_prime,
                        SolverKind kind) {
  if (m_prime > p.m)
    throw std::invalid_argument("reduction_factor: m_prime exceeds m");
  CostParams coarse = p;
  coarse.m = m_prime;
  return iteration_cost(p, kind) / iteration_cost(coarse, kind);
}

Regime classify_regime(const CostParams& p) {
  const double m = static_cast<double>(p.m);
  const double threshold =
      std::min(static_cast<double>(p.n),
               p.s_r * static_cast<double>(p.r) * static_cast<double>(p.r));
  return m >= threshold ? Regime::kBeneficialAll
                        : Regime::kBeneficialMuHalsOnly;
}

}  // namespace mlnmf
