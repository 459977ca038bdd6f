#include "mlnmf/multilevel.hpp"

#include <stdexcept>
#include <utility>

namespace mlnmf {

namespace {

// Shared state of one cycle execution. Budgets are split by the nominal
// T/4 fractions; work left unspent by whole-step rounding is carried into
// the last phase of the enclosing level, so the final fine-level phase
// absorbs every remainder and the total never exceeds T.
struct CycleRunner {
  const GridHierarchy& h;
  SolverKind kind;
  Budget::Mode mode;
  std::size_t rank;
  std::size_t trace_every;
  SolveContext ctx;

  double step_flops(std::size_t cur) const {
    const Matrix& M = h.restricted_data[cur];
    return iteration_cost(
        CostParams::with_default_sr(M.rows(), M.cols(), rank), kind);
  }

  double phase(std::size_t cur, Matrix& V, Matrix& W, double nominal,
               double carry) {
    ctx.trace.allocations.push_back({static_cast<int>(cur) + 1, nominal});
    return run_solver_phase(h.restricted_data[cur], V, W, kind, mode,
                            nominal + carry, step_flops(cur),
                            static_cast<int>(cur) + 1, trace_every, ctx);
  }

  double nested(std::size_t cur, std::size_t lvls, Matrix& V, Matrix& W,
                double T, double carry) {
    if (lvls == 1) return phase(cur, V, W, T, carry);
    Matrix Vc = h.restrictions[cur].apply(V);
    const double leftover = nested(cur + 1, lvls - 1, Vc, W, T / 4, 0.0);
    V = h.prolongations[cur].apply(Vc);
    return phase(cur, V, W, 3 * T / 4, carry + leftover);
  }

  double vcycle(std::size_t cur, std::size_t lvls, Matrix& V, Matrix& W,
                double T, double carry) {
    if (lvls == 1) return phase(cur, V, W, T, carry);
    const double l0 = phase(cur, V, W, T / 4, 0.0);
    Matrix Vc = h.restrictions[cur].apply(V);
    const double l1 = vcycle(cur + 1, lvls - 1, Vc, W, T / 4, 0.0);
    V = h.prolongations[cur].apply(Vc);
    return phase(cur, V, W, T / 2, carry + l0 + l1);
  }

  double fmg(std::size_t cur, std::size_t lvls, Matrix& V, Matrix& W, double T,
             double carry) {
    if (lvls == 1) return phase(cur, V, W, T, carry);
    Matrix Vc = h.restrictions[cur].apply(V);
    const double l1 = fmg(cur + 1, lvls - 1, Vc, W, T / 4, 0.0);
    V = h.prolongations[cur].apply(Vc);
    return vcycle(cur, lvls, V, W, 3 * T / 4, carry + l1);
  }
};

MultilevelResult run_cycle(const GridHierarchy& h, std::size_t levels,
                           const Matrix& V0, const Matrix& W0, SolverKind kind,
                           CycleKind cycle, Budget budget,
                           std::size_t trace_every) {
  if (levels < 1 || levels > h.levels.size())
    throw std::invalid_argument("run_cycle: bad level count");
  CycleRunner run{h, kind, budget.mode, V0.cols(), trace_every, {}};
  run.ctx.unit_flops = run.step_flops(0);
  Matrix V = V0, W = W0;
  switch (cycle) {
    case CycleKind::kSingleLevel:
      run.phase(0, V, W, budget.amount, 0.0);
      break;
    case CycleKind::kNestedIteration:
      run.nested(0, levels, V, W, budget.amount, 0.0);
      break;
    case CycleKind::kVCycle:
      run.vcycle(0, levels, V, W, budget.amount, 0.0);
      break;
    case CycleKind::kFullMultigrid:
      run.fmg(0, levels, V, W, budget.amount, 0.0);
      break;
  }
  return {std::move(V), std::move(W), std::move(run.ctx.trace)};
}

}  // namespace

MultilevelResult nested_iteration(const GridHierarchy& h, std::size_t levels,
                                  const Matrix& V0, const Matrix& W0,
                                  SolverKind kind, Budget budget,
                                  std::size_t trace_every) {
  return run_cycle(h, levels, V0, W0, kind, CycleKind::kNestedIteration,
                   budget, trace_every);
}

MultilevelResult v_cycle(const GridHierarchy& h, std::size_t levels,
                         const Matrix& V0, const Matrix& W0, SolverKind kind,
                         Budget budget, std::size_t trace_every) {
  return run_cycle(h, levels, V0, W0, kind, CycleKind::kVCycle, budget,
                   trace_every);
}

MultilevelResult full_multigrid(const GridHierarchy& h, std::size_t levels,
                                const Matrix& V0, const Matrix& W0,
                                SolverKind kind, Budget budget,
                                std::size_t trace_every) {
  return run_cycle(h, levels, V0, W0, kind, CycleKind::kFullMultigrid, budget,
                   trace_every);
}

MultilevelResult run_configuration(const Matrix& M, const ImageGrid& grid,
                                   std::size_t level_count, SolverKind kind,
                                   CycleKind cycle, std::size_t rank,
                                   std::uint64_t seed, Budget budget,
                                   std::size_t trace_every) {
  if (level_count < 1)
    throw std::invalid_argument("run_configuration: need at least one level");
  // Feasibility check before any restriction work.
  ImageGrid g = grid;
  for (std::size_t l = 0; l + 1 < level_count; ++l) g = coarsen_grid(g);
  const std::size_t hierarchy_levels =
      cycle == CycleKind::kSingleLevel ? 1 : level_count;
  GridHierarchy h = GridHierarchy::build(M, grid, hierarchy_levels);
  auto [V0, W0] = random_init(M.rows(), M.cols(), rank, seed);
  return run_cycle(h, hierarchy_levels, V0, W0, kind, cycle, budget,
                   trace_every);
}

}  // namespace mlnmf
