#ifndef MLNMF_MULTILEVEL_HPP_
#define MLNMF_MULTILEVEL_HPP_

#include <cstdint>

#include "mlnmf/solvers.hpp"
#include "mlnmf/transfer.hpp"

namespace mlnmf {

enum class CycleKind { kSingleLevel, kNestedIteration, kVCycle, kFullMultigrid };

struct MultilevelResult {
  Matrix V;
  Matrix W;
  RunTrace trace;
};

/// Coarse-to-fine initialization: recurse on the restricted data with T/4,
/// prolong, then iterate at the current level with 3T/4. `levels` counts the
/// levels still in play; levels = 1 is a plain solver run.
MultilevelResult nested_iteration(const GridHierarchy& h, std::size_t levels,
                                  const Matrix& V0, const Matrix& W0,
                                  SolverKind kind, Budget budget,
                                  std::size_t trace_every = 1);

/// T/4 at the current level, T/4 in the recursion, T/2 back at the current
/// level.
MultilevelResult v_cycle(const GridHierarchy& h, std::size_t levels,
                         const Matrix& V0, const Matrix& W0, SolverKind kind,
                         Budget budget, std::size_t trace_every = 1);

/// Recursive full multigrid with T/4, then a V-cycle at the current level
/// with 3T/4.
MultilevelResult full_multigrid(const GridHierarchy& h, std::size_t levels,
                                const Matrix& V0, const Matrix& W0,
                                SolverKind kind, Budget budget,
                                std::size_t trace_every = 1);

/// Top-level entry: builds the hierarchy, seeds the initial factors and
/// dispatches to the chosen cycle. In work-unit mode the result is
/// bit-deterministic for fixed inputs.
MultilevelResult run_configuration(const Matrix& M, const ImageGrid& grid,
                                   std::size_t level_count, SolverKind kind,
                                   CycleKind cycle, std::size_t rank,
                                   std::uint64_t seed, Budget budget,
                                   std::size_t trace_every = 1);

}  // namespace mlnmf

#endif  // MLNMF_MULTILEVEL_HPP_
