#ifndef MLNMF_BENCH_HPP_
#define MLNMF_BENCH_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "mlnmf/io.hpp"
#include "mlnmf/multilevel.hpp"

namespace mlnmf {

/// Multi-seed experiment grid. Run i of every configuration uses seed
/// base_seed + i, so all configurations see the same initial factors.
struct BenchConfig {
  std::vector<SolverKind> algorithms;
  std::vector<CycleKind> cycles;
  std::vector<std::size_t> level_counts;
  std::size_t rank = 1;
  std::size_t runs = 1;
  Budget budget;
  std::uint64_t base_seed = 0;
};

struct BenchEntry {
  SolverKind algorithm;
  CycleKind cycle;
  std::size_t levels;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool skipped = false;
  std::string note;
};

struct BenchSummary {
  std::vector<BenchEntry> entries;
};

std::string to_string(SolverKind kind);
std::string to_string(CycleKind cycle);

/// Runs the full (algorithm, cycle, levels) grid. Infeasible combinations
/// (levels too deep for the grid, multilevel on grid-less data, single-level
/// paired with levels > 1) are recorded as skipped with a note.
BenchSummary run_bench(const Dataset& d, const BenchConfig& cfg);

void save_summary_csv(const BenchSummary& s, const std::filesystem::path& path);
void save_summary_txt(const BenchSummary& s, const std::filesystem::path& path);

}  // namespace mlnmf

#endif  // MLNMF_BENCH_HPP_
