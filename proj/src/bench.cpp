#include "mlnmf/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mlnmf {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kAnls: return "anls";
    case SolverKind::kMu: return "mu";
    case SolverKind::kHals: return "hals";
  }
  return "?";
}

std::string to_string(CycleKind cycle) {
  switch (cycle) {
    case CycleKind::kSingleLevel: return "none";
    case CycleKind::kNestedIteration: return "ni";
    case CycleKind::kVCycle: return "vc";
    case CycleKind::kFullMultigrid: return "fmg";
  }
  return "?";
}

BenchSummary run_bench(const Dataset& d, const BenchConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run_bench: runs >= 1");
  BenchSummary summary;
  for (SolverKind algo : cfg.algorithms) {
    for (CycleKind cycle : cfg.cycles) {
      for (std::size_t levels : cfg.level_counts) {
        BenchEntry e{algo, cycle, levels};
        if (cycle == CycleKind::kSingleLevel && levels != 1) {
          e.skipped = true;
          e.note = "single-level runs use exactly one level";
          summary.entries.push_back(e);
          continue;
        }
        if (levels > 1 && !d.grid) {
          e.skipped = true;
          e.note = "dataset has no pixel grid";
          summary.entries.push_back(e);
          continue;
        }
        const ImageGrid grid =
            d.grid ? *d.grid : ImageGrid{d.matrix.rows(), 1};
        std::vector<double> errors;
        errors.reserve(cfg.runs);
        try {
          for (std::size_t i = 0; i < cfg.runs; ++i) {
            auto res = run_configuration(d.matrix, grid, levels, algo, cycle,
                                         cfg.rank, cfg.base_seed + i,
                                         cfg.budget, /*trace_every=*/0);
            errors.push_back(res.trace.final_error());
          }
        } catch (const std::invalid_argument& ex) {
          e.skipped = true;
          e.note = ex.what();
          summary.entries.push_back(e);
          continue;
        }
        e.runs = errors.size();
        double sum = 0.0, mn = errors[0], mx = errors[0];
        for (double v : errors) {
          sum += v;
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        e.mean = sum / static_cast<double>(errors.size());
        double ss = 0.0;
        for (double v : errors) ss += (v - e.mean) * (v - e.mean);
        e.stddev = errors.size() > 1
                       ? std::sqrt(ss / static_cast<double>(errors.size() - 1))
                       : 0.0;
        e.min = mn;
        e.max = mx;
        summary.entries.push_back(e);
      }
    }
  }
  return summary;
}

void save_summary_csv(const BenchSummary& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "algorithm,cycle,levels,runs,mean_error,std_error,min_error,max_error,note\n";
  char buf[256];
  for (const auto& e : s.entries) {
    if (e.skipped) {
      out << to_string(e.algorithm) << "," << to_string(e.cycle) << ","
          << e.levels << ",0,,,,," << e.note << "\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%zu,%.17g,%.17g,%.17g,%.17g,\n",
                  to_string(e.algorithm).c_str(), to_string(e.cycle).c_str(),
                  e.levels, e.runs, e.mean, e.stddev, e.min, e.max);
    out << buf;
  }
}

void save_summary_txt(const BenchSummary& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "Mean final error ||M - VW||_F per configuration\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-6s %-5s %-6s %-6s %-14s %-14s %-14s %-14s\n",
                "algo", "cycle", "levels", "runs", "mean", "std", "min", "max");
  out << buf;
  for (const auto& e : s.entries) {
    if (e.skipped) {
      std::snprintf(buf, sizeof(buf), "%-6s %-5s %-6zu skipped: %s\n",
                    to_string(e.algorithm).c_str(), to_string(e.cycle).c_str(),
                    e.levels, e.note.c_str());
    } else {
      std::snprintf(buf, sizeof(buf),
                    "%-6s %-5s %-6zu %-6zu %-14.6g %-14.6g %-14.6g %-14.6g\n",
                    to_string(e.algorithm).c_str(), to_string(e.cycle).c_str(),
                    e.levels, e.runs, e.mean, e.stddev, e.min, e.max);
    }
    out << buf;
  }
}

}  // namespace mlnmf
