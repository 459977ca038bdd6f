#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlnmf/bench.hpp"
#include "mlnmf/io.hpp"
#include "mlnmf/multilevel.hpp"

namespace fs = std::filesystem;
using namespace mlnmf;

namespace {

Budget parse_budget(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--budget", "expected work:<units> or time:<seconds>");
  const std::string mode = spec.substr(0, colon);
  double amount;
  try {
    amount = std::stod(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--budget", "unparsable amount in '" + spec + "'");
  }
  if (amount <= 0.0)
    throw CLI::ValidationError("--budget", "amount must be positive");
  if (mode == "work") return {Budget::Mode::kWorkUnits, amount};
  if (mode == "time") return {Budget::Mode::kWallClockSeconds, amount};
  throw CLI::ValidationError("--budget", "unknown mode '" + mode + "'");
}

SolverKind parse_algo(const std::string& s) {
  if (s == "anls") return SolverKind::kAnls;
  if (s == "mu") return SolverKind::kMu;
  if (s == "hals") return SolverKind::kHals;
  throw CLI::ValidationError("--algo", "unknown algorithm '" + s + "'");
}

CycleKind parse_cycle(const std::string& s) {
  if (s == "none") return CycleKind::kSingleLevel;
  if (s == "ni") return CycleKind::kNestedIteration;
  if (s == "vc") return CycleKind::kVCycle;
  if (s == "fmg") return CycleKind::kFullMultigrid;
  throw CLI::ValidationError("--cycle", "unknown cycle '" + s + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

Dataset load_dataset(const std::string& path, const std::string& format,
                     std::size_t grid_h, std::size_t grid_w) {
  Dataset d;
  if (format == "pgm-dir") {
    d = load_pgm_dir(path);
  } else if (format == "csv") {
    d = load_csv(path);
  } else {
    throw CLI::ValidationError("--format", "expected pgm-dir or csv");
  }
  if (grid_h > 0 && grid_w > 0) {
    if (grid_h * grid_w != d.matrix.rows())
      throw DataError("grid dimensions do not match matrix rows");
    d.grid = ImageGrid{grid_h, grid_w};
  }
  return d;
}

int run(int argc, char** argv) {
  CLI::App app{"Multilevel-accelerated nonnegative matrix factorization"};
  app.require_subcommand(1);

  std::string data_path, format = "pgm-dir", out_prefix, budget_spec;
  std::string algo = "mu", cycle = "none", algos = "mu", cycles = "none";
  std::string levels_list = "1";
  std::size_t levels = 1, rank = 1, runs = 1, trace_every = 1;
  std::size_t grid_h = 0, grid_w = 0;
  std::uint64_t seed = 0;

  auto* fac = app.add_subcommand("factorize", "Run one factorization");
  fac->add_option("--data", data_path)->required();
  fac->add_option("--format", format);
  fac->add_option("--algo", algo);
  fac->add_option("--cycle", cycle);
  fac->add_option("--levels", levels);
  fac->add_option("--rank", rank)->required();
  fac->add_option("--budget", budget_spec)->required();
  fac->add_option("--seed", seed);
  fac->add_option("--trace-every", trace_every);
  fac->add_option("--grid-height", grid_h);
  fac->add_option("--grid-width", grid_w);
  fac->add_option("--out", out_prefix)->required();

  auto* bench = app.add_subcommand("bench", "Multi-seed benchmark grid");
  bench->add_option("--data", data_path)->required();
  bench->add_option("--format", format);
  bench->add_option("--algos", algos);
  bench->add_option("--cycles", cycles);
  bench->add_option("--levels", levels_list);
  bench->add_option("--rank", rank)->required();
  bench->add_option("--runs", runs);
  bench->add_option("--budget", budget_spec)->required();
  bench->add_option("--seed", seed);
  bench->add_option("--grid-height", grid_h);
  bench->add_option("--grid-width", grid_w);
  bench->add_option("--out", out_prefix)->required();

  auto* tc = app.add_subcommand("transfer-check", "Pyramid diagnostics");
  tc->add_option("--data", data_path)->required();
  tc->add_option("--format", format);
  tc->add_option("--levels", levels);
  tc->add_option("--grid-height", grid_h);
  tc->add_option("--grid-width", grid_w);

  std::size_t sh = 65, sw = 65, sn = 40, sblobs = 3;
  auto* synth = app.add_subcommand("synth", "Write a synthetic PGM dataset");
  synth->add_option("--height", sh);
  synth->add_option("--width", sw);
  synth->add_option("--n", sn);
  synth->add_option("--blobs", sblobs);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out_prefix)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (fac->parsed()) {
    const Dataset d = load_dataset(data_path, format, grid_h, grid_w);
    const CycleKind ck = parse_cycle(cycle);
    if (ck != CycleKind::kSingleLevel && levels > 1 && !d.grid)
      throw CLI::ValidationError("--levels",
                                 "multilevel cycles need a pixel grid");
    const ImageGrid grid = d.grid ? *d.grid : ImageGrid{d.matrix.rows(), 1};
    auto res = run_configuration(d.matrix, grid, levels, parse_algo(algo), ck,
                                 rank, seed, parse_budget(budget_spec),
                                 trace_every);
    save_trace_csv(res.trace, out_prefix + ".trace.csv");
    save_matrix_csv(res.V, out_prefix + ".V.csv");
    save_matrix_csv(res.W, out_prefix + ".W.csv");
    if (d.grid) save_basis_mosaic(res.V, *d.grid, out_prefix + ".basis");
    std::printf("final error %.10g (%zu trace samples) -> %s.*\n",
                res.trace.final_error(), res.trace.samples.size(),
                out_prefix.c_str());
    return 0;
  }

  if (bench->parsed()) {
    const Dataset d = load_dataset(data_path, format, grid_h, grid_w);
    BenchConfig cfg;
    for (const auto& a : split_commas(algos)) cfg.algorithms.push_back(parse_algo(a));
    for (const auto& c : split_commas(cycles)) cfg.cycles.push_back(parse_cycle(c));
    for (const auto& l : split_commas(levels_list))
      cfg.level_counts.push_back(std::stoul(l));
    cfg.rank = rank;
    cfg.runs = runs;
    cfg.budget = parse_budget(budget_spec);
    cfg.base_seed = seed;
    const BenchSummary s = run_bench(d, cfg);
    save_summary_csv(s, out_prefix + ".summary.csv");
    save_summary_txt(s, out_prefix + ".summary.txt");
    std::ifstream txt(out_prefix + ".summary.txt");
    std::cout << txt.rdbuf();
    return 0;
  }

  if (tc->parsed()) {
    const Dataset d = load_dataset(data_path, format, grid_h, grid_w);
    if (!d.grid) throw DataError("transfer-check needs a pixel grid");
    const GridHierarchy h = GridHierarchy::build(d.matrix, *d.grid, levels);
    for (std::size_t l = 0; l + 1 < h.levels.size(); ++l) {
      const double s_M = smoothness(h.restricted_data[l], h.restrictions[l],
                                    h.prolongations[l]);
      double max_dev_r = 0.0, max_dev_p = 0.0;
      for (std::size_t i = 0; i < h.restrictions[l].out_dim(); ++i)
        max_dev_r = std::max(max_dev_r,
                             std::abs(h.restrictions[l].row_sum(i) - 1.0));
      for (std::size_t i = 0; i < h.prolongations[l].out_dim(); ++i)
        max_dev_p = std::max(max_dev_p,
                             std::abs(h.prolongations[l].row_sum(i) - 1.0));
      std::printf(
          "level %zu (%zux%zu -> %zux%zu): s_M = %.6g, max |row sum - 1|: "
          "R %.3g, P %.3g\n",
          l + 1, h.levels[l].height, h.levels[l].width, h.levels[l + 1].height,
          h.levels[l + 1].width, s_M, max_dev_r, max_dev_p);
    }
    return 0;
  }

  // synth
  const Dataset d = synth_smooth_dataset(sh, sw, sn, sblobs, seed);
  save_dataset_pgm_dir(d, out_prefix);
  std::printf("wrote %zu images (%zux%zu) to %s\n", d.matrix.cols(), sh, sw,
              out_prefix.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NnlsCapExceeded& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
