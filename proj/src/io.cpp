#include "mlnmf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlnmf {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_all_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t offset,
                             const std::string& what) {
  throw DataError(path.string() + ": " + what + " at byte offset " +
                  std::to_string(offset));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::vector<unsigned char>& bytes,
                       std::size_t& pos, const fs::path& path) {
  while (pos < bytes.size()) {
    const unsigned char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size()) parse_fail(path, pos, "unexpected end of header");
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#')
    tok.push_back(static_cast<char>(bytes[pos++]));
  return tok;
}

std::size_t parse_count(const std::string& tok, const fs::path& path,
                        std::size_t offset) {
  std::size_t value = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') parse_fail(path, offset, "expected integer, got '" + tok + "'");
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PgmImage load_pgm(const fs::path& path) {
  const auto bytes = read_all_bytes(path);
  std::size_t pos = 0;
  if (next_token(bytes, pos, path) != "P5")
    parse_fail(path, 0, "not a binary PGM (missing P5 magic)");
  std::size_t tok_off = pos;
  const std::size_t width = parse_count(next_token(bytes, pos, path), path, tok_off);
  tok_off = pos;
  const std::size_t height = parse_count(next_token(bytes, pos, path), path, tok_off);
  tok_off = pos;
  const std::size_t maxval = parse_count(next_token(bytes, pos, path), path, tok_off);
  if (width == 0 || height == 0) parse_fail(path, tok_off, "zero image dimension");
  if (maxval != 255 && maxval != 65535)
    parse_fail(path, tok_off, "unsupported maxval " + std::to_string(maxval));
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    parse_fail(path, pos, "missing whitespace after maxval");
  ++pos;
  const std::size_t bytes_per = maxval == 255 ? 1 : 2;
  const std::size_t need = width * height * bytes_per;
  if (bytes.size() - pos < need)
    parse_fail(path, pos, "truncated pixel data (need " + std::to_string(need) +
                              " bytes)");
  PgmImage img{{height, width}, std::vector<double>(width * height)};
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t off = pos + (i * width + j) * bytes_per;
      std::size_t raw = bytes[off];
      if (bytes_per == 2) raw = (raw << 8) | bytes[off + 1];
      img.pixels[img.grid.index(i, j)] = static_cast<double>(raw) * scale;
    }
  }
  return img;
}

void save_pgm(const fs::path& path, const ImageGrid& grid,
              std::span<const double> pixels) {
  if (pixels.size() != grid.pixels())
    throw std::invalid_argument("save_pgm: pixel count does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  for (std::size_t i = 0; i < grid.height; ++i) {
    for (std::size_t j = 0; j < grid.width; ++j) {
      const double v = std::clamp(pixels[grid.index(i, j)], 0.0, 1.0);
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Dataset load_pgm_dir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw DataError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream probe(entry.path(), std::ios::binary);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    if (magic[0] == 'P' && magic[1] == '5') files.push_back(entry.path());
  }
  if (files.empty())
    throw DataError(dir.string() + ": no P5 images found");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  const PgmImage first = load_pgm(files[0]);
  Matrix M(first.grid.pixels(), files.size());
  for (std::size_t j = 0; j < files.size(); ++j) {
    const PgmImage img = j == 0 ? first : load_pgm(files[j]);
    if (img.grid.height != first.grid.height ||
        img.grid.width != first.grid.width)
      throw DataError(files[j].string() + ": image dimensions differ from " +
                      files[0].string());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) M(i, j) = img.pixels[i];
  }
  return {std::move(M), first.grid, dir.filename().string()};
}

Dataset load_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<double> data;
  std::size_t cols = 0, row = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::size_t col = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      ++col;
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw DataError(path.string() + ": unparsable value at row " +
                        std::to_string(row) + " col " + std::to_string(col));
      }
      if (used != cell.size() || !std::isfinite(v))
        throw DataError(path.string() + ": unparsable value at row " +
                        std::to_string(row) + " col " + std::to_string(col));
      if (v < 0.0)
        throw DataError(path.string() + ": negative entry at row " +
                        std::to_string(row) + " col " + std::to_string(col));
      data.push_back(v);
    }
    if (cols == 0) cols = col;
    if (col != cols)
      throw DataError(path.string() + ": ragged row " + std::to_string(row) +
                      " (" + std::to_string(col) + " values, expected " +
                      std::to_string(cols) + ")");
  }
  if (data.empty()) throw DataError(path.string() + ": empty matrix");
  const std::size_t rows = data.size() / cols;
  return {Matrix::from_data(rows, cols, std::move(data)), std::nullopt,
          path.stem().string()};
}

void save_matrix_csv(const Matrix& M, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      if (j) out << ",";
      out << format_full(M(i, j));
    }
    out << "\n";
  }
}

void save_trace_csv(const RunTrace& trace, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "elapsed_s,work_units,level,error\n";
  for (const auto& s : trace.samples)
    out << format_full(s.elapsed_s) << "," << format_full(s.work_units) << ","
        << s.level << "," << format_full(s.error) << "\n";
  if (!out) throw DataError("write failed for " + path.string());
}

RunTrace load_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("elapsed_s,", 0) != 0)
    throw DataError(path.string() + ": missing trace header");
  RunTrace t;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TraceSample s{};
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    s.elapsed_s = std::stod(cell);
    std::getline(ss, cell, ',');
    s.work_units = std::stod(cell);
    std::getline(ss, cell, ',');
    s.level = std::stoi(cell);
    std::getline(ss, cell, ',');
    s.error = std::stod(cell);
    t.samples.push_back(s);
  }
  return t;
}

namespace {
// Per-column rescale: max maps to 1, an all-zero column stays zero.
std::vector<double> rescaled_column(const Matrix& V, std::size_t k) {
  std::vector<double> col(V.rows());
  double mx = 0.0;
  for (std::size_t i = 0; i < V.rows(); ++i) mx = std::max(mx, V(i, k));
  const double scale = mx > 0.0 ? 1.0 / mx : 0.0;
  for (std::size_t i = 0; i < V.rows(); ++i) col[i] = V(i, k) * scale;
  return col;
}
}  // namespace

void save_basis_mosaic(const Matrix& V, const ImageGrid& grid,
                       const fs::path& dir) {
  if (V.rows() != grid.pixels())
    throw std::invalid_argument("save_basis_mosaic: grid does not match V");
  fs::create_directories(dir);
  const std::size_t r = V.cols();
  for (std::size_t k = 0; k < r; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "basis_%03zu.pgm", k);
    save_pgm(dir / name, grid, rescaled_column(V, k));
  }
  const std::size_t tile_cols =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(r))));
  const std::size_t tile_rows = (r + tile_cols - 1) / tile_cols;
  ImageGrid mosaic{tile_rows * grid.height, tile_cols * grid.width};
  std::vector<double> pixels(mosaic.pixels(), 0.0);
  for (std::size_t k = 0; k < r; ++k) {
    const auto col = rescaled_column(V, k);
    const std::size_t ti = k / tile_cols, tj = k % tile_cols;
    for (std::size_t i = 0; i < grid.height; ++i)
      for (std::size_t j = 0; j < grid.width; ++j)
        pixels[mosaic.index(ti * grid.height + i, tj * grid.width + j)] =
            col[grid.index(i, j)];
  }
  save_pgm(dir / "mosaic.pgm", mosaic, pixels);
}

void save_error_heatmap(const Matrix& M, const Matrix& V, const Matrix& W,
                        const ImageGrid& grid, std::size_t col_index,
                        const fs::path& path) {
  if (M.rows() != grid.pixels())
    throw std::invalid_argument("save_error_heatmap: grid does not match M");
  if (col_index >= M.cols())
    throw std::invalid_argument("save_error_heatmap: column out of range");
  const std::size_t m = M.rows(), r = V.cols();
  std::vector<double> err(m);
  double mx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double pred = 0.0;
    for (std::size_t k = 0; k < r; ++k) pred += V(i, k) * W(k, col_index);
    err[i] = std::abs(M(i, col_index) - pred);
    mx = std::max(mx, err[i]);
  }
  const double scale = mx > 0.0 ? 1.0 / mx : 0.0;
  for (double& e : err) e = 1.0 - e * scale;  // dark = high error
  save_pgm(path, grid, err);
}

Dataset synth_smooth_dataset(std::size_t height, std::size_t width,
                             std::size_t n, std::size_t blobs,
                             std::uint64_t seed) {
  if (blobs < 1) throw std::invalid_argument("synth_smooth_dataset: blobs >= 1");
  const ImageGrid grid{height, width};
  Matrix M(grid.pixels(), n);
  Rng rng(seed);
  const double h = static_cast<double>(height), w = static_cast<double>(width);

  // Images share a dataset-level pool of blob prototypes; each image draws
  // `blobs` of them with a jittered center and a fresh amplitude. This gives
  // the collection the approximate low-rank structure of real image corpora
  // while every image remains a seeded-random sum of Gaussian bumps.
  struct Blob {
    double ci, cj, sigma;
  };
  std::vector<Blob> pool(2 * blobs);
  for (Blob& b : pool) {
    b.ci = rng.next_uniform() * h;
    b.cj = rng.next_uniform() * w;
    b.sigma = h / 8.0 + rng.next_uniform() * (h / 3.0 - h / 8.0);
  }
  std::vector<double> img(grid.pixels());
  for (std::size_t jcol = 0; jcol < n; ++jcol) {
    std::fill(img.begin(), img.end(), 0.0);
    for (std::size_t b = 0; b < blobs; ++b) {
      const Blob& proto = pool[rng.next_u64() % pool.size()];
      const double ci = proto.ci + (rng.next_uniform() - 0.5) * h / 24.0;
      const double cj = proto.cj + (rng.next_uniform() - 0.5) * w / 24.0;
      const double amp = 0.2 + rng.next_uniform() * 0.8;
      const double inv = 1.0 / (2.0 * proto.sigma * proto.sigma);
      for (std::size_t i = 0; i < height; ++i)
        for (std::size_t j = 0; j < width; ++j) {
          const double di = static_cast<double>(i) - ci;
          const double dj = static_cast<double>(j) - cj;
          img[grid.index(i, j)] += amp * std::exp(-(di * di + dj * dj) * inv);
        }
    }
    for (std::size_t i = 0; i < grid.pixels(); ++i)
      M(i, jcol) = std::min(1.0, img[i]);
  }
  return {std::move(M), grid, "synth"};
}

void save_dataset_pgm_dir(const Dataset& d, const fs::path& dir) {
  if (!d.grid)
    throw std::invalid_argument("save_dataset_pgm_dir: dataset has no grid");
  fs::create_directories(dir);
  std::vector<double> col(d.matrix.rows());
  for (std::size_t j = 0; j < d.matrix.cols(); ++j) {
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = d.matrix(i, j);
    char name[32];
    std::snprintf(name, sizeof(name), "img_%04zu.pgm", j);
    save_pgm(dir / name, *d.grid, col);
  }
}

}  // namespace mlnmf
