#ifndef MLNMF_IO_HPP_
#define MLNMF_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "mlnmf/matrix.hpp"
#include "mlnmf/solvers.hpp"
#include "mlnmf/transfer.hpp"

namespace mlnmf {

/// A loaded collection: one column per image (or a raw CSV matrix). The grid
/// is absent for CSV data without pixel-layout metadata.
struct Dataset {
  Matrix matrix;
  std::optional<ImageGrid> grid;
  std::string name;
};

struct PgmImage {
  ImageGrid grid;
  std::vector<double> pixels;  // column-vectorized, scaled to [0,1]
};

/// Binary PGM (P5), maxval 255 or 65535 (big-endian 16-bit). Parse errors
/// carry the filename and byte offset.
PgmImage load_pgm(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM; `pixels` are column-vectorized values in [0,1].
void save_pgm(const std::filesystem::path& path, const ImageGrid& grid,
              std::span<const double> pixels);

/// Loads every P5 file in the directory (byte-wise ascending filename order)
/// as one matrix column each. All images must share the same dimensions.
Dataset load_pgm_dir(const std::filesystem::path& dir);

/// Rectangular comma-separated nonnegative matrix, no header. CRLF accepted.
Dataset load_csv(const std::filesystem::path& path);

void save_matrix_csv(const Matrix& M, const std::filesystem::path& path);

/// Header "elapsed_s,work_units,level,error", one line per sample, full
/// round-trippable precision.
void save_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
RunTrace load_trace_csv(const std::filesystem::path& path);

/// One PGM per basis column (rescaled so the column max maps to white; a zero
/// column stays black) plus a near-square tiled mosaic, under `dir`.
void save_basis_mosaic(const Matrix& V, const ImageGrid& grid,
                       const std::filesystem::path& dir);

/// |M_{:col} - (VW)_{:col}| as a PGM, inverted so high error is dark.
void save_error_heatmap(const Matrix& M, const Matrix& V, const Matrix& W,
                        const ImageGrid& grid, std::size_t col_index,
                        const std::filesystem::path& path);

/// Seeded synthetic image set: each image is a clipped sum of `blobs`
/// isotropic Gaussian bumps with random centers, widths in [h/8, h/3] and
/// amplitudes in [0.2, 1].
Dataset synth_smooth_dataset(std::size_t height, std::size_t width,
                             std::size_t n, std::size_t blobs,
                             std::uint64_t seed);

/// Writes the synthetic dataset as numbered PGM files under `dir`.
void save_dataset_pgm_dir(const Dataset& d, const std::filesystem::path& dir);

}  // namespace mlnmf

#endif  // MLNMF_IO_HPP_
