#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "riskgrid/terrain.hpp"

namespace riskgrid {

/*
 * Binary raster formats. All are little-endian and share one header:
 *
 *   6 bytes magic ("RSEG1\0", "RLBL1\0" or "RVAR1\0")
 *   u32 width, u32 height, u32 num_classes, u32 num_samples
 *
 * RSEG1 payload: width*height*num_classes*num_samples float32 in
 *                (sample, row, col, class) order.
 * RLBL1 payload: width*height uint32 labels, row-major; num_samples = 1.
 * RVAR1 payload: width*height float64 values, row-major; num_classes =
 *                num_samples = 1.
 */

/// Pixel sums further than this from 1 are rejected on ingest.
inline constexpr double kIngestSumTolerance = 1e-3;
/// Pixel sums within this of 1 are kept bit-exact; anything between this and
/// kIngestSumTolerance is rescaled to sum to 1.
inline constexpr double kRenormalizeThreshold = 1e-6;

std::string encode_sample_stack(const SampleStack& stack);
/// Throws MalformedHeader, DimensionMismatch or ProbabilityDrift.
SampleStack decode_sample_stack(std::string_view bytes);

std::string encode_label_map(const LabelMap& labels);
LabelMap decode_label_map(std::string_view bytes);

std::string encode_variance_map(const VarianceMap& variance);
VarianceMap decode_variance_map(std::string_view bytes);

/// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file, replacing it; throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);

SampleStack read_sample_stack(const std::filesystem::path& path);
void write_sample_stack(const std::filesystem::path& path, const SampleStack& stack);
LabelMap read_label_map(const std::filesystem::path& path);
void write_label_map(const std::filesystem::path& path, const LabelMap& labels);
VarianceMap read_variance_map(const std::filesystem::path& path);
void write_variance_map(const std::filesystem::path& path, const VarianceMap& variance);

// CSV grids: one raster row per line, comma separated. Label grids start with
// a "# num_classes=<C>" comment. Real grids use the shortest round-trip
// decimal form and "inf" for impassable cells.
std::string label_map_to_csv(const LabelMap& labels);
LabelMap label_map_from_csv(std::string_view text);
std::string real_grid_to_csv(const Grid<double>& grid);
Grid<double> real_grid_from_csv(std::string_view text);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);
/// Parses a full token as a double ("inf" allowed); throws ParseError.
double parse_real(std::string_view token);

}  // namespace riskgrid
