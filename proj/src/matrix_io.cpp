#include "riskgrid/matrix_io.hpp"

#include <algorithm>
#include <map>

#include "riskgrid/error.hpp"
#include "riskgrid/raster_io.hpp"
#include "text_util.hpp"

namespace riskgrid {

namespace {

constexpr std::string_view kMatrixHeader = "i,j,k,draw,efficiency";
constexpr std::string_view kDistributionHeader = "draw,f";

}  // namespace

std::string efficiency_to_csv(const EfficiencyMatrix& matrix) {
  std::string out(kMatrixHeader);
  out.push_back('\n');
  for (const TupleIndex t : matrix.tuples()) {
    const auto draws = matrix.draws(t);
    const std::string prefix = std::to_string(t.vehicle) + "," + std::to_string(t.demand) + "," +
                               std::to_string(t.path) + ",";
    for (std::size_t d = 0; d < draws.size(); ++d) {
      out += prefix + std::to_string(d) + "," + format_real(draws[d]) + "\n";
    }
  }
  return out;
}

EfficiencyMatrix efficiency_from_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines.front()) != kMatrixHeader) {
    throw ParseError("efficiency CSV must start with the header '" + std::string(kMatrixHeader) +
                     "'");
  }
  std::map<TupleIndex, std::map<int, double>> rows;
  int max_draw = -1;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (detail::trim(lines[n]).empty()) continue;
    const auto cells = detail::split(lines[n], ',');
    if (cells.size() != 5) {
      throw ParseError("efficiency CSV line " + std::to_string(n + 1) + ": expected 5 fields");
    }
    const TupleIndex t{detail::parse_int<int>(cells[0]), detail::parse_int<int>(cells[1]),
                       detail::parse_int<int>(cells[2])};
    const int draw = detail::parse_int<int>(cells[3]);
    if (draw < 0) throw ParseError("efficiency CSV: negative draw index");
    if (!rows[t].emplace(draw, parse_real(cells[4])).second) {
      throw ParseError("efficiency CSV line " + std::to_string(n + 1) + ": duplicate row");
    }
    max_draw = std::max(max_draw, draw);
  }
  if (rows.empty()) throw ParseError("efficiency CSV has no rows");

  const int num_draws = max_draw + 1;
  std::vector<TupleIndex> tuples;
  std::vector<double> samples;
  for (const auto& [t, draws] : rows) {
    if (static_cast<int>(draws.size()) != num_draws) {
      throw ParseError("efficiency CSV: a tuple is missing draws");
    }
    tuples.push_back(t);
    for (const auto& [d, e] : draws) samples.push_back(e);
  }
  return EfficiencyMatrix(std::move(tuples), num_draws, std::move(samples));
}

std::string distribution_to_csv(const std::vector<double>& samples) {
  std::string out(kDistributionHeader);
  out.push_back('\n');
  for (std::size_t d = 0; d < samples.size(); ++d) {
    out += std::to_string(d) + "," + format_real(samples[d]) + "\n";
  }
  return out;
}

std::vector<double> distribution_from_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines.front()) != kDistributionHeader) {
    throw ParseError("distribution CSV must start with 'draw,f'");
  }
  std::vector<double> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (detail::trim(lines[n]).empty()) continue;
    const auto cells = detail::split(lines[n], ',');
    if (cells.size() != 2 || detail::parse_int<std::size_t>(cells[0]) != out.size()) {
      throw ParseError("distribution CSV line " + std::to_string(n + 1) + " is malformed");
    }
    out.push_back(parse_real(cells[1]));
  }
  return out;
}

}  // namespace riskgrid
