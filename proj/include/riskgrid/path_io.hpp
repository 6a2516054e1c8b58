#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "riskgrid/planner.hpp"

namespace riskgrid {

/// A path CSV with the tuple it belongs to.
struct PathRecord {
  TupleIndex tuple;
  GridPath path;
};

/// "# i=..,j=..,k=..,lambda=..,planned_cost=.." comment, a "row,col" header,
/// then one pixel per line from start to goal.
std::string path_to_csv(TupleIndex tuple, const GridPath& path);
PathRecord path_from_csv(std::string_view text);

/// "path_i<i>_j<j>_k<k>.csv"
std::string path_file_name(TupleIndex tuple);

/// Writes one CSV per candidate into `dir` (created if needed).
void write_candidate_dir(const std::filesystem::path& dir, const CandidateSet& candidates);
/// Rebuilds a candidate set from a directory written by write_candidate_dir.
CandidateSet read_candidate_dir(const std::filesystem::path& dir);

/// Label map tinted by uncertainty, with every candidate drawn on top;
/// `highlighted` tuples are drawn thicker.
std::string render_overlay_svg(const LabelMap& labels, const VarianceMap& variance,
                               const CandidateSet& candidates,
                               std::span<const TupleIndex> highlighted = {});

}  // namespace riskgrid
