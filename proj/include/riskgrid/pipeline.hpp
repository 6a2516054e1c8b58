#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "riskgrid/assignment.hpp"
#include "riskgrid/planner.hpp"
#include "riskgrid/scenario.hpp"

namespace riskgrid {

/*
 * File layout of an output directory. Each stage reads what the earlier
 * stages wrote, so running the stages one by one gives the same bytes as
 * run_pipeline.
 *
 *   synth    -> stack.rseg, truth.rlbl, truth.csv          (synthetic scenes)
 *   costmap  -> labels.rlbl, labels.csv, variance.rvar, variance.csv,
 *               costmap_k<k>.csv                           (one per lambda)
 *   paths    -> paths/path_i<i>_j<j>_k<k>.csv
 *   sample   -> efficiency.csv
 *   assign   -> assignment.json, f_distribution.csv, overlay.svg
 */
namespace files {
inline constexpr const char* kStack = "stack.rseg";
inline constexpr const char* kTruth = "truth.rlbl";
inline constexpr const char* kTruthCsv = "truth.csv";
inline constexpr const char* kLabels = "labels.rlbl";
inline constexpr const char* kLabelsCsv = "labels.csv";
inline constexpr const char* kVariance = "variance.rvar";
inline constexpr const char* kVarianceCsv = "variance.csv";
inline constexpr const char* kPathsDir = "paths";
inline constexpr const char* kEfficiency = "efficiency.csv";
inline constexpr const char* kAssignment = "assignment.json";
inline constexpr const char* kDistribution = "f_distribution.csv";
inline constexpr const char* kOverlay = "overlay.svg";
inline constexpr const char* kResolvedScenario = "scenario.resolved.json";
std::string cost_map_name(std::size_t k);
}  // namespace files

/// Stage seeds fanned out from the master seed.
std::uint64_t synth_seed(std::uint64_t master);
std::uint64_t efficiency_seed(std::uint64_t master);

void stage_synth(const Scenario& scenario, const std::filesystem::path& out);
void stage_costmap(const Scenario& scenario, const std::filesystem::path& out);
CandidateSet stage_paths(const Scenario& scenario, const std::filesystem::path& out);
void stage_sample(const Scenario& scenario, const std::filesystem::path& out);

/// Optional overrides for the assignment stage (CLI flags).
struct AssignOptions {
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<double> delta;
  /// Efficiency CSV to use instead of <out>/efficiency.csv.
  std::optional<std::filesystem::path> matrix_file;
};

AssignmentSolution stage_assign(const std::optional<Scenario>& scenario,
                                const std::filesystem::path& out,
                                const AssignOptions& options = {});

/// Runs every stage in order into `out`.
AssignmentSolution run_pipeline(const Scenario& scenario, const std::filesystem::path& out);

/// Reads a label map from either RLBL1 binary or label CSV.
LabelMap read_any_label_map(const std::filesystem::path& file);

}  // namespace riskgrid
