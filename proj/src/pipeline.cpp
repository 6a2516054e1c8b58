#include "riskgrid/pipeline.hpp"

#include "riskgrid/efficiency.hpp"
#include "riskgrid/matrix_io.hpp"
#include "riskgrid/path_io.hpp"
#include "riskgrid/raster_io.hpp"
#include "riskgrid/solution_io.hpp"
#include "riskgrid/synth.hpp"

namespace riskgrid {

namespace fs = std::filesystem;

namespace files {
std::string cost_map_name(std::size_t k) { return "costmap_k" + std::to_string(k) + ".csv"; }
}  // namespace files

std::uint64_t synth_seed(std::uint64_t master) { return derive_seed(master, "stage.synth"); }
std::uint64_t efficiency_seed(std::uint64_t master) {
  return derive_seed(master, "stage.efficiency");
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

fs::path stack_path(const Scenario& sc, const fs::path& out) {
  if (sc.synth) return out / files::kStack;
  if (!sc.stack_file) throw ScenarioError("/scene", "no sample stack configured");
  return *sc.stack_file;
}

void check_endpoints(const Scenario& sc, const LabelMap& labels) {
  check_scenario_bounds(sc, labels.width(), labels.height());
  auto check = [&](const std::vector<Pixel>& ps, const char* field) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (is_impassable(sc.classes.at(labels.labels[ps[i]]))) {
        throw ScenarioError(std::string("/") + field + "/" + std::to_string(i),
                            "pixel (" + std::to_string(ps[i].row) + "," +
                                std::to_string(ps[i].col) + ") is impassable");
      }
    }
  };
  check(sc.vehicles, "vehicles");
  check(sc.demands, "demands");
}

}  // namespace

LabelMap read_any_label_map(const fs::path& file) {
  const std::string bytes = read_file(file);
  if (bytes.starts_with(std::string_view("RLBL1\0", 6))) return decode_label_map(bytes);
  return label_map_from_csv(bytes);
}

void stage_synth(const Scenario& sc, const fs::path& out) {
  if (!sc.synth) throw ScenarioError("/scene", "scenario has no 'synth' block");
  ensure_dir(out);
  const SyntheticScene scene = synth_scene(*sc.synth, synth_seed(sc.seed));
  write_sample_stack(out / files::kStack, scene.stack);
  write_label_map(out / files::kTruth, scene.truth);
  write_file(out / files::kTruthCsv, label_map_to_csv(scene.truth));
}

void stage_costmap(const Scenario& sc, const fs::path& out) {
  ensure_dir(out);
  const SampleStack stack = read_sample_stack(stack_path(sc, out));
  if (stack.num_classes() != static_cast<int>(sc.classes.size())) {
    throw ScenarioError("/classes", "stack has " + std::to_string(stack.num_classes()) +
                                        " classes, scenario lists " +
                                        std::to_string(sc.classes.size()));
  }
  check_scenario_bounds(sc, stack.width(), stack.height());
  const LabelMap labels = mode_label(stack);
  const VarianceMap variance = pixel_uncertainty(stack);
  write_label_map(out / files::kLabels, labels);
  write_file(out / files::kLabelsCsv, label_map_to_csv(labels));
  write_variance_map(out / files::kVariance, variance);
  write_file(out / files::kVarianceCsv, real_grid_to_csv(variance));
  for (std::size_t k = 0; k < sc.lambdas.size(); ++k) {
    const RiskCostMap costs = build_cost_map(labels, variance, {sc.classes, sc.lambdas[k]});
    write_file(out / files::cost_map_name(k),
               "# lambda=" + format_real(sc.lambdas[k]) + "\n" + real_grid_to_csv(costs));
  }
}

CandidateSet stage_paths(const Scenario& sc, const fs::path& out) {
  const LabelMap labels = read_label_map(out / files::kLabels);
  const VarianceMap variance = read_variance_map(out / files::kVariance);
  check_endpoints(sc, labels);
  CandidateSet candidates =
      generate_candidates(labels, variance, sc.classes, sc.lambdas, sc.vehicles, sc.demands);
  const fs::path dir = out / files::kPathsDir;
  // Drop paths from an earlier run with a different shape.
  std::error_code ec;
  fs::remove_all(dir, ec);
  write_candidate_dir(dir, candidates);
  return candidates;
}

void stage_sample(const Scenario& sc, const fs::path& out) {
  const SampleStack stack = read_sample_stack(stack_path(sc, out));
  const CandidateSet candidates = read_candidate_dir(out / files::kPathsDir);
  const EfficiencyMatrix matrix =
      build_efficiency_matrix(candidates, stack, sc.classes, sc.draws, efficiency_seed(sc.seed));
  write_file(out / files::kEfficiency, efficiency_to_csv(matrix));
}

AssignmentSolution stage_assign(const std::optional<Scenario>& sc, const fs::path& out,
                                const AssignOptions& options) {
  ensure_dir(out);
  const fs::path matrix_file = options.matrix_file.value_or(out / files::kEfficiency);
  const EfficiencyMatrix matrix = efficiency_from_csv(read_file(matrix_file));

  const double alpha = options.alpha.value_or(sc ? sc->alpha : 1.0);
  const auto gamma = options.gamma ? options.gamma : (sc ? sc->gamma : std::nullopt);
  const auto delta = options.delta ? options.delta : (sc ? sc->delta : std::nullopt);
  const RiskParams params = default_risk_params(matrix, alpha, gamma, delta);
  AssignmentSolution solution = sga_assign(matrix, params);

  std::optional<CandidateSet> candidates;
  const fs::path paths_dir = out / files::kPathsDir;
  if (!options.matrix_file && fs::is_directory(paths_dir)) {
    candidates = read_candidate_dir(paths_dir);
  }

  SolutionRecord record{solution, sc ? sc->seed : 0, matrix.num_draws(), {}};
  if (candidates) record.lambdas = candidates->lambdas();
  write_file(out / files::kAssignment, solution_to_json(record));
  write_file(out / files::kDistribution,
             distribution_to_csv(efficiency_distribution(solution.selected, matrix)));

  if (sc) {
    Scenario resolved = *sc;
    resolved.alpha = params.alpha;
    resolved.gamma = params.gamma;
    resolved.delta = params.delta;
    resolved.draws = matrix.num_draws();
    write_file(out / files::kResolvedScenario, scenario_to_json(resolved));
  }
  if (candidates && fs::exists(out / files::kLabels) && fs::exists(out / files::kVariance)) {
    write_file(out / files::kOverlay,
               render_overlay_svg(read_label_map(out / files::kLabels),
                                  read_variance_map(out / files::kVariance), *candidates,
                                  solution.selected));
  }
  return solution;
}

AssignmentSolution run_pipeline(const Scenario& sc, const fs::path& out) {
  if (sc.synth) stage_synth(sc, out);
  stage_costmap(sc, out);
  stage_paths(sc, out);
  stage_sample(sc, out);
  return stage_assign(sc, out);
}

}  // namespace riskgrid
