// riskgrid: risk-aware planning and assignment pipeline.
//
// Exit codes: 0 success, 2 invalid scenario or arguments, 3 no path between
// a vehicle and a demand, 4 I/O or file-format failure, 1 anything else.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "riskgrid/error.hpp"
#include "riskgrid/path_io.hpp"
#include "riskgrid/pipeline.hpp"
#include "riskgrid/raster_io.hpp"
#include "riskgrid/scenario.hpp"

namespace fs = std::filesystem;
using namespace riskgrid;

namespace {

constexpr int kExitScenario = 2;
constexpr int kExitNoPath = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<double> alpha;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool scenario_required) {
  auto* opt = cmd->add_option("--scenario", flags.scenario, "Scenario JSON file");
  if (scenario_required) opt->required();
  cmd->add_option("--out", flags.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Master seed (overrides the scenario)");
  cmd->add_option("--draws", flags.draws, "Monte Carlo draws (overrides the scenario)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", flags.alpha, "Risk level in (0, 1] (overrides the scenario)")
      ->check(CLI::Range(0.0, 1.0));
}

Scenario load(const CommonFlags& flags) {
  Scenario sc = load_scenario(flags.scenario);
  if (flags.seed) sc.seed = *flags.seed;
  if (flags.draws) sc.draws = *flags.draws;
  if (flags.alpha) {
    if (!(*flags.alpha > 0.0)) throw ScenarioError("--alpha", "must lie in (0, 1]");
    sc.alpha = *flags.alpha;
  }
  return sc;
}

void print_solution(const AssignmentSolution& sol) {
  std::cout << "alpha=" << format_real(sol.params.alpha) << " tau*=" << format_real(sol.tau_star)
            << " H=" << format_real(sol.h_value) << "\n";
  for (const TupleIndex& t : sol.selected) {
    std::cout << "  vehicle " << t.vehicle << " -> demand " << t.demand << " via path " << t.path
              << "\n";
  }
}

int run_surprise(const std::string& path_file, const std::string& truth_file,
                 const std::string& predicted_file, const ClassCosts& classes) {
  const PathRecord rec = path_from_csv(read_file(path_file));
  const LabelMap truth = read_any_label_map(truth_file);
  const LabelMap predicted = read_any_label_map(predicted_file);
  const Surprise s = surprise(rec.path, truth, predicted, classes);
  std::cout << "surprise=" << format_real(s.value) << "\n";
  if (s.truth_impassable) std::cout << "IMPASSABLE_ENCOUNTERED truth\n";
  if (s.predicted_impassable) std::cout << "IMPASSABLE_ENCOUNTERED predicted\n";
  std::cout << "row,col,truth_cost,predicted_cost\n";
  for (const SurpriseStep& step : s.steps) {
    std::cout << step.pixel.row << "," << step.pixel.col << "," << format_real(step.truth_cost)
              << "," << format_real(step.predicted_cost) << "\n";
  }
  return 0;
}

ClassCosts parse_costs(const std::string& list) {
  std::vector<double> costs;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const std::string tok = list.substr(start, comma - start);
    costs.push_back(tok == "impassable" ? kImpassable : parse_real(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  try {
    return ClassCosts(costs);
  } catch (const InvalidSpec& e) {
    throw ScenarioError("--costs", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware path planning and CVaR assignment on uncertain terrain"};
  app.require_subcommand(1);

  CommonFlags run_flags, synth_flags, costmap_flags, paths_flags, sample_flags, assign_flags;
  auto* run = app.add_subcommand("run", "Run every stage into --out");
  add_common(run, run_flags, true);
  auto* synth = app.add_subcommand("synth", "Synthesize the scene's sample stack and truth");
  add_common(synth, synth_flags, true);
  auto* costmap = app.add_subcommand("costmap", "Label, variance and per-lambda cost maps");
  add_common(costmap, costmap_flags, true);
  auto* paths = app.add_subcommand("paths", "Candidate paths for every vehicle/demand/lambda");
  add_common(paths, paths_flags, true);
  auto* sample = app.add_subcommand("sample", "Monte Carlo efficiency matrix");
  add_common(sample, sample_flags, true);

  auto* assign = app.add_subcommand("assign", "Risk-aware assignment from an efficiency matrix");
  add_common(assign, assign_flags, false);
  std::optional<std::string> matrix_file;
  std::optional<double> gamma, delta;
  assign->add_option("--matrix", matrix_file, "Efficiency CSV (default: <out>/efficiency.csv)");
  assign->add_option("--gamma", gamma, "Upper end of the tau grid")->check(CLI::PositiveNumber);
  assign->add_option("--delta", delta, "Tau grid step")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval-surprise", "Surprise of a path against ground truth");
  std::string eval_path, eval_truth, eval_predicted, eval_scenario, eval_costs;
  eval->add_option("--path", eval_path, "Path CSV")->required();
  eval->add_option("--truth", eval_truth, "Ground-truth label map (.rlbl or CSV)")->required();
  eval->add_option("--predicted", eval_predicted, "Predicted label map (.rlbl or CSV)")->required();
  auto* eval_sc = eval->add_option("--scenario", eval_scenario, "Scenario supplying class costs");
  auto* eval_cost_opt =
      eval->add_option("--costs", eval_costs, "Comma-separated class costs ('impassable' allowed)");
  eval_sc->excludes(eval_cost_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitScenario;
  }

  try {
    if (*run) {
      const Scenario sc = load(run_flags);
      print_solution(run_pipeline(sc, run_flags.out));
    } else if (*synth) {
      stage_synth(load(synth_flags), synth_flags.out);
    } else if (*costmap) {
      stage_costmap(load(costmap_flags), costmap_flags.out);
    } else if (*paths) {
      const CandidateSet c = stage_paths(load(paths_flags), paths_flags.out);
      for (const auto& [a, b] : c.coincident_candidates()) {
        std::cerr << "note: candidates k=" << a.path << " and k=" << b.path << " of vehicle "
                  << a.vehicle << " -> demand " << a.demand << " coincide\n";
      }
    } else if (*sample) {
      stage_sample(load(sample_flags), sample_flags.out);
    } else if (*assign) {
      std::optional<Scenario> sc;
      if (!assign_flags.scenario.empty()) sc = load(assign_flags);
      AssignOptions options;
      options.alpha = assign_flags.alpha;
      options.gamma = gamma;
      options.delta = delta;
      if (matrix_file) options.matrix_file = fs::path(*matrix_file);
      print_solution(stage_assign(sc, assign_flags.out, options));
    } else if (*eval) {
      if (eval_scenario.empty() && eval_costs.empty()) {
        throw ScenarioError("eval-surprise", "pass --scenario or --costs");
      }
      const ClassCosts classes =
          eval_scenario.empty() ? parse_costs(eval_costs) : load_scenario(eval_scenario).classes;
      return run_surprise(eval_path, eval_truth, eval_predicted, classes);
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  } catch (const InvalidSpec& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitScenario;
  } catch (const InvalidEndpoint& e) {
    std::cerr << "invalid endpoint: " << e.what() << "\n";
    return kExitScenario;
  } catch (const NoPath& e) {
    std::cerr << "no path: " << e.what() << "\n";
    if (const auto& ctx = e.context()) {
      std::cerr << "offending (i,j,lambda) = (" << ctx->vehicle << "," << ctx->demand << ","
                << format_real(ctx->lambda) << ")\n";
    }
    return kExitNoPath;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const MalformedHeader& e) {
    std::cerr << "bad file: " << e.what() << "\n";
    return kExitIo;
  } catch (const DimensionMismatch& e) {
    std::cerr << "bad file: " << e.what() << "\n";
    return kExitIo;
  } catch (const ProbabilityDrift& e) {
    std::cerr << "bad file: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "bad file: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
