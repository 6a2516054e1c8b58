#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskgrid/error.hpp"
#include "riskgrid/synth.hpp"
#include "riskgrid/terrain.hpp"

namespace riskgrid {

/// A scenario that failed validation. `where` is "line N" for syntax errors
/// or a JSON pointer such as "/vehicles/2" for field errors.
class ScenarioError : public Error {
 public:
  ScenarioError(std::string where, const std::string& message)
      : Error(where + ": " + message), where_(std::move(where)) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/**
 * Experiment configuration. Pixels are (row, col) grid indices, costs are
 * dimensionless. Relative file paths resolve against the scenario file's
 * directory.
 *
 *   {
 *     "scene": {"synth": {...}} | {"stack": "x.rseg", "truth": "y.rlbl"},
 *     "classes": [{"name": "road", "cost": 1}, {"name": "water", "cost": "impassable"}],
 *     "lambdas": [10, 50],
 *     "vehicles": [{"row": 8, "col": 5}, ...],
 *     "demands": [{"row": 12, "col": 58}, ...],
 *     "risk": {"alpha": 0.01, "gamma": null, "delta": null},
 *     "draws": 600,
 *     "seed": 7
 *   }
 */
struct Scenario {
  std::optional<SceneSpec> synth;
  std::optional<std::filesystem::path> stack_file;
  std::optional<std::filesystem::path> truth_file;
  std::vector<std::string> class_names;
  ClassCosts classes;
  std::vector<double> lambdas;
  std::vector<Pixel> vehicles;
  std::vector<Pixel> demands;
  double alpha = 1.0;
  std::optional<double> gamma;
  std::optional<double> delta;
  int draws = 600;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultDraws = 600;

/// Throws ScenarioError (syntax or field) or IoError.
Scenario load_scenario(const std::filesystem::path& file);
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);

/// Checks that every vehicle and demand lies inside a width x height grid.
void check_scenario_bounds(const Scenario& scenario, int width, int height);

/// The scenario with every default filled in, as JSON.
std::string scenario_to_json(const Scenario& scenario);

}  // namespace riskgrid
