#include "riskgrid/scenario.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "riskgrid/raster_io.hpp"

namespace riskgrid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string line_of(std::string_view text, std::size_t byte) {
  const auto end = std::min(byte, text.size());
  return "line " + std::to_string(1 + std::count(text.begin(), text.begin() + end, '\n'));
}

const json& require(const json& obj, const std::string& at, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ScenarioError(at.empty() ? "/" : at, std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& at) {
  if (!v.is_number()) throw ScenarioError(at, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& at) {
  if (!v.is_number_integer()) throw ScenarioError(at, "expected an integer");
  return v.get<int>();
}

std::uint32_t label(const json& v, const std::string& at, std::size_t num_classes) {
  const int l = integer(v, at);
  if (l < 0 || static_cast<std::size_t>(l) >= num_classes) {
    throw ScenarioError(at, "class index out of range");
  }
  return static_cast<std::uint32_t>(l);
}

std::optional<double> optional_number(const json& obj, const std::string& at, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number(obj.at(key), at + "/" + key);
}

Pixel pixel(const json& v, const std::string& at) {
  return {integer(require(v, at, "row"), at + "/row"), integer(require(v, at, "col"), at + "/col")};
}

std::vector<Pixel> pixels(const json& arr, const std::string& at) {
  if (!arr.is_array() || arr.empty()) throw ScenarioError(at, "expected a non-empty array");
  std::vector<Pixel> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(pixel(arr[i], at + "/" + std::to_string(i)));
  return out;
}

fs::path file_field(const json& v, const std::string& at, const fs::path& base) {
  if (!v.is_string()) throw ScenarioError(at, "expected a file path");
  fs::path p = v.get<std::string>();
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) throw ScenarioError(at, "file not found: " + p.string());
  return p;
}

SceneSpec parse_synth(const json& s, const std::string& at, std::size_t num_classes) {
  SceneSpec spec;
  spec.num_classes = static_cast<int>(num_classes);
  spec.width = integer(require(s, at, "width"), at + "/width");
  spec.height = integer(require(s, at, "height"), at + "/height");
  if (s.contains("num_samples")) spec.num_samples = integer(s.at("num_samples"), at + "/num_samples");
  const std::string bg_at = at + "/background";
  const json& bg = require(s, at, "background");
  spec.background_label = label(require(bg, bg_at, "label"), bg_at + "/label", num_classes);
  spec.background_confusion = optional_number(bg, bg_at, "confusion").value_or(0.0);

  if (s.contains("regions")) {
    const json& regions = s.at("regions");
    if (!regions.is_array()) throw ScenarioError(at + "/regions", "expected an array");
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const std::string r_at = at + "/regions/" + std::to_string(i);
      const json& r = regions[i];
      SceneRegion reg;
      if (r.contains("name")) reg.name = r.at("name").get<std::string>();
      const std::string rect_at = r_at + "/rect";
      const json& rect = require(r, r_at, "rect");
      reg.rect = {integer(require(rect, rect_at, "row"), rect_at + "/row"),
                  integer(require(rect, rect_at, "col"), rect_at + "/col"),
                  integer(require(rect, rect_at, "height"), rect_at + "/height"),
                  integer(require(rect, rect_at, "width"), rect_at + "/width")};
      reg.label = label(require(r, r_at, "label"), r_at + "/label", num_classes);
      if (r.contains("alt_label") && !r.at("alt_label").is_null()) {
        reg.alt_label = label(r.at("alt_label"), r_at + "/alt_label", num_classes);
      }
      reg.confusion = optional_number(r, r_at, "confusion").value_or(0.0);
      if (r.contains("out_of_distribution")) {
        reg.out_of_distribution = r.at("out_of_distribution").get<bool>();
      }
      spec.regions.push_back(std::move(reg));
    }
  }
  try {
    spec.validate();
  } catch (const InvalidSpec& e) {
    throw ScenarioError(at, e.what());
  }
  return spec;
}

void check_pixel(Pixel p, int width, int height, const std::string& at) {
  if (p.row < 0 || p.col < 0 || p.row >= height || p.col >= width) {
    throw ScenarioError(at, "pixel (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                                ") is outside the " + std::to_string(height) + "x" +
                                std::to_string(width) + " grid");
  }
}

}  // namespace

Scenario load_scenario(const fs::path& file) {
  return parse_scenario(read_file(file), file.parent_path());
}

Scenario parse_scenario(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(line_of(text, e.byte), e.what());
  }
  if (!doc.is_object()) throw ScenarioError("/", "scenario must be a JSON object");

  Scenario sc;
  try {
    const json& classes = require(doc, "", "classes");
    if (!classes.is_array() || classes.size() < 2) {
      throw ScenarioError("/classes", "need at least two classes");
    }
    std::vector<double> costs;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const std::string at = "/classes/" + std::to_string(i);
      const json& c = classes[i];
      sc.class_names.push_back(c.contains("name") ? c.at("name").get<std::string>()
                                                  : "class" + std::to_string(i));
      const json& cost = require(c, at, "cost");
      if (cost.is_string() && cost.get<std::string>() == "impassable") {
        costs.push_back(kImpassable);
      } else {
        const double v = number(cost, at + "/cost");
        if (!(v > 0.0)) throw ScenarioError(at + "/cost", "cost must be positive or \"impassable\"");
        costs.push_back(v);
      }
    }
    try {
      sc.classes = ClassCosts(costs);
    } catch (const InvalidSpec& e) {
      throw ScenarioError("/classes", e.what());
    }

    const json& scene = require(doc, "", "scene");
    if (scene.contains("synth")) {
      sc.synth = parse_synth(scene.at("synth"), "/scene/synth", costs.size());
    } else if (scene.contains("stack")) {
      sc.stack_file = file_field(scene.at("stack"), "/scene/stack", base_dir);
      if (scene.contains("truth")) {
        sc.truth_file = file_field(scene.at("truth"), "/scene/truth", base_dir);
      }
    } else {
      throw ScenarioError("/scene", "needs either 'synth' or 'stack'");
    }

    const json& lambdas = require(doc, "", "lambdas");
    if (!lambdas.is_array() || lambdas.empty()) {
      throw ScenarioError("/lambdas", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const std::string at = "/lambdas/" + std::to_string(i);
      const double v = number(lambdas[i], at);
      if (!(v >= 0.0)) throw ScenarioError(at, "lambda must be nonnegative");
      if (std::find(sc.lambdas.begin(), sc.lambdas.end(), v) != sc.lambdas.end()) {
        throw ScenarioError(at, "lambda values must be distinct");
      }
      sc.lambdas.push_back(v);
    }

    sc.vehicles = pixels(require(doc, "", "vehicles"), "/vehicles");
    sc.demands = pixels(require(doc, "", "demands"), "/demands");
    for (std::size_t i = 0; i < sc.vehicles.size(); ++i) {
      if (std::find(sc.demands.begin(), sc.demands.end(), sc.vehicles[i]) != sc.demands.end()) {
        throw ScenarioError("/vehicles/" + std::to_string(i), "vehicle starts on a demand location");
      }
    }

    const json& risk = require(doc, "", "risk");
    sc.alpha = number(require(risk, "/risk", "alpha"), "/risk/alpha");
    if (!(sc.alpha > 0.0 && sc.alpha <= 1.0)) throw ScenarioError("/risk/alpha", "must lie in (0, 1]");
    sc.gamma = optional_number(risk, "/risk", "gamma");
    sc.delta = optional_number(risk, "/risk", "delta");
    if (sc.gamma && !(*sc.gamma > 0.0)) throw ScenarioError("/risk/gamma", "must be positive");
    if (sc.delta && !(*sc.delta > 0.0)) throw ScenarioError("/risk/delta", "must be positive");
    if (sc.gamma && sc.delta && *sc.delta > *sc.gamma) {
      throw ScenarioError("/risk/delta", "must not exceed gamma");
    }

    sc.draws = doc.contains("draws") ? integer(doc.at("draws"), "/draws") : kDefaultDraws;
    if (sc.draws < 1) throw ScenarioError("/draws", "must be at least 1");
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_unsigned()) {
        throw ScenarioError("/seed", "expected an unsigned integer");
      }
      sc.seed = doc.at("seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ScenarioError("/", e.what());
  }

  if (sc.synth) check_scenario_bounds(sc, sc.synth->width, sc.synth->height);
  return sc;
}

void check_scenario_bounds(const Scenario& scenario, int width, int height) {
  for (std::size_t i = 0; i < scenario.vehicles.size(); ++i) {
    check_pixel(scenario.vehicles[i], width, height, "/vehicles/" + std::to_string(i));
  }
  for (std::size_t i = 0; i < scenario.demands.size(); ++i) {
    check_pixel(scenario.demands[i], width, height, "/demands/" + std::to_string(i));
  }
}

std::string scenario_to_json(const Scenario& sc) {
  nlohmann::ordered_json doc;
  doc["units"] = {{"pixels", "row/col grid indices"}, {"cost", "dimensionless"}};
  if (sc.synth) {
    const SceneSpec& s = *sc.synth;
    nlohmann::ordered_json synth;
    synth["width"] = s.width;
    synth["height"] = s.height;
    synth["num_samples"] = s.num_samples;
    synth["background"] = {{"label", s.background_label}, {"confusion", s.background_confusion}};
    synth["regions"] = nlohmann::ordered_json::array();
    for (const auto& r : s.regions) {
      nlohmann::ordered_json reg;
      reg["name"] = r.name;
      reg["rect"] = {{"row", r.rect.row}, {"col", r.rect.col}, {"height", r.rect.height},
                     {"width", r.rect.width}};
      reg["label"] = r.label;
      if (r.alt_label) {
        reg["alt_label"] = *r.alt_label;
      } else {
        reg["alt_label"] = nullptr;
      }
      reg["confusion"] = r.confusion;
      reg["out_of_distribution"] = r.out_of_distribution;
      synth["regions"].push_back(std::move(reg));
    }
    doc["scene"]["synth"] = std::move(synth);
  } else {
    doc["scene"]["stack"] = sc.stack_file ? sc.stack_file->string() : "";
    if (sc.truth_file) doc["scene"]["truth"] = sc.truth_file->string();
  }
  doc["classes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sc.classes.size(); ++i) {
    const double c = sc.classes.values()[i];
    nlohmann::ordered_json item;
    item["name"] = sc.class_names[i];
    if (is_impassable(c)) {
      item["cost"] = "impassable";
    } else {
      item["cost"] = c;
    }
    doc["classes"].push_back(std::move(item));
  }
  doc["lambdas"] = sc.lambdas;
  auto pixel_list = [](const std::vector<Pixel>& ps) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Pixel p : ps) arr.push_back({{"row", p.row}, {"col", p.col}});
    return arr;
  };
  doc["vehicles"] = pixel_list(sc.vehicles);
  doc["demands"] = pixel_list(sc.demands);
  doc["risk"]["alpha"] = sc.alpha;
  doc["risk"]["gamma"] = sc.gamma ? nlohmann::ordered_json(*sc.gamma) : nlohmann::ordered_json(nullptr);
  doc["risk"]["delta"] = sc.delta ? nlohmann::ordered_json(*sc.delta) : nlohmann::ordered_json(nullptr);
  doc["draws"] = sc.draws;
  doc["seed"] = sc.seed;
  return doc.dump(2) + "\n";
}

}  // namespace riskgrid
