#include "riskgrid/solution_io.hpp"

#include <nlohmann/json.hpp>

#include "riskgrid/error.hpp"

namespace riskgrid {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json tuples_to_json(const TupleSet& set, const std::vector<double>& lambdas) {
  ordered_json arr = ordered_json::array();
  for (const TupleIndex& t : set) {
    ordered_json item;
    item["vehicle"] = t.vehicle;
    item["demand"] = t.demand;
    item["path"] = t.path;
    if (static_cast<std::size_t>(t.path) < lambdas.size()) {
      item["lambda"] = lambdas[t.path];
    } else {
      item["lambda"] = nullptr;
    }
    arr.push_back(std::move(item));
  }
  return arr;
}

TupleSet tuples_from_json(const ordered_json& arr) {
  TupleSet out;
  for (const auto& item : arr) {
    out.push_back({item.at("vehicle").get<int>(), item.at("demand").get<int>(),
                   item.at("path").get<int>()});
  }
  return out;
}

}  // namespace

std::string solution_to_json(const SolutionRecord& record) {
  const AssignmentSolution& sol = record.solution;
  ordered_json doc;
  doc["alpha"] = sol.params.alpha;
  doc["gamma"] = sol.params.gamma;
  doc["delta"] = sol.params.delta;
  doc["seed"] = record.seed;
  doc["draws"] = record.draws;
  doc["tau_star"] = sol.tau_star;
  doc["tau_index"] = sol.tau_index;
  doc["h_value"] = sol.h_value;
  doc["lambdas"] = record.lambdas;
  doc["assignments"] = tuples_to_json(sol.selected, record.lambdas);

  ordered_json trace = ordered_json::array();
  for (const TauCandidate& entry : sol.trace) {
    ordered_json item;
    item["tau"] = entry.tau;
    item["h_value"] = entry.h_value;
    item["assignments"] = tuples_to_json(entry.set, record.lambdas);
    ordered_json gains = ordered_json::array();
    for (const GreedyRound& r : entry.rounds) gains.push_back(r.gain);
    item["gains"] = std::move(gains);
    trace.push_back(std::move(item));
  }
  doc["trace"] = std::move(trace);

  ordered_json flagged = ordered_json::array();
  for (const auto& [ti, round] : sol.non_positive_gain_rounds()) {
    flagged.push_back({{"tau_index", ti}, {"round", round}});
  }
  doc["diagnostics"]["non_positive_gain_rounds"] = std::move(flagged);
  return doc.dump(2) + "\n";
}

SolutionRecord solution_from_json(std::string_view text) {
  try {
    const ordered_json doc = ordered_json::parse(text);
    SolutionRecord rec;
    rec.seed = doc.at("seed").get<std::uint64_t>();
    rec.draws = doc.at("draws").get<int>();
    rec.lambdas = doc.at("lambdas").get<std::vector<double>>();
    AssignmentSolution& sol = rec.solution;
    sol.params = {doc.at("alpha").get<double>(), doc.at("gamma").get<double>(),
                  doc.at("delta").get<double>()};
    sol.tau_star = doc.at("tau_star").get<double>();
    sol.tau_index = doc.at("tau_index").get<std::size_t>();
    sol.h_value = doc.at("h_value").get<double>();
    sol.selected = tuples_from_json(doc.at("assignments"));
    for (const auto& item : doc.at("trace")) {
      TauCandidate entry;
      entry.tau = item.at("tau").get<double>();
      entry.h_value = item.at("h_value").get<double>();
      entry.set = tuples_from_json(item.at("assignments"));
      const auto gains = item.at("gains").get<std::vector<double>>();
      if (gains.size() != entry.set.size() && !gains.empty()) {
        throw ParseError("solution JSON: gains do not match assignments");
      }
      for (std::size_t r = 0; r < gains.size(); ++r) entry.rounds.push_back({entry.set[r], gains[r]});
      sol.trace.push_back(std::move(entry));
    }
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("solution JSON: ") + e.what());
  }
}

}  // namespace riskgrid
