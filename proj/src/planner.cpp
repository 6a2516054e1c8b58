#include "riskgrid/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <string>

#include "riskgrid/error.hpp"
#include "riskgrid/parallel.hpp"

namespace riskgrid {

namespace {

std::string describe(Pixel p) {
  return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

double octile(Pixel a, Pixel b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  const int lo = std::min(dr, dc);
  const int hi = std::max(dr, dc);
  return (hi - lo) + std::numbers::sqrt2 * lo;
}

struct OpenNode {
  double f;
  double h;
  double g;
  Pixel pixel;
};

// Min-heap order: f, then h, then pixel.
struct ExpandLater {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.pixel > b.pixel;
  }
};

void check_path_shape(const GridPath& path, Pixel start, Pixel goal, const std::string& who) {
  if (path.pixels.empty() || path.start() != start || path.goal() != goal) {
    throw InvalidSpec(who + ": path does not join its vehicle and demand");
  }
  for (std::size_t i = 1; i < path.pixels.size(); ++i) {
    if (!adjacent8(path.pixels[i - 1], path.pixels[i])) {
      throw InvalidSpec(who + ": consecutive pixels are not 8-adjacent");
    }
  }
  std::vector<Pixel> sorted = path.pixels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidSpec(who + ": path revisits a pixel");
  }
}

}  // namespace

bool adjacent8(Pixel a, Pixel b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return dr <= 1 && dc <= 1 && (dr + dc) > 0;
}

void add_edge(PathCost& acc, Pixel u, Pixel v, double cost_u, double cost_v) {
  const double half_sum = (cost_u + cost_v) / 2.0;
  if (u.row != v.row && u.col != v.col) {
    acc.diagonal += half_sum;
  } else {
    acc.straight += half_sum;
  }
}

double path_cost(std::span<const Pixel> pixels, const RiskCostMap& costs) {
  PathCost acc;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (!costs.contains(pixels[i])) throw DimensionMismatch("path leaves the cost map");
    if (is_impassable(costs[pixels[i]])) return kImpassable;
    if (i > 0) add_edge(acc, pixels[i - 1], pixels[i], costs[pixels[i - 1]], costs[pixels[i]]);
  }
  return acc.value();
}

GridPath astar(const RiskCostMap& costs, Pixel start, Pixel goal, double lambda) {
  for (Pixel p : {start, goal}) {
    if (!costs.contains(p)) throw InvalidEndpoint("endpoint " + describe(p) + " is out of bounds");
    if (is_impassable(costs[p])) {
      throw InvalidEndpoint("endpoint " + describe(p) + " is impassable");
    }
  }
  if (start == goal) return GridPath{{start}, 0.0, lambda};

  double min_cost = kImpassable;
  for (double c : costs.values()) min_cost = std::min(min_cost, c);
  auto heuristic = [&](Pixel p) { return octile(p, goal) * min_cost; };

  const std::size_t n = costs.size();
  std::vector<PathCost> g(n);
  std::vector<double> best(n, kImpassable);
  std::vector<Pixel> parent(n, Pixel{-1, -1});

  std::priority_queue<OpenNode, std::vector<OpenNode>, ExpandLater> open;
  best[costs.index(start)] = 0.0;
  const double h0 = heuristic(start);
  open.push({h0, h0, 0.0, start});

  bool reached = false;
  while (!open.empty()) {
    const OpenNode node = open.top();
    open.pop();
    const std::size_t u = costs.index(node.pixel);
    // Stale entry: a cheaper route to this pixel was found after the push.
    if (node.g > best[u]) continue;
    if (node.pixel == goal) {
      reached = true;
      break;
    }
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const Pixel next{node.pixel.row + dr, node.pixel.col + dc};
        if (!costs.contains(next) || is_impassable(costs[next])) continue;
        PathCost cand = g[u];
        add_edge(cand, node.pixel, next, costs[node.pixel], costs[next]);
        const double value = cand.value();
        const std::size_t v = costs.index(next);
        if (value < best[v]) {
          best[v] = value;
          g[v] = cand;
          parent[v] = node.pixel;
          const double h = heuristic(next);
          open.push({value + h, h, value, next});
        }
      }
    }
  }
  if (!reached) {
    throw NoPath("no path from " + describe(start) + " to " + describe(goal));
  }

  GridPath path;
  path.lambda = lambda;
  path.planned_cost = best[costs.index(goal)];
  for (Pixel p = goal; p != start; p = parent[costs.index(p)]) path.pixels.push_back(p);
  path.pixels.push_back(start);
  std::reverse(path.pixels.begin(), path.pixels.end());
  return path;
}

CandidateSet::CandidateSet(std::vector<Pixel> vehicles, std::vector<Pixel> demands,
                           std::vector<double> lambdas, std::vector<GridPath> paths)
    : vehicles_(std::move(vehicles)), demands_(std::move(demands)), lambdas_(std::move(lambdas)),
      paths_(std::move(paths)) {
  if (vehicles_.empty() || demands_.empty() || lambdas_.empty()) {
    throw InvalidSpec("candidate set needs at least one vehicle, demand and lambda");
  }
  if (paths_.size() != vehicles_.size() * demands_.size() * lambdas_.size()) {
    throw InvalidSpec("candidate set: expected N*M*K paths, got " + std::to_string(paths_.size()));
  }
  for (const TupleIndex t : tuples()) {
    const std::string who = "candidate (" + std::to_string(t.vehicle) + "," +
                            std::to_string(t.demand) + "," + std::to_string(t.path) + ")";
    const GridPath& p = paths_[slot(t)];
    check_path_shape(p, vehicles_[t.vehicle], demands_[t.demand], who);
    if (p.lambda != lambdas_[t.path]) throw InvalidSpec(who + ": lambda does not match index");
  }
}

std::size_t CandidateSet::slot(TupleIndex t) const {
  return (static_cast<std::size_t>(t.vehicle) * demands_.size() +
          static_cast<std::size_t>(t.demand)) * lambdas_.size() +
         static_cast<std::size_t>(t.path);
}

bool CandidateSet::contains(TupleIndex t) const {
  return t.vehicle >= 0 && t.demand >= 0 && t.path >= 0 && t.vehicle < num_vehicles() &&
         t.demand < num_demands() && t.path < num_paths();
}

const GridPath& CandidateSet::path(TupleIndex t) const {
  if (!contains(t)) throw UnknownTuple("tuple not in candidate set");
  return paths_[slot(t)];
}

std::vector<TupleIndex> CandidateSet::tuples() const {
  std::vector<TupleIndex> out;
  out.reserve(paths_.size());
  for (int i = 0; i < num_vehicles(); ++i) {
    for (int j = 0; j < num_demands(); ++j) {
      for (int k = 0; k < num_paths(); ++k) out.push_back({i, j, k});
    }
  }
  return out;
}

std::vector<std::pair<TupleIndex, TupleIndex>> CandidateSet::coincident_candidates() const {
  std::vector<std::pair<TupleIndex, TupleIndex>> out;
  for (int i = 0; i < num_vehicles(); ++i) {
    for (int j = 0; j < num_demands(); ++j) {
      for (int a = 0; a < num_paths(); ++a) {
        for (int b = a + 1; b < num_paths(); ++b) {
          if (path({i, j, a}).pixels == path({i, j, b}).pixels) {
            out.emplace_back(TupleIndex{i, j, a}, TupleIndex{i, j, b});
          }
        }
      }
    }
  }
  return out;
}

CandidateSet generate_candidates(const LabelMap& labels, const VarianceMap& variance,
                                 const ClassCosts& classes, std::span<const double> lambdas,
                                 std::span<const Pixel> vehicles, std::span<const Pixel> demands) {
  if (lambdas.empty()) throw InvalidSpec("candidate generation needs at least one lambda");
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    for (std::size_t b = a + 1; b < lambdas.size(); ++b) {
      if (lambdas[a] == lambdas[b]) throw InvalidSpec("lambda values must be distinct");
    }
  }

  std::vector<RiskCostMap> maps;
  maps.reserve(lambdas.size());
  for (double lambda : lambdas) maps.push_back(build_cost_map(labels, variance, {classes, lambda}));

  const std::size_t num_demands = demands.size();
  const std::size_t k_count = lambdas.size();
  std::vector<GridPath> paths(vehicles.size() * num_demands * k_count);
  parallel_for(paths.size(), [&](std::size_t slot) {
    const std::size_t k = slot % k_count;
    const std::size_t j = (slot / k_count) % num_demands;
    const std::size_t i = slot / (k_count * num_demands);
    try {
      paths[slot] = astar(maps[k], vehicles[i], demands[j], lambdas[k]);
    } catch (const NoPath& e) {
      throw NoPath(std::string(e.what()) + " for vehicle " + std::to_string(i) + ", demand " +
                       std::to_string(j) + ", lambda " + std::to_string(lambdas[k]),
                   NoPath::Context{static_cast<int>(i), static_cast<int>(j), lambdas[k]});
    }
  });

  return CandidateSet({vehicles.begin(), vehicles.end()}, {demands.begin(), demands.end()},
                      {lambdas.begin(), lambdas.end()}, std::move(paths));
}

Surprise surprise(const GridPath& path, const LabelMap& truth, const LabelMap& predicted,
                  const ClassCosts& classes) {
  if (!truth.labels.same_shape(predicted.labels)) {
    throw DimensionMismatch("surprise: truth and predicted maps differ in shape");
  }
  Surprise out;
  double truth_sum = 0.0;
  double predicted_sum = 0.0;
  out.steps.reserve(path.pixels.size());
  for (Pixel p : path.pixels) {
    if (!truth.labels.contains(p)) throw DimensionMismatch("surprise: path leaves the label map");
    const double tc = classes.at(truth.labels[p]);
    const double pc = classes.at(predicted.labels[p]);
    if (is_impassable(tc)) {
      out.truth_impassable = true;
    } else {
      truth_sum += tc;
    }
    if (is_impassable(pc)) {
      out.predicted_impassable = true;
    } else {
      predicted_sum += pc;
    }
    out.steps.push_back({p, tc, pc});
  }
  out.value = truth_sum - predicted_sum;
  return out;
}

}  // namespace riskgrid
