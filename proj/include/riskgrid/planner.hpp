#pragma once

#include <compare>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "riskgrid/terrain.hpp"

namespace riskgrid {

/// Path cost split into its cardinal and diagonal parts. The value is
/// straight + sqrt(2) * diagonal; keeping the two sums apart makes costs of
/// equal-cost paths bit-identical whenever pixel costs are dyadic.
struct PathCost {
  double straight = 0.0;
  double diagonal = 0.0;

  double value() const { return straight + std::numbers::sqrt2 * diagonal; }
};

/// Adds the edge u -> v (8-adjacent) with cost mean(cost_u, cost_v) times
/// the step length.
void add_edge(PathCost& acc, Pixel u, Pixel v, double cost_u, double cost_v);

/// Sum of edge costs along `pixels` under `costs` (kImpassable if any
/// pixel is impassable).
double path_cost(std::span<const Pixel> pixels, const RiskCostMap& costs);

bool adjacent8(Pixel a, Pixel b);

struct GridPath {
  std::vector<Pixel> pixels;
  double planned_cost = 0.0;
  double lambda = 0.0;

  const Pixel& start() const { return pixels.front(); }
  const Pixel& goal() const { return pixels.back(); }
  friend bool operator==(const GridPath&, const GridPath&) = default;
};

/**
 * Minimum-cost 8-connected path from start to goal.
 *
 * Edge cost is the mean of the two endpoint costs times 1 (cardinal) or
 * sqrt(2) (diagonal). The heuristic is the octile distance scaled by the
 * smallest finite pixel cost. Among equal f-values, nodes with the smaller
 * heuristic and then the lexicographically smaller pixel are expanded first.
 *
 * Throws InvalidEndpoint if an endpoint is out of bounds or impassable and
 * NoPath if the goal is unreachable. `lambda` is only recorded on the
 * result.
 */
GridPath astar(const RiskCostMap& costs, Pixel start, Pixel goal, double lambda = 0.0);

struct TupleIndex {
  int vehicle = 0;
  int demand = 0;
  int path = 0;

  friend auto operator<=>(const TupleIndex&, const TupleIndex&) = default;
};

/// K candidate paths for every (vehicle, demand) pair; path k was planned
/// with lambdas()[k].
class CandidateSet {
 public:
  CandidateSet() = default;
  /// `paths` is indexed [(vehicle * M + demand) * K + k]. Throws InvalidSpec
  /// if the sizes disagree or a path does not connect its endpoints.
  CandidateSet(std::vector<Pixel> vehicles, std::vector<Pixel> demands,
               std::vector<double> lambdas, std::vector<GridPath> paths);

  int num_vehicles() const { return static_cast<int>(vehicles_.size()); }
  int num_demands() const { return static_cast<int>(demands_.size()); }
  int num_paths() const { return static_cast<int>(lambdas_.size()); }

  const std::vector<Pixel>& vehicles() const { return vehicles_; }
  const std::vector<Pixel>& demands() const { return demands_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<GridPath>& paths() const { return paths_; }

  bool contains(TupleIndex t) const;
  /// Throws UnknownTuple.
  const GridPath& path(TupleIndex t) const;
  /// The ground set, in lexicographic (vehicle, demand, path) order.
  std::vector<TupleIndex> tuples() const;

  /// Pairs (t, u) with t < u, same vehicle and demand, and identical
  /// geometry. Such duplicates are kept as distinct candidates.
  std::vector<std::pair<TupleIndex, TupleIndex>> coincident_candidates() const;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  std::size_t slot(TupleIndex t) const;

  std::vector<Pixel> vehicles_;
  std::vector<Pixel> demands_;
  std::vector<double> lambdas_;
  std::vector<GridPath> paths_;
};

/// For every lambda in `lambdas` (distinct, non-empty) builds the risk cost
/// map and plans from each vehicle to each demand. NoPath is rethrown with
/// the offending (vehicle, demand, lambda) attached.
CandidateSet generate_candidates(const LabelMap& labels, const VarianceMap& variance,
                                 const ClassCosts& classes, std::span<const double> lambdas,
                                 std::span<const Pixel> vehicles, std::span<const Pixel> demands);

struct SurpriseStep {
  Pixel pixel;
  double truth_cost;
  double predicted_cost;
};

struct Surprise {
  /// Sum of finite truth costs minus sum of finite predicted costs.
  double value = 0.0;
  /// A pixel on the path is impassable under the truth labels; its cost is
  /// left out of the sum.
  bool truth_impassable = false;
  /// Same for the predicted labels.
  bool predicted_impassable = false;
  std::vector<SurpriseStep> steps;
};

/// Label-cost difference between ground truth and prediction along a path,
/// using base class costs only.
Surprise surprise(const GridPath& path, const LabelMap& truth, const LabelMap& predicted,
                  const ClassCosts& classes);

}  // namespace riskgrid
