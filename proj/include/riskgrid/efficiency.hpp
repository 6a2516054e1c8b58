#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riskgrid/planner.hpp"
#include "riskgrid/rng.hpp"
#include "riskgrid/terrain.hpp"

namespace riskgrid {

/**
 * Monte Carlo samples of travel efficiency e_ijk, one row of D draws per
 * assignment tuple. Draw d of every row comes from the same realization of
 * the terrain, so rows can be compared draw by draw.
 */
class EfficiencyMatrix {
 public:
  EfficiencyMatrix() = default;
  /// `samples` is indexed [position(tuple) * num_draws + draw]. The tuples
  /// must be exactly the ground set N x M x K in lexicographic order; values
  /// must be finite and nonnegative. `layer_log` is either empty (imported
  /// data) or holds the stack layer used by each draw.
  EfficiencyMatrix(std::vector<TupleIndex> tuples, int num_draws, std::vector<double> samples,
                   std::uint64_t seed = 0, std::vector<int> layer_log = {});

  const std::vector<TupleIndex>& tuples() const { return tuples_; }
  int num_draws() const { return num_draws_; }
  int num_vehicles() const { return num_vehicles_; }
  int num_demands() const { return num_demands_; }
  int num_paths() const { return num_paths_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& layer_log() const { return layer_log_; }

  bool contains(TupleIndex t) const;
  /// Row of `t`; throws UnknownTuple.
  std::size_t position(TupleIndex t) const;
  std::span<const double> draws(TupleIndex t) const;
  double efficiency(TupleIndex t, int draw) const { return draws(t)[draw]; }
  double max_efficiency() const;

  friend bool operator==(const EfficiencyMatrix&, const EfficiencyMatrix&) = default;

 private:
  std::vector<TupleIndex> tuples_;
  int num_draws_ = 0;
  int num_vehicles_ = 0;
  int num_demands_ = 0;
  int num_paths_ = 0;
  std::vector<double> samples_;
  std::uint64_t seed_ = 0;
  std::vector<int> layer_log_;
};

/// Travel cost of `path` when the terrain is labelled by the per-pixel argmax
/// of stack layer `layer`, using base class costs and the planner's edge
/// weighting. kImpassable if any pixel's label is impassable.
double realized_path_cost(const GridPath& path, const SampleStack& stack, const ClassCosts& classes,
                          int layer);

/// One realization of the path cost: draws a layer uniformly from the stack.
double sample_path_cost(const GridPath& path, const SampleStack& stack, const ClassCosts& classes,
                        Rng& rng);

/// Layer index used by draw `draw` under `seed`; shared by all tuples.
int draw_layer(std::uint64_t seed, int draw, int num_samples);

/// e_ijk[d] = 1 / realized cost on layer draw_layer(seed, d), or 0 when
/// the realization is impassable. Throws InvalidSpec for draws < 1 or for a
/// zero-length path (vehicle already at the demand).
EfficiencyMatrix build_efficiency_matrix(const CandidateSet& candidates, const SampleStack& stack,
                                         const ClassCosts& classes, int draws, std::uint64_t seed);

}  // namespace riskgrid
