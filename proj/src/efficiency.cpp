#include "riskgrid/efficiency.hpp"

#include <algorithm>
#include <string>

#include "riskgrid/error.hpp"
#include "riskgrid/parallel.hpp"

namespace riskgrid {

EfficiencyMatrix::EfficiencyMatrix(std::vector<TupleIndex> tuples, int num_draws,
                                   std::vector<double> samples, std::uint64_t seed,
                                   std::vector<int> layer_log)
    : tuples_(std::move(tuples)), num_draws_(num_draws), samples_(std::move(samples)), seed_(seed),
      layer_log_(std::move(layer_log)) {
  if (num_draws_ < 1) throw InvalidSpec("efficiency matrix needs at least one draw");
  if (tuples_.empty()) throw InvalidSpec("efficiency matrix needs at least one tuple");
  for (const TupleIndex& t : tuples_) {
    if (t.vehicle < 0 || t.demand < 0 || t.path < 0) throw InvalidSpec("negative tuple index");
    num_vehicles_ = std::max(num_vehicles_, t.vehicle + 1);
    num_demands_ = std::max(num_demands_, t.demand + 1);
    num_paths_ = std::max(num_paths_, t.path + 1);
  }
  std::size_t pos = 0;
  for (int i = 0; i < num_vehicles_; ++i) {
    for (int j = 0; j < num_demands_; ++j) {
      for (int k = 0; k < num_paths_; ++k, ++pos) {
        if (pos >= tuples_.size() || tuples_[pos] != TupleIndex{i, j, k}) {
          throw InvalidSpec("efficiency matrix must cover every (vehicle, demand, path) tuple "
                            "exactly once, in order");
        }
      }
    }
  }
  if (pos != tuples_.size()) throw InvalidSpec("efficiency matrix has duplicate tuples");
  if (samples_.size() != tuples_.size() * static_cast<std::size_t>(num_draws_)) {
    throw DimensionMismatch("efficiency matrix: sample count does not match tuples x draws");
  }
  for (double e : samples_) {
    if (!(e >= 0.0) || is_impassable(e)) {
      throw InvalidSpec("efficiencies must be finite and nonnegative");
    }
  }
  if (!layer_log_.empty() && layer_log_.size() != static_cast<std::size_t>(num_draws_)) {
    throw DimensionMismatch("layer log length differs from draw count");
  }
}

bool EfficiencyMatrix::contains(TupleIndex t) const {
  return t.vehicle >= 0 && t.demand >= 0 && t.path >= 0 && t.vehicle < num_vehicles_ &&
         t.demand < num_demands_ && t.path < num_paths_;
}

std::size_t EfficiencyMatrix::position(TupleIndex t) const {
  if (!contains(t)) {
    throw UnknownTuple("tuple (" + std::to_string(t.vehicle) + "," + std::to_string(t.demand) +
                       "," + std::to_string(t.path) + ") is not in the efficiency matrix");
  }
  return (static_cast<std::size_t>(t.vehicle) * num_demands_ + t.demand) * num_paths_ + t.path;
}

std::span<const double> EfficiencyMatrix::draws(TupleIndex t) const {
  return std::span<const double>(samples_).subspan(position(t) * num_draws_,
                                                   static_cast<std::size_t>(num_draws_));
}

double EfficiencyMatrix::max_efficiency() const {
  return *std::max_element(samples_.begin(), samples_.end());
}

double realized_path_cost(const GridPath& path, const SampleStack& stack, const ClassCosts& classes,
                          int layer) {
  if (layer < 0 || layer >= stack.num_samples()) throw InvalidSpec("layer index out of range");
  PathCost acc;
  double prev = 0.0;
  for (std::size_t n = 0; n < path.pixels.size(); ++n) {
    const Pixel p = path.pixels[n];
    if (!stack.contains(p)) throw DimensionMismatch("path leaves the sample stack");
    const double cost = classes.at(stack.argmax(layer, p));
    if (is_impassable(cost)) return kImpassable;
    if (n > 0) add_edge(acc, path.pixels[n - 1], p, prev, cost);
    prev = cost;
  }
  return acc.value();
}

double sample_path_cost(const GridPath& path, const SampleStack& stack, const ClassCosts& classes,
                        Rng& rng) {
  const int layer = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(stack.num_samples())));
  return realized_path_cost(path, stack, classes, layer);
}

int draw_layer(std::uint64_t seed, int draw, int num_samples) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(draw)));
  return static_cast<int>(rng.bounded(static_cast<std::uint64_t>(num_samples)));
}

EfficiencyMatrix build_efficiency_matrix(const CandidateSet& candidates, const SampleStack& stack,
                                         const ClassCosts& classes, int draws, std::uint64_t seed) {
  if (draws < 1) throw InvalidSpec("draw count must be at least 1");
  const auto tuples = candidates.tuples();
  const auto layers = static_cast<std::size_t>(stack.num_samples());

  // Realized cost depends only on (tuple, layer); tabulate it once.
  std::vector<double> cost(tuples.size() * layers);
  parallel_for(tuples.size(), [&](std::size_t t) {
    const GridPath& path = candidates.path(tuples[t]);
    if (path.pixels.size() < 2) {
      throw InvalidSpec("vehicle " + std::to_string(tuples[t].vehicle) +
                        " already sits on demand " + std::to_string(tuples[t].demand) +
                        "; efficiency is unbounded");
    }
    for (std::size_t s = 0; s < layers; ++s) {
      cost[t * layers + s] = realized_path_cost(path, stack, classes, static_cast<int>(s));
    }
  });

  std::vector<int> log(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) log[d] = draw_layer(seed, d, stack.num_samples());

  std::vector<double> samples(tuples.size() * static_cast<std::size_t>(draws));
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    for (int d = 0; d < draws; ++d) {
      const double c = cost[t * layers + static_cast<std::size_t>(log[d])];
      samples[t * draws + d] = is_impassable(c) ? 0.0 : 1.0 / c;
    }
  }
  return EfficiencyMatrix(tuples, draws, std::move(samples), seed, std::move(log));
}

}  // namespace riskgrid
