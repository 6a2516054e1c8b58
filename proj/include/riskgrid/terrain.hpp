#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "riskgrid/grid.hpp"

namespace riskgrid {

/// Cost sentinel for pixels that cannot be traversed at all. It is never
/// produced by arithmetic on finite costs.
inline constexpr double kImpassable = std::numeric_limits<double>::infinity();
inline bool is_impassable(double cost) { return std::isinf(cost); }

/// Largest absolute deviation of a pixel's probability sum from 1 that a
/// valid stack may hold.
inline constexpr double kStackSumTolerance = 1e-5;

/**
 * S stochastic segmentation outputs over a width x height grid with C classes.
 *
 * Probabilities are stored as 32-bit floats in (sample, row, col, class)
 * order, which is also the on-disk payload order of an RSEG1 file.
 */
class SampleStack {
 public:
  SampleStack() = default;
  /// Zero-filled stack; fill it through probs() and call validate().
  SampleStack(int width, int height, int num_classes, int num_samples);
  /// Takes ownership of a payload; throws DimensionMismatch on a size error
  /// and InvalidSpec if the shape is degenerate. Does not check sums.
  SampleStack(int width, int height, int num_classes, int num_samples,
              std::vector<float> probs);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_classes() const { return num_classes_; }
  int num_samples() const { return num_samples_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool contains(Pixel p) const {
    return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
  }

  std::span<const float> probs(int sample, Pixel p) const;
  std::span<float> probs(int sample, Pixel p);
  std::span<const float> payload() const { return probs_; }

  /// argmax_c P(c|x) in one layer; ties go to the smallest class index.
  std::uint32_t argmax(int sample, Pixel p) const;

  /// Throws ProbabilityDrift if any pixel sum is off by more than
  /// kStackSumTolerance or any value lies outside [0, 1].
  void validate() const;

  friend bool operator==(const SampleStack&, const SampleStack&) = default;

 private:
  std::size_t offset(int sample, Pixel p) const;

  int width_ = 0;
  int height_ = 0;
  int num_classes_ = 0;
  int num_samples_ = 0;
  std::vector<float> probs_;
};

struct LabelMap {
  int num_classes = 0;
  Grid<std::uint32_t> labels;

  int width() const { return labels.width(); }
  int height() const { return labels.height(); }
  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

/// Per-pixel uncertainty in [0, 0.25].
using VarianceMap = Grid<double>;

/// Per-pixel traversal cost; kImpassable marks blocked pixels.
using RiskCostMap = Grid<double>;

/// Base cost per class label. Finite entries must be positive; kImpassable
/// marks classes that block traversal.
class ClassCosts {
 public:
  ClassCosts() = default;
  /// Throws InvalidSpec unless at least one class is finite and every finite
  /// cost is positive.
  explicit ClassCosts(std::vector<double> costs);

  std::size_t size() const { return costs_.size(); }
  /// Throws MissingClassCost for labels without an entry.
  double at(std::uint32_t label) const;
  double min_finite() const;
  std::span<const double> values() const { return costs_; }

  friend bool operator==(const ClassCosts&, const ClassCosts&) = default;

 private:
  std::vector<double> costs_;
};

/// Class costs together with the risk weight applied to the variance term.
struct CostMapping {
  ClassCosts classes;
  double lambda = 0.0;
};

/// Statistical mode over samples of the per-sample argmax label.
LabelMap mode_label(const SampleStack& stack);

/// Mean over classes of the population variance (divide by S) of P(c|x)
/// across samples.
VarianceMap pixel_uncertainty(const SampleStack& stack);

/// cost(x) = C(label(x)) + lambda * variance(x), or kImpassable when the
/// label's class is impassable.
RiskCostMap build_cost_map(const LabelMap& labels, const VarianceMap& variance,
                           const CostMapping& mapping);

/// Mean of -log P(true|x) over samples and over the pixels whose true label
/// is c, per class c. Classes that never occur in the truth map are nullopt.
/// Probabilities are floored at kMinCrossEntropyProb before the log.
std::vector<std::optional<double>> class_cross_entropy(const SampleStack& stack,
                                                       const LabelMap& truth);

inline constexpr double kMinCrossEntropyProb = 1e-12;

}  // namespace riskgrid
