#include "riskgrid/terrain.hpp"

#include <algorithm>
#include <string>

#include "riskgrid/error.hpp"

namespace riskgrid {

namespace {

void check_shape(int width, int height, int num_classes, int num_samples) {
  if (width <= 0 || height <= 0) throw InvalidSpec("stack: grid must be non-empty");
  if (num_classes < 2) throw InvalidSpec("stack: need at least two classes");
  if (num_samples < 1) throw InvalidSpec("stack: need at least one sample");
}

}  // namespace

SampleStack::SampleStack(int width, int height, int num_classes, int num_samples)
    : width_(width), height_(height), num_classes_(num_classes), num_samples_(num_samples) {
  check_shape(width, height, num_classes, num_samples);
  probs_.assign(pixel_count() * static_cast<std::size_t>(num_classes) *
                    static_cast<std::size_t>(num_samples),
                0.0f);
}

SampleStack::SampleStack(int width, int height, int num_classes, int num_samples,
                         std::vector<float> probs)
    : width_(width), height_(height), num_classes_(num_classes), num_samples_(num_samples),
      probs_(std::move(probs)) {
  check_shape(width, height, num_classes, num_samples);
  const std::size_t expected = pixel_count() * static_cast<std::size_t>(num_classes) *
                               static_cast<std::size_t>(num_samples);
  if (probs_.size() != expected) {
    throw DimensionMismatch("stack: payload has " + std::to_string(probs_.size()) +
                            " values, header implies " + std::to_string(expected));
  }
}

std::size_t SampleStack::offset(int sample, Pixel p) const {
  const std::size_t layer = static_cast<std::size_t>(sample) * pixel_count();
  const std::size_t pixel = static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
                            static_cast<std::size_t>(p.col);
  return (layer + pixel) * static_cast<std::size_t>(num_classes_);
}

std::span<const float> SampleStack::probs(int sample, Pixel p) const {
  return std::span<const float>(probs_).subspan(offset(sample, p),
                                                static_cast<std::size_t>(num_classes_));
}

std::span<float> SampleStack::probs(int sample, Pixel p) {
  return std::span<float>(probs_).subspan(offset(sample, p),
                                          static_cast<std::size_t>(num_classes_));
}

std::uint32_t SampleStack::argmax(int sample, Pixel p) const {
  const auto v = probs(sample, p);
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < v.size(); ++c) {
    if (v[c] > v[best]) best = c;
  }
  return best;
}

void SampleStack::validate() const {
  for (int s = 0; s < num_samples_; ++s) {
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) {
        double sum = 0.0;
        for (float v : probs(s, {r, c})) {
          if (!(v >= 0.0f && v <= 1.0f)) {
            throw ProbabilityDrift("stack: probability outside [0,1] at sample " +
                                   std::to_string(s) + " pixel (" + std::to_string(r) + "," +
                                   std::to_string(c) + ")");
          }
          sum += v;
        }
        if (std::abs(sum - 1.0) > kStackSumTolerance) {
          throw ProbabilityDrift("stack: probabilities sum to " + std::to_string(sum) +
                                 " at sample " + std::to_string(s) + " pixel (" +
                                 std::to_string(r) + "," + std::to_string(c) + ")");
        }
      }
    }
  }
}

ClassCosts::ClassCosts(std::vector<double> costs) : costs_(std::move(costs)) {
  bool any_finite = false;
  for (double c : costs_) {
    if (is_impassable(c)) continue;
    if (!(c > 0.0)) throw InvalidSpec("class costs must be positive or impassable");
    any_finite = true;
  }
  if (!any_finite) throw InvalidSpec("class costs: at least one class must be passable");
}

double ClassCosts::at(std::uint32_t label) const {
  if (label >= costs_.size()) {
    throw MissingClassCost("no cost for class " + std::to_string(label));
  }
  return costs_[label];
}

double ClassCosts::min_finite() const {
  double best = kImpassable;
  for (double c : costs_) {
    if (!is_impassable(c)) best = std::min(best, c);
  }
  return best;
}

LabelMap mode_label(const SampleStack& stack) {
  LabelMap out{stack.num_classes(), Grid<std::uint32_t>(stack.width(), stack.height())};
  std::vector<int> votes(static_cast<std::size_t>(stack.num_classes()));
  for (int r = 0; r < stack.height(); ++r) {
    for (int c = 0; c < stack.width(); ++c) {
      std::fill(votes.begin(), votes.end(), 0);
      for (int s = 0; s < stack.num_samples(); ++s) ++votes[stack.argmax(s, {r, c})];
      // max_element returns the first maximum, i.e. the smallest class index.
      out.labels[{r, c}] =
          static_cast<std::uint32_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
  }
  return out;
}

VarianceMap pixel_uncertainty(const SampleStack& stack) {
  VarianceMap out(stack.width(), stack.height(), 0.0);
  const int num_classes = stack.num_classes();
  const double inv_samples = 1.0 / stack.num_samples();
  std::vector<double> mean(static_cast<std::size_t>(num_classes));
  std::vector<double> sq(static_cast<std::size_t>(num_classes));
  for (int r = 0; r < stack.height(); ++r) {
    for (int c = 0; c < stack.width(); ++c) {
      std::fill(mean.begin(), mean.end(), 0.0);
      std::fill(sq.begin(), sq.end(), 0.0);
      for (int s = 0; s < stack.num_samples(); ++s) {
        const auto p = stack.probs(s, {r, c});
        for (int k = 0; k < num_classes; ++k) mean[k] += p[k];
      }
      for (auto& m : mean) m *= inv_samples;
      for (int s = 0; s < stack.num_samples(); ++s) {
        const auto p = stack.probs(s, {r, c});
        for (int k = 0; k < num_classes; ++k) {
          const double d = p[k] - mean[k];
          sq[k] += d * d;
        }
      }
      double total = 0.0;
      for (double v : sq) total += v * inv_samples;
      out[{r, c}] = std::clamp(total / num_classes, 0.0, 0.25);
    }
  }
  return out;
}

RiskCostMap build_cost_map(const LabelMap& labels, const VarianceMap& variance,
                           const CostMapping& mapping) {
  if (!labels.labels.same_shape(variance)) {
    throw DimensionMismatch("cost map: label and variance maps differ in shape");
  }
  if (!(mapping.lambda >= 0.0) || is_impassable(mapping.lambda)) {
    throw InvalidSpec("cost map: lambda must be a finite nonnegative number");
  }
  RiskCostMap out(labels.width(), labels.height(), 0.0);
  const auto lab = labels.labels.values();
  const auto var = variance.values();
  auto cost = out.values();
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const double base = mapping.classes.at(lab[i]);
    cost[i] = is_impassable(base) ? kImpassable : base + mapping.lambda * var[i];
  }
  return out;
}

std::vector<std::optional<double>> class_cross_entropy(const SampleStack& stack,
                                                       const LabelMap& truth) {
  if (!truth.labels.same_shape(stack.width(), stack.height())) {
    throw DimensionMismatch("cross entropy: truth map and stack differ in shape");
  }
  const auto num_classes = static_cast<std::size_t>(stack.num_classes());
  std::vector<double> sum(num_classes, 0.0);
  std::vector<std::size_t> count(num_classes, 0);
  for (int s = 0; s < stack.num_samples(); ++s) {
    for (int r = 0; r < stack.height(); ++r) {
      for (int c = 0; c < stack.width(); ++c) {
        const std::uint32_t t = truth.labels[{r, c}];
        if (t >= num_classes) {
          throw DimensionMismatch("cross entropy: truth label " + std::to_string(t) +
                                  " exceeds the stack's class count");
        }
        const double p = std::max<double>(stack.probs(s, {r, c})[t], kMinCrossEntropyProb);
        sum[t] -= std::log(p);
        ++count[t];
      }
    }
  }
  std::vector<std::optional<double>> out(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (count[k] > 0) out[k] = sum[k] / static_cast<double>(count[k]);
  }
  return out;
}

}  // namespace riskgrid
