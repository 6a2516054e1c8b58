#include "riskgrid/synth.hpp"

#include "riskgrid/error.hpp"
#include "riskgrid/rng.hpp"

namespace riskgrid {

namespace {

constexpr int kBackground = -1;

Grid<int> region_index(const SceneSpec& spec) {
  Grid<int> idx(spec.width, spec.height, kBackground);
  for (std::size_t k = 0; k < spec.regions.size(); ++k) {
    const Rect& rc = spec.regions[k].rect;
    for (int r = rc.row; r < rc.row + rc.height; ++r) {
      for (int c = rc.col; c < rc.col + rc.width; ++c) idx[{r, c}] = static_cast<int>(k);
    }
  }
  return idx;
}

void check_confusion(double q, const std::string& who) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidSpec(who + ": confusion must lie in [0, 1]");
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw InvalidSpec("scene: grid must be non-empty");
  if (num_classes < 2) throw InvalidSpec("scene: class set needs at least two classes");
  if (num_samples < 1) throw InvalidSpec("scene: need at least one sample");
  if (background_label >= static_cast<std::uint32_t>(num_classes)) {
    throw InvalidSpec("scene: background label out of range");
  }
  check_confusion(background_confusion, "scene background");
  for (const auto& reg : regions) {
    const std::string who = "scene region '" + reg.name + "'";
    const Rect& rc = reg.rect;
    if (rc.height <= 0 || rc.width <= 0 || rc.row < 0 || rc.col < 0 ||
        rc.row + rc.height > height || rc.col + rc.width > width) {
      throw InvalidSpec(who + ": rectangle out of bounds");
    }
    if (reg.label >= static_cast<std::uint32_t>(num_classes) ||
        (reg.alt_label && *reg.alt_label >= static_cast<std::uint32_t>(num_classes))) {
      throw InvalidSpec(who + ": label out of range");
    }
    check_confusion(reg.confusion, who);
  }
}

Grid<std::uint8_t> SceneSpec::ood_mask() const {
  const Grid<int> idx = region_index(*this);
  Grid<std::uint8_t> mask(width, height, 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int k = idx[{r, c}];
      if (k != kBackground && regions[static_cast<std::size_t>(k)].out_of_distribution) {
        mask[{r, c}] = 1;
      }
    }
  }
  return mask;
}

SyntheticScene synth_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Grid<int> idx = region_index(spec);

  LabelMap truth{spec.num_classes, Grid<std::uint32_t>(spec.width, spec.height)};
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const int k = idx[{r, c}];
      truth.labels[{r, c}] =
          k == kBackground ? spec.background_label : spec.regions[static_cast<std::size_t>(k)].label;
    }
  }

  SampleStack stack(spec.width, spec.height, spec.num_classes, spec.num_samples);
  const auto num_classes = static_cast<std::size_t>(spec.num_classes);
  std::vector<double> noise(num_classes);
  std::vector<std::uint8_t> flipped(spec.regions.size());
  Rng flip_rng(derive_seed(seed, "synth.flips"));

  for (int s = 0; s < spec.num_samples; ++s) {
    for (std::size_t k = 0; k < spec.regions.size(); ++k) {
      const auto& reg = spec.regions[k];
      // Always consume the draw so one region's settings never shift another's.
      const bool flip = flip_rng.bernoulli(reg.confusion);
      flipped[k] = reg.alt_label.has_value() && flip;
    }

    Rng pixel_rng(derive_seed(derive_seed(seed, "synth.pixels"), static_cast<std::uint64_t>(s)));
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        const int k = idx[{r, c}];
        std::uint32_t label = spec.background_label;
        double confusion = spec.background_confusion;
        if (k != kBackground) {
          const auto& reg = spec.regions[static_cast<std::size_t>(k)];
          label = flipped[static_cast<std::size_t>(k)] ? *reg.alt_label : reg.label;
          confusion = reg.confusion;
        }

        const double weight = confusion * pixel_rng.uniform();
        double total = 0.0;
        for (auto& v : noise) {
          v = pixel_rng.uniform();
          total += v;
        }
        auto out = stack.probs(s, {r, c});
        for (std::size_t cls = 0; cls < num_classes; ++cls) {
          const double onehot = cls == label ? 1.0 : 0.0;
          const double mixed = total > 0.0 ? noise[cls] / total : 1.0 / num_classes;
          out[cls] = static_cast<float>((1.0 - weight) * onehot + weight * mixed);
        }
      }
    }
  }
  return {std::move(truth), std::move(stack)};
}

}  // namespace riskgrid
