#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskgrid/terrain.hpp"

namespace riskgrid {

struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;

  bool contains(Pixel p) const {
    return p.row >= row && p.row < row + height && p.col >= col && p.col < col + width;
  }
};

/// A rectangular patch of terrain. Later regions paint over earlier ones.
///
/// confusion in [0, 1] controls how unsure the simulated network is:
/// every sample blends the one-hot label with a random distribution at a
/// per-pixel weight drawn from U(0, confusion), and when alt_class is set
/// the whole region is read as alt_class in a sample with probability
/// confusion (one draw per sample and region, so the error is spatially
/// coherent the way dropout samples are).
struct SceneRegion {
  std::string name;
  Rect rect;
  std::uint32_t label = 0;
  std::optional<std::uint32_t> alt_label;
  double confusion = 0.0;
  bool out_of_distribution = false;
};

struct SceneSpec {
  int width = 0;
  int height = 0;
  int num_classes = 0;
  int num_samples = 20;
  std::uint32_t background_label = 0;
  double background_confusion = 0.0;
  std::vector<SceneRegion> regions;

  /// Throws InvalidSpec on out-of-bounds regions, bad labels or confusion.
  void validate() const;
  /// Pixels covered by regions flagged out_of_distribution (after painting).
  Grid<std::uint8_t> ood_mask() const;
};

struct SyntheticScene {
  LabelMap truth;
  SampleStack stack;
};

/// Deterministic in (spec, seed).
SyntheticScene synth_scene(const SceneSpec& spec, std::uint64_t seed);

}  // namespace riskgrid
