#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "riskgrid/error.hpp"
#include "riskgrid/raster_io.hpp"
#include "riskgrid/synth.hpp"
#include "riskgrid/terrain.hpp"

using namespace riskgrid;

namespace {

// One-hot stack where layer s at pixel p is labelled label(s, p).
template <typename F>
SampleStack one_hot_stack(int w, int h, int c, int s, F label) {
  SampleStack st(w, h, c, s);
  for (int k = 0; k < s; ++k)
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) st.probs(k, {r, col})[label(k, Pixel{r, col})] = 1.0f;
  return st;
}

SampleStack random_stack(std::mt19937_64& gen, int w, int h, int c, int s) {
  SampleStack st(w, h, c, s);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int k = 0; k < s; ++k)
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) {
        auto p = st.probs(k, {r, col});
        float sum = 0.0f;
        for (auto& v : p) sum += (v = u(gen));
        for (auto& v : p) v /= sum;
      }
  return st;
}

SampleStack permute_samples(const SampleStack& st, const std::vector<int>& order) {
  SampleStack out(st.width(), st.height(), st.num_classes(), st.num_samples());
  for (int k = 0; k < st.num_samples(); ++k)
    for (int r = 0; r < st.height(); ++r)
      for (int c = 0; c < st.width(); ++c) {
        auto src = st.probs(order[static_cast<std::size_t>(k)], {r, c});
        std::copy(src.begin(), src.end(), out.probs(k, {r, c}).begin());
      }
  return out;
}

SampleStack permute_classes(const SampleStack& st, const std::vector<int>& order) {
  SampleStack out(st.width(), st.height(), st.num_classes(), st.num_samples());
  for (int k = 0; k < st.num_samples(); ++k)
    for (int r = 0; r < st.height(); ++r)
      for (int c = 0; c < st.width(); ++c)
        for (int cls = 0; cls < st.num_classes(); ++cls)
          out.probs(k, {r, c})[static_cast<std::size_t>(cls)] =
              st.probs(k, {r, c})[static_cast<std::size_t>(order[static_cast<std::size_t>(cls)])];
  return out;
}

std::string header(const char* magic, std::uint32_t w, std::uint32_t h, std::uint32_t c,
                   std::uint32_t s) {
  std::string out(magic, 6);
  for (std::uint32_t v : {w, h, c, s})
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  return out;
}

void append_floats(std::string& out, std::initializer_list<float> vals) {
  for (float f : vals) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("well-formed 2x2 stack round-trips") {
    std::mt19937_64 gen(1);
    const SampleStack st = random_stack(gen, 2, 2, 3, 2);
    const SampleStack back = decode_sample_stack(encode_sample_stack(st));
    CHECK(back.width() == 2);
    CHECK(back.height() == 2);
    CHECK(back.num_classes() == 3);
    CHECK(back.num_samples() == 2);
  }

  TEST_CASE("exact sums are kept bit for bit") {
    const SampleStack st = one_hot_stack(3, 2, 4, 2, [](int k, Pixel p) { return (k + p.col) % 4; });
    CHECK(decode_sample_stack(encode_sample_stack(st)) == st);
  }

  TEST_CASE("payload shorter than the header claims") {
    std::string bytes = header("RSEG1\0", 1, 1, 2, 2);
    append_floats(bytes, {0.5f, 0.5f});
    CHECK_THROWS_AS(decode_sample_stack(bytes), DimensionMismatch);
  }

  TEST_CASE("pixel summing to 1.1 is rejected") {
    std::string bytes = header("RSEG1\0", 1, 1, 3, 1);
    append_floats(bytes, {0.5f, 0.5f, 0.1f});
    CHECK_THROWS_AS(decode_sample_stack(bytes), ProbabilityDrift);
  }

  TEST_CASE("small drift is renormalized") {
    std::string bytes = header("RSEG1\0", 1, 1, 2, 1);
    append_floats(bytes, {0.6004f, 0.4f});
    const SampleStack st = decode_sample_stack(bytes);
    const auto p = st.probs(0, {0, 0});
    CHECK(static_cast<double>(p[0]) + static_cast<double>(p[1]) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p[0] < 0.6004f);
  }

  TEST_CASE("bad magic and truncated header") {
    std::string bytes = header("RSEGX\0", 1, 1, 2, 1);
    append_floats(bytes, {0.5f, 0.5f});
    CHECK_THROWS_AS(decode_sample_stack(bytes), MalformedHeader);
    CHECK_THROWS_AS(decode_sample_stack(std::string("RSEG1")), MalformedHeader);
    CHECK_THROWS_AS(decode_label_map(encode_sample_stack(one_hot_stack(1, 1, 2, 1, [](int, Pixel) { return 0; }))),
                    MalformedHeader);
  }

  TEST_CASE("label and variance maps round-trip in both encodings") {
    LabelMap lm{4, Grid<std::uint32_t>(3, 2)};
    lm.labels[{1, 2}] = 3;
    lm.labels[{0, 1}] = 1;
    CHECK(decode_label_map(encode_label_map(lm)) == lm);
    CHECK(label_map_from_csv(label_map_to_csv(lm)) == lm);

    Grid<double> var(3, 2);
    var[{0, 0}] = 0.1;
    var[{1, 1}] = 1.0 / 30.0;
    var[{1, 2}] = 0.25;
    CHECK(decode_variance_map(encode_variance_map(var)) == var);
    CHECK(real_grid_from_csv(real_grid_to_csv(var)) == var);

    Grid<double> costs(2, 1);
    costs[{0, 0}] = kImpassable;
    costs[{0, 1}] = 2.5;
    CHECK(real_grid_from_csv(real_grid_to_csv(costs)) == costs);
  }

  TEST_CASE("label map with out-of-range label is rejected") {
    CHECK_THROWS_AS(label_map_from_csv("# num_classes=2\n0,1\n2,0\n"), DimensionMismatch);
  }
}

TEST_SUITE("mode label") {
  TEST_CASE("15 of 20 samples vote class 3") {
    const auto st = one_hot_stack(1, 1, 4, 20, [](int k, Pixel) { return k < 15 ? 3u : 1u; });
    CHECK(mode_label(st).labels[{0, 0}] == 3);
  }

  TEST_CASE("single sample gives its argmax") {
    std::mt19937_64 gen(2);
    const SampleStack st = random_stack(gen, 4, 3, 5, 1);
    const LabelMap lm = mode_label(st);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) {
        const auto p = st.probs(0, {r, c});
        CHECK(lm.labels[{r, c}] == static_cast<std::uint32_t>(std::max_element(p.begin(), p.end()) - p.begin()));
      }
  }

  TEST_CASE("10/10 split between classes 2 and 5 goes to 2") {
    const auto st = one_hot_stack(1, 1, 6, 20, [](int k, Pixel) { return k % 2 ? 5u : 2u; });
    CHECK(mode_label(st).labels[{0, 0}] == 2);
  }

  TEST_CASE("agrees with an exhaustive vote count and ignores sample order") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
      const int c = 2 + static_cast<int>(gen() % 4);
      const int s = 1 + static_cast<int>(gen() % 6);
      // coarse probabilities so argmax and vote ties actually happen
      SampleStack st(3, 3, c, s);
      for (int k = 0; k < s; ++k)
        for (int r = 0; r < 3; ++r)
          for (int col = 0; col < 3; ++col) {
            auto p = st.probs(k, {r, col});
            std::vector<int> w(static_cast<std::size_t>(c));
            int total = 0;
            for (auto& x : w) total += (x = static_cast<int>(gen() % 3));
            if (total == 0) w[0] = total = 1;
            for (int i = 0; i < c; ++i) p[static_cast<std::size_t>(i)] = static_cast<float>(w[static_cast<std::size_t>(i)]) / static_cast<float>(total);
          }
      const LabelMap lm = mode_label(st);
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) {
          std::vector<int> votes(static_cast<std::size_t>(c), 0);
          for (int k = 0; k < s; ++k) {
            const auto p = st.probs(k, {r, col});
            int best = 0;
            for (int i = 1; i < c; ++i)
              if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
            ++votes[static_cast<std::size_t>(best)];
          }
          int mode = 0;
          for (int i = 1; i < c; ++i)
            if (votes[static_cast<std::size_t>(i)] > votes[static_cast<std::size_t>(mode)]) mode = i;
          CHECK(lm.labels[{r, col}] == static_cast<std::uint32_t>(mode));
        }
      std::vector<int> order(static_cast<std::size_t>(s));
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), gen);
      CHECK(mode_label(permute_samples(st, order)) == lm);
    }
  }
}

TEST_SUITE("pixel uncertainty") {
  TEST_CASE("identical samples give zero") {
    const auto st = one_hot_stack(2, 2, 3, 5, [](int, Pixel p) { return static_cast<std::uint32_t>(p.row); });
    const VarianceMap var = pixel_uncertainty(st);
    for (double v : var.values()) CHECK(v == 0.0);
  }

  TEST_CASE("C=2, S=2 opposite one-hots give 0.25") {
    const auto st = one_hot_stack(1, 1, 2, 2, [](int k, Pixel) { return static_cast<std::uint32_t>(k); });
    CHECK(pixel_uncertainty(st)[{0, 0}] == 0.25);
  }

  TEST_CASE("single sample gives an all-zero map") {
    std::mt19937_64 gen(4);
    const VarianceMap var = pixel_uncertainty(random_stack(gen, 3, 3, 4, 1));
    for (double v : var.values()) CHECK(v == 0.0);
  }

  TEST_CASE("matches the direct variance formula and is permutation invariant") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
      const int c = 2 + static_cast<int>(gen() % 5);
      const int s = 1 + static_cast<int>(gen() % 8);
      const SampleStack st = random_stack(gen, 4, 3, c, s);
      const VarianceMap var = pixel_uncertainty(st);
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 4; ++col) {
          double acc = 0.0;
          for (int cls = 0; cls < c; ++cls) {
            std::vector<double> xs;
            for (int k = 0; k < s; ++k) xs.push_back(st.probs(k, {r, col})[static_cast<std::size_t>(cls)]);
            acc += oracle::population_variance(xs);
          }
          CHECK(var[{r, col}] == doctest::Approx(acc / c).epsilon(1e-12));
          CHECK(var[{r, col}] >= 0.0);
          CHECK(var[{r, col}] <= 0.25);
        }
      std::vector<int> so(static_cast<std::size_t>(s)), co(static_cast<std::size_t>(c));
      std::iota(so.begin(), so.end(), 0);
      std::iota(co.begin(), co.end(), 0);
      std::shuffle(so.begin(), so.end(), gen);
      std::shuffle(co.begin(), co.end(), gen);
      const VarianceMap by_sample = pixel_uncertainty(permute_samples(st, so));
      const VarianceMap by_class = pixel_uncertainty(permute_classes(st, co));
      for (std::size_t i = 0; i < var.size(); ++i) {
        CHECK(by_sample.values()[i] == doctest::Approx(var.values()[i]).epsilon(1e-12));
        CHECK(by_class.values()[i] == doctest::Approx(var.values()[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_SUITE("cost map") {
  const ClassCosts kCosts({1.0, 3.0, 2.0, kImpassable});

  LabelMap labels_3x3() {
    LabelMap lm{4, Grid<std::uint32_t>(3, 3)};
    lm.labels[{0, 1}] = 1;
    lm.labels[{1, 1}] = 3;
    lm.labels[{2, 2}] = 2;
    return lm;
  }

  TEST_CASE("lambda 0 gives the class-cost map") {
    const LabelMap lm = labels_3x3();
    Grid<double> var(3, 3, 0.1);
    const RiskCostMap m = build_cost_map(lm, var, {kCosts, 0.0});
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) CHECK(m[{r, c}] == kCosts.at(lm.labels[{r, c}]));
  }

  TEST_CASE("base 1, variance 0.02, lambda 50 gives 2") {
    LabelMap lm{2, Grid<std::uint32_t>(1, 1)};
    Grid<double> var(1, 1, 0.02);
    CHECK(build_cost_map(lm, var, {ClassCosts({1.0, 3.0}), 50.0})[{0, 0}] == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("impassable absorbs variance") {
    const LabelMap lm = labels_3x3();
    Grid<double> var(3, 3, 0.25);
    CHECK(is_impassable(build_cost_map(lm, var, {kCosts, 1000.0})[{1, 1}]));
  }

  TEST_CASE("missing class cost and shape mismatch") {
    LabelMap lm{5, Grid<std::uint32_t>(2, 2)};
    lm.labels[{0, 0}] = 4;
    CHECK_THROWS_AS(build_cost_map(lm, Grid<double>(2, 2), {kCosts, 1.0}), MissingClassCost);
    CHECK_THROWS_AS(build_cost_map(labels_3x3(), Grid<double>(2, 3), {kCosts, 1.0}), DimensionMismatch);
  }

  TEST_CASE("monotone in lambda, never below the class cost") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 0.25);
    for (int trial = 0; trial < 30; ++trial) {
      LabelMap lm{4, Grid<std::uint32_t>(6, 5)};
      Grid<double> var(6, 5);
      for (auto& l : lm.labels.values()) l = static_cast<std::uint32_t>(gen() % 4);
      for (auto& v : var.values()) v = u(gen);
      double l1 = u(gen) * 100, l2 = u(gen) * 100;
      if (l1 > l2) std::swap(l1, l2);
      const RiskCostMap a = build_cost_map(lm, var, {kCosts, l1});
      const RiskCostMap b = build_cost_map(lm, var, {kCosts, l2});
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.values()[i] <= b.values()[i]);
        if (!is_impassable(a.values()[i])) {
          CHECK(a.values()[i] >= kCosts.at(lm.labels.values()[i]));
          CHECK(a.values()[i] >= kCosts.min_finite());
        }
      }
    }
  }

  TEST_CASE("uniform variance keeps the cheapest pixels") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 30; ++trial) {
      LabelMap lm{4, Grid<std::uint32_t>(5, 5)};
      for (auto& l : lm.labels.values()) l = static_cast<std::uint32_t>(gen() % 4);
      Grid<double> var(5, 5, 0.07);
      const RiskCostMap base = build_cost_map(lm, var, {kCosts, 0.0});
      const RiskCostMap risky = build_cost_map(lm, var, {kCosts, 40.0});
      auto argmin = [](const RiskCostMap& m) {
        return std::min_element(m.values().begin(), m.values().end()) - m.values().begin();
      };
      CHECK(argmin(base) == argmin(risky));
    }
  }

  TEST_CASE("class costs must be positive with one passable class") {
    CHECK_THROWS_AS(ClassCosts({kImpassable, kImpassable}), InvalidSpec);
    CHECK_THROWS_AS(ClassCosts({1.0, 0.0}), InvalidSpec);
    CHECK_THROWS_AS(ClassCosts({1.0, -2.0}), InvalidSpec);
    CHECK(ClassCosts({kImpassable, 2.0, 5.0}).min_finite() == 2.0);
  }
}

TEST_SUITE("cross entropy") {
  TEST_CASE("perfect prediction scores zero, absent classes are marked") {
    const auto st = one_hot_stack(3, 2, 4, 3, [](int, Pixel p) { return static_cast<std::uint32_t>(p.col); });
    LabelMap truth{4, Grid<std::uint32_t>(3, 2)};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c) truth.labels[{r, c}] = static_cast<std::uint32_t>(c);
    const auto ce = class_cross_entropy(st, truth);
    REQUIRE(ce.size() == 4);
    for (int c = 0; c < 3; ++c) CHECK(*ce[static_cast<std::size_t>(c)] == 0.0);
    CHECK_FALSE(ce[3].has_value());
  }

  TEST_CASE("uniform prediction over four classes gives log 4") {
    SampleStack st(2, 2, 4, 2);
    for (int k = 0; k < 2; ++k)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          for (auto& v : st.probs(k, {r, c})) v = 0.25f;
    LabelMap truth{4, Grid<std::uint32_t>(2, 2)};
    truth.labels[{0, 1}] = 2;
    const auto ce = class_cross_entropy(st, truth);
    // naive loop over the two present classes
    for (std::uint32_t cls : {0u, 2u}) {
      double acc = 0.0;
      int n = 0;
      for (int k = 0; k < 2; ++k)
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c)
            if (truth.labels[{r, c}] == cls) {
              acc += -std::log(static_cast<double>(st.probs(k, {r, c})[cls]));
              ++n;
            }
      CHECK(*ce[cls] == doctest::Approx(acc / n).epsilon(1e-12));
      CHECK(*ce[cls] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    }
    CHECK_FALSE(ce[1].has_value());
    CHECK_FALSE(ce[3].has_value());
  }

  TEST_CASE("nonnegative on random stacks, shape checked") {
    std::mt19937_64 gen(8);
    const SampleStack st = random_stack(gen, 4, 4, 3, 5);
    LabelMap truth{3, Grid<std::uint32_t>(4, 4)};
    for (auto& l : truth.labels.values()) l = static_cast<std::uint32_t>(gen() % 3);
    for (const auto& v : class_cross_entropy(st, truth))
      if (v) CHECK(*v >= 0.0);
    CHECK_THROWS_AS(class_cross_entropy(st, LabelMap{3, Grid<std::uint32_t>(3, 4)}), DimensionMismatch);
  }
}

TEST_SUITE("synthetic scenes") {
  SceneSpec scene(double inside, double outside) {
    SceneSpec spec;
    spec.width = 40;
    spec.height = 30;
    spec.num_classes = 4;
    spec.num_samples = 20;
    spec.background_label = 0;
    spec.background_confusion = outside;
    SceneRegion patch;
    patch.name = "patch";
    patch.rect = {5, 5, 8, 10};
    patch.label = 2;
    patch.confusion = outside;
    SceneRegion ood;
    ood.name = "unseen";
    ood.rect = {15, 10, 10, 20};
    ood.label = 1;
    ood.alt_label = 3;
    ood.confusion = inside;
    ood.out_of_distribution = true;
    spec.regions = {patch, ood};
    return spec;
  }

  TEST_CASE("zero confusion yields zero uncertainty and the truth labels") {
    const SyntheticScene s = synth_scene(scene(0.0, 0.0), 3);
    const VarianceMap var = pixel_uncertainty(s.stack);
    for (double v : var.values()) CHECK(v == 0.0);
    CHECK(mode_label(s.stack) == s.truth);
    CHECK(s.truth.labels[{6, 6}] == 2);
    CHECK(s.truth.labels[{20, 20}] == 1);
  }

  TEST_CASE("same spec and seed give identical bytes") {
    const SceneSpec spec = scene(0.5, 0.01);
    CHECK(encode_sample_stack(synth_scene(spec, 9).stack) == encode_sample_stack(synth_scene(spec, 9).stack));
    CHECK(encode_sample_stack(synth_scene(spec, 9).stack) != encode_sample_stack(synth_scene(spec, 10).stack));
  }

  TEST_CASE("unseen region is at least five times as uncertain") {
    const SceneSpec spec = scene(0.5, 0.01);
    const auto mask = spec.ood_mask();
    for (std::uint64_t seed : {1u, 2u, 3u, 7u, 11u}) {
      const SyntheticScene s = synth_scene(spec, seed);
      s.stack.validate();
      const VarianceMap var = pixel_uncertainty(s.stack);
      double in = 0, out = 0;
      int n_in = 0, n_out = 0;
      for (std::size_t i = 0; i < var.size(); ++i) {
        if (mask.values()[i]) {
          in += var.values()[i];
          ++n_in;
        } else {
          out += var.values()[i];
          ++n_out;
        }
      }
      CHECK(in / n_in >= 5.0 * (out / n_out));
    }
  }

  TEST_CASE("invalid specs") {
    SceneSpec spec = scene(0.1, 0.01);
    spec.regions[0].rect = {25, 35, 10, 10};
    CHECK_THROWS_AS(synth_scene(spec, 1), InvalidSpec);
    spec = scene(0.1, 0.01);
    spec.num_classes = 0;
    CHECK_THROWS_AS(synth_scene(spec, 1), InvalidSpec);
    spec = scene(0.1, 0.01);
    spec.regions[1].alt_label = 7;
    CHECK_THROWS_AS(synth_scene(spec, 1), InvalidSpec);
    spec = scene(1.5, 0.01);
    CHECK_THROWS_AS(synth_scene(spec, 1), InvalidSpec);
  }
}
