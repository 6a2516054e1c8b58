#pragma once

// Straightforward reference implementations used to cross-check the library.
// They share no code with it beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "riskgrid/assignment.hpp"
#include "riskgrid/efficiency.hpp"
#include "riskgrid/grid.hpp"
#include "riskgrid/terrain.hpp"

namespace oracle {

using riskgrid::Pixel;

// ---- grid shortest paths ---------------------------------------------------

// Cost of an 8-connected path with integer pixel costs, kept exact as
// (straight, diagonal) counts of half-units: value = (a + sqrt2 * b) / 2.
struct HalfUnits {
  long a = 0;
  long b = 0;
  friend bool operator==(const HalfUnits&, const HalfUnits&) = default;
};

// a1 + sqrt2*b1 < a2 + sqrt2*b2, decided without rounding.
inline bool exact_less(HalfUnits p, HalfUnits q) {
  const long x = p.a - q.a;  // is x < sqrt2 * y ?
  const long y = q.b - p.b;
  if (x >= 0 && y <= 0) return false;
  if (x < 0 && y >= 0) return true;
  if (x >= 0) return x * x < 2 * y * y;
  return x * x > 2 * y * y;
}

inline double half_units_value(HalfUnits h) {
  return static_cast<double>(h.a) / 2.0 + std::sqrt(2.0) * (static_cast<double>(h.b) / 2.0);
}

inline const int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline const int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

// Dijkstra over integer costs (-1 = blocked). Returns nullopt if unreachable.
inline std::optional<HalfUnits> dijkstra_exact(const std::vector<std::vector<int>>& cost, Pixel s,
                                               Pixel g) {
  const int h = static_cast<int>(cost.size());
  const int w = static_cast<int>(cost[0].size());
  std::vector<std::optional<HalfUnits>> dist(static_cast<std::size_t>(w * h));
  std::vector<char> done(dist.size(), 0);
  auto id = [w](int r, int c) { return static_cast<std::size_t>(r * w + c); };
  dist[id(s.row, s.col)] = HalfUnits{};
  using Item = std::pair<HalfUnits, std::size_t>;
  auto later = [](const Item& x, const Item& y) { return exact_less(y.first, x.first); };
  std::priority_queue<Item, std::vector<Item>, decltype(later)> open(later);
  open.push({HalfUnits{}, id(s.row, s.col)});
  while (!open.empty()) {
    const auto [d, best] = open.top();
    open.pop();
    if (done[best]) continue;
    if (best == id(g.row, g.col)) return d;
    done[best] = 1;
    const int r = static_cast<int>(best) / w;
    const int c = static_cast<int>(best) % w;
    for (int n = 0; n < 8; ++n) {
      const int nr = r + kDr[n];
      const int nc = c + kDc[n];
      if (nr < 0 || nc < 0 || nr >= h || nc >= w || cost[nr][nc] < 0) continue;
      HalfUnits cand = d;
      const long step = cost[r][c] + cost[nr][nc];
      if (kDr[n] != 0 && kDc[n] != 0) {
        cand.b += step;
      } else {
        cand.a += step;
      }
      auto& slot = dist[id(nr, nc)];
      if (!slot || exact_less(cand, *slot)) {
        slot = cand;
        open.push({cand, id(nr, nc)});
      }
    }
  }
  return std::nullopt;
}

// Exact half-unit cost of a given pixel sequence.
inline HalfUnits path_half_units(const std::vector<std::vector<int>>& cost,
                                 const std::vector<Pixel>& path) {
  HalfUnits h;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Pixel u = path[i - 1];
    const Pixel v = path[i];
    const long step = cost[u.row][u.col] + cost[v.row][v.col];
    if (u.row != v.row && u.col != v.col) {
      h.b += step;
    } else {
      h.a += step;
    }
  }
  return h;
}

// Integer pixel costs in [1, max_cost]; `blocked` fraction set to -1.
inline std::vector<std::vector<int>> random_int_map(std::mt19937_64& gen, int w, int h,
                                                    double blocked, int max_cost = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<int>> m(static_cast<std::size_t>(h), std::vector<int>(static_cast<std::size_t>(w)));
  for (auto& row : m)
    for (auto& c : row) c = u(gen) < blocked ? -1 : 1 + static_cast<int>(gen() % static_cast<unsigned>(max_cost));
  return m;
}

inline riskgrid::Grid<double> to_cost_grid(const std::vector<std::vector<int>>& m, double scale = 1.0) {
  riskgrid::Grid<double> g(static_cast<int>(m[0].size()), static_cast<int>(m.size()));
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      g[{r, c}] = m[r][c] < 0 ? std::numeric_limits<double>::infinity() : scale * m[r][c];
  return g;
}

inline Pixel random_open_pixel(std::mt19937_64& gen, const std::vector<std::vector<int>>& m) {
  for (;;) {
    const Pixel p{static_cast<int>(gen() % m.size()), static_cast<int>(gen() % m[0].size())};
    if (m[p.row][p.col] >= 0) return p;
  }
}

// Dijkstra over real costs (infinite = blocked), binary heap.
inline double dijkstra_real(const riskgrid::Grid<double>& cost, Pixel s, Pixel g) {
  const double inf = std::numeric_limits<double>::infinity();
  riskgrid::Grid<double> dist(cost.width(), cost.height(), inf);
  using Item = std::pair<double, std::pair<int, int>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[s] = 0.0;
  open.push({0.0, {s.row, s.col}});
  while (!open.empty()) {
    const auto [d, rc] = open.top();
    open.pop();
    const Pixel u{rc.first, rc.second};
    if (d > dist[u]) continue;
    if (u == g) return d;
    for (int n = 0; n < 8; ++n) {
      const Pixel v{u.row + kDr[n], u.col + kDc[n]};
      if (!cost.contains(v) || std::isinf(cost[v])) continue;
      const double len = (kDr[n] != 0 && kDc[n] != 0) ? std::sqrt(2.0) : 1.0;
      const double nd = d + 0.5 * (cost[u] + cost[v]) * len;
      if (nd < dist[v]) {
        dist[v] = nd;
        open.push({nd, {v.row, v.col}});
      }
    }
  }
  return inf;
}

// ---- statistics ------------------------------------------------------------

inline double population_variance(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size());
}

// Sort, then average the k = ceil(alpha * n) smallest.
inline double cvar_sorted(std::vector<double> xs, double alpha) {
  std::sort(xs.begin(), xs.end());
  std::size_t k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(xs.size()) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += xs[i];
  return acc / static_cast<double>(k);
}

// ---- assignment ------------------------------------------------------------

// Efficiency table e[tuple][draw] for tuples in (i, j, k) lexicographic order.
struct Table {
  int n = 0, m = 0, k = 0, draws = 0;
  std::vector<std::vector<double>> e;

  int slot(const riskgrid::TupleIndex& t) const { return (t.vehicle * m + t.demand) * k + t.path; }

  riskgrid::EfficiencyMatrix matrix() const {
    std::vector<riskgrid::TupleIndex> tuples;
    std::vector<double> flat;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        for (int p = 0; p < k; ++p) {
          tuples.push_back({i, j, p});
          const auto& row = e[static_cast<std::size_t>(slot({i, j, p}))];
          flat.insert(flat.end(), row.begin(), row.end());
        }
    return riskgrid::EfficiencyMatrix(tuples, draws, flat);
  }
};

inline double f_naive(const Table& t, const std::vector<riskgrid::TupleIndex>& set, int d) {
  double total = 0.0;
  for (int j = 0; j < t.m; ++j) {
    double best = 0.0;
    for (const auto& x : set)
      if (x.demand == j) best = std::max(best, t.e[static_cast<std::size_t>(t.slot(x))][static_cast<std::size_t>(d)]);
    total += best;
  }
  return total;
}

inline double h_naive(const Table& t, const std::vector<riskgrid::TupleIndex>& set, double tau,
                      double alpha) {
  double hinge = 0.0;
  for (int d = 0; d < t.draws; ++d) hinge += std::max(tau - f_naive(t, set, d), 0.0);
  return tau - hinge / (alpha * t.draws);
}

// Every set with at most one tuple per vehicle and at most m tuples.
inline void for_each_feasible(const Table& t,
                              const std::function<void(const std::vector<riskgrid::TupleIndex>&)>& fn) {
  std::vector<riskgrid::TupleIndex> cur;
  std::function<void(int)> rec = [&](int vehicle) {
    if (vehicle == t.n) {
      fn(cur);
      return;
    }
    rec(vehicle + 1);
    if (static_cast<int>(cur.size()) == t.m) return;
    for (int j = 0; j < t.m; ++j)
      for (int p = 0; p < t.k; ++p) {
        cur.push_back({vehicle, j, p});
        rec(vehicle + 1);
        cur.pop_back();
      }
  };
  rec(0);
}

// Random efficiency table. Draw d carries a shared shock so tuples are
// correlated across the same draw; some draws fail outright (efficiency 0).
// With `dyadic` every value is a multiple of 1/1024 so sums are exact.
inline Table random_table(std::mt19937_64& gen, int n, int m, int k, int draws, bool dyadic = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Table t{n, m, k, draws, {}};
  std::vector<double> shock(static_cast<std::size_t>(draws));
  for (auto& s : shock) s = u(gen);
  for (int x = 0; x < n * m * k; ++x) {
    const double mean = 0.1 + 0.9 * u(gen);
    const double spread = u(gen);
    const double fail = u(gen) < 0.3 ? 0.2 * u(gen) : 0.0;
    std::vector<double> row(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
      double v = mean * (1.0 - spread * (0.5 * shock[static_cast<std::size_t>(d)] + 0.5 * u(gen)));
      if (u(gen) < fail) v = 0.0;
      v = std::max(v, 0.0);
      if (dyadic) v = std::round(v * 1024.0) / 1024.0;
      row[static_cast<std::size_t>(d)] = v;
    }
    t.e.push_back(row);
  }
  return t;
}

// Plain sequential greedy at one tau: rounds over unused vehicles, strict
// improvement, candidates scanned in (i, j, k) order.
inline std::vector<riskgrid::TupleIndex> greedy_at(const Table& t, double tau, double alpha) {
  std::vector<riskgrid::TupleIndex> set;
  std::vector<char> used(static_cast<std::size_t>(t.n), 0);
  for (int round = 0; round < t.m; ++round) {
    const double base = h_naive(t, set, tau, alpha);
    std::optional<riskgrid::TupleIndex> best;
    double best_gain = 0.0;
    for (int i = 0; i < t.n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < t.m; ++j)
        for (int p = 0; p < t.k; ++p) {
          auto trial = set;
          trial.push_back({i, j, p});
          const double gain = h_naive(t, trial, tau, alpha) - base;
          if (!best || gain > best_gain) {
            best = riskgrid::TupleIndex{i, j, p};
            best_gain = gain;
          }
        }
    }
    if (!best) break;
    set.push_back(*best);
    used[static_cast<std::size_t>(best->vehicle)] = 1;
  }
  return set;
}

// ---- files -----------------------------------------------------------------

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> bytes for every regular file under `root`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("riskgrid_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
