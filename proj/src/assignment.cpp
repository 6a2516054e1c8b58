#include "riskgrid/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskgrid/error.hpp"
#include "riskgrid/parallel.hpp"

namespace riskgrid {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-demand running maxima for one set, laid out [demand * D + draw].
struct DemandMaxima {
  int num_demands;
  int num_draws;
  std::vector<double> best;

  DemandMaxima(int m, int d)
      : num_demands(m), num_draws(d), best(static_cast<std::size_t>(m) * d, 0.0) {}

  void add(TupleIndex t, const EfficiencyMatrix& matrix) {
    const auto e = matrix.draws(t);
    double* row = best.data() + static_cast<std::size_t>(t.demand) * num_draws;
    for (int d = 0; d < num_draws; ++d) row[d] = std::max(row[d], e[d]);
  }

  // f for every draw, optionally as if `extra` were also in the set. Sums
  // run over demands in index order, the same as total_efficiency.
  void totals(std::vector<double>& f, const EfficiencyMatrix& matrix,
              const TupleIndex* extra = nullptr) const {
    f.assign(static_cast<std::size_t>(num_draws), 0.0);
    std::span<const double> e;
    if (extra) e = matrix.draws(*extra);
    for (int d = 0; d < num_draws; ++d) {
      double sum = 0.0;
      for (int j = 0; j < num_demands; ++j) {
        double v = best[static_cast<std::size_t>(j) * num_draws + d];
        if (extra && extra->demand == j) v = std::max(v, e[d]);
        sum += v;
      }
      f[d] = sum;
    }
  }
};

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidSpec("alpha must lie in (0, 1]");
}

// Argmax over the trace with the smallest tau winning ties.
void pick_best(AssignmentSolution& sol) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sol.trace.size(); ++i) {
    if (sol.trace[i].h_value > sol.trace[best].h_value) best = i;
  }
  sol.tau_index = best;
  sol.tau_star = sol.trace[best].tau;
  sol.h_value = sol.trace[best].h_value;
  sol.selected = sol.trace[best].set;
}

}  // namespace

void RiskParams::validate() const {
  check_alpha(alpha);
  if (!std::isfinite(gamma) || !std::isfinite(delta) || !(delta > 0.0) || !(delta <= gamma)) {
    throw InvalidSpec("tau grid needs 0 < delta <= gamma");
  }
}

std::size_t RiskParams::grid_points() const {
  const double ratio = gamma / delta;
  // Absorb rounding in gamma / (gamma / n) so it does not add a grid point.
  const double steps = std::ceil(ratio - 1e-9 * std::max(1.0, ratio));
  return static_cast<std::size_t>(steps) + 1;
}

RiskParams default_risk_params(const EfficiencyMatrix& matrix, double alpha,
                               std::optional<double> gamma, std::optional<double> delta) {
  RiskParams p;
  p.alpha = alpha;
  if (gamma) {
    p.gamma = *gamma;
  } else {
    const double best = matrix.max_efficiency();
    // Every realization impassable: f is identically zero and any range works.
    p.gamma = best > 0.0 ? matrix.num_demands() * best : 1.0;
  }
  p.delta = delta ? *delta : p.gamma / 20.0;
  p.validate();
  return p;
}

double total_efficiency(std::span<const TupleIndex> set, const EfficiencyMatrix& matrix, int draw) {
  if (draw < 0 || draw >= matrix.num_draws()) throw InvalidSpec("draw index out of range");
  std::vector<double> best(static_cast<std::size_t>(matrix.num_demands()), 0.0);
  for (const TupleIndex& t : set) {
    const double e = matrix.efficiency(t, draw);
    best[t.demand] = std::max(best[t.demand], e);
  }
  double sum = 0.0;
  for (double v : best) sum += v;
  return sum;
}

std::vector<double> efficiency_distribution(std::span<const TupleIndex> set,
                                            const EfficiencyMatrix& matrix) {
  DemandMaxima maxima(matrix.num_demands(), matrix.num_draws());
  for (const TupleIndex& t : set) maxima.add(t, matrix);
  std::vector<double> f;
  maxima.totals(f, matrix);
  return f;
}

std::size_t cvar_tail_size(std::size_t n, double alpha) {
  check_alpha(alpha);
  // The relative slack keeps alpha * n from rounding up past an integer.
  const double raw = std::ceil(alpha * static_cast<double>(n) * (1.0 - 1e-12));
  return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, n);
}

double cvar_empirical(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw EmptySamples("CVaR of an empty sample set");
  const std::size_t k = cvar_tail_size(samples.size(), alpha);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
  return sum / static_cast<double>(k);
}

double h_hat_from_samples(std::span<const double> f, double tau, double alpha) {
  if (f.empty()) throw EmptySamples("H-hat needs at least one draw");
  double shortfall = 0.0;
  for (double v : f) shortfall += std::max(tau - v, 0.0);
  return tau - shortfall / (alpha * static_cast<double>(f.size()));
}

double h_hat(std::span<const TupleIndex> set, double tau, const EfficiencyMatrix& matrix,
             double alpha) {
  check_alpha(alpha);
  return h_hat_from_samples(efficiency_distribution(set, matrix), tau, alpha);
}

std::vector<std::pair<std::size_t, std::size_t>> AssignmentSolution::non_positive_gain_rounds()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (std::size_t r = 0; r < trace[i].rounds.size(); ++r) {
      if (trace[i].rounds[r].gain <= 0.0) out.emplace_back(i, r);
    }
  }
  return out;
}

AssignmentSolution sga_assign(const EfficiencyMatrix& matrix, const RiskParams& params) {
  params.validate();
  const int n = matrix.num_vehicles();
  const int m = matrix.num_demands();
  const int k_count = matrix.num_paths();

  AssignmentSolution sol;
  sol.params = params;
  sol.trace.resize(params.grid_points());

  parallel_for(sol.trace.size(), [&](std::size_t ti) {
    TauCandidate& entry = sol.trace[ti];
    entry.tau = params.tau(ti);

    DemandMaxima maxima(m, matrix.num_draws());
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::vector<double> f_current;
    std::vector<double> f_trial;
    std::vector<double> f_best;
    maxima.totals(f_current, matrix);
    double h_current = h_hat_from_samples(f_current, entry.tau, params.alpha);

    for (int round = 0; round < m; ++round) {
      std::optional<TupleIndex> chosen;
      double best_gain = kNegInf;
      double best_h = 0.0;
      for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        for (int j = 0; j < m; ++j) {
          for (int k = 0; k < k_count; ++k) {
            const TupleIndex t{i, j, k};
            maxima.totals(f_trial, matrix, &t);
            const double h = h_hat_from_samples(f_trial, entry.tau, params.alpha);
            const double gain = h - h_current;
            // Strict comparison keeps the lexicographically first tuple on ties.
            if (gain > best_gain) {
              best_gain = gain;
              best_h = h;
              chosen = t;
              f_best.swap(f_trial);
            }
          }
        }
      }
      if (!chosen) break;  // every vehicle already assigned
      maxima.add(*chosen, matrix);
      used[chosen->vehicle] = true;
      entry.set.push_back(*chosen);
      entry.rounds.push_back({*chosen, best_gain});
      f_current.swap(f_best);
      h_current = best_h;
    }
    entry.h_value = h_current;
  });

  pick_best(sol);
  return sol;
}

std::uint64_t feasible_subset_count(int num_vehicles, int num_demands, int num_paths) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t options = static_cast<std::uint64_t>(num_demands) * num_paths;
  std::uint64_t total = 0;
  std::uint64_t choose = 1;  // C(N, size)
  std::uint64_t power = 1;   // options^size
  for (int size = 0; size <= std::min(num_vehicles, num_demands); ++size) {
    if (size > 0) {
      // C(N, s) = C(N, s-1) * (N - s + 1) / s; the division is exact.
      const auto factor = static_cast<std::uint64_t>(num_vehicles - size + 1);
      if (choose > kMax / factor) return kMax;
      choose = choose * factor / static_cast<std::uint64_t>(size);
      if (options != 0 && power > kMax / options) return kMax;
      power *= options;
    }
    if (power != 0 && choose > kMax / power) return kMax;
    const std::uint64_t term = choose * power;
    if (total > kMax - term) return kMax;
    total += term;
  }
  return total;
}

AssignmentSolution brute_force_assign(const EfficiencyMatrix& matrix, const RiskParams& params,
                                      std::uint64_t limit) {
  params.validate();
  const int n = matrix.num_vehicles();
  const int m = matrix.num_demands();
  const int k_count = matrix.num_paths();
  const std::uint64_t count = feasible_subset_count(n, m, k_count);
  if (count > limit) {
    throw InstanceTooLarge("exhaustive search would visit " + std::to_string(count) +
                           " sets (limit " + std::to_string(limit) + ")");
  }

  AssignmentSolution sol;
  sol.params = params;
  const std::size_t grid = params.grid_points();
  sol.trace.resize(grid);
  for (std::size_t ti = 0; ti < grid; ++ti) {
    sol.trace[ti].tau = params.tau(ti);
    sol.trace[ti].h_value = kNegInf;
  }

  // Depth-first over vehicles; each either stays idle or takes one
  // (demand, path) option, with at most M tuples in total.
  TupleSet current;
  std::vector<double> f;
  auto visit = [&](auto&& self, int vehicle) -> void {
    if (vehicle == n) {
      f = efficiency_distribution(current, matrix);
      for (std::size_t ti = 0; ti < grid; ++ti) {
        const double h = h_hat_from_samples(f, sol.trace[ti].tau, params.alpha);
        if (h > sol.trace[ti].h_value) {
          sol.trace[ti].h_value = h;
          sol.trace[ti].set = current;
        }
      }
      return;
    }
    self(self, vehicle + 1);
    if (static_cast<int>(current.size()) == m) return;
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < k_count; ++k) {
        current.push_back({vehicle, j, k});
        self(self, vehicle + 1);
        current.pop_back();
      }
    }
  };
  visit(visit, 0);

  pick_best(sol);
  return sol;
}

}  // namespace riskgrid
