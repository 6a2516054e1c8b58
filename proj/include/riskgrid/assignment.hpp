#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "riskgrid/efficiency.hpp"

namespace riskgrid {

/// Risk level alpha and the tau grid {0, delta, 2*delta, ..., ceil(gamma/delta)*delta}.
struct RiskParams {
  double alpha = 1.0;
  double gamma = 1.0;
  double delta = 0.05;

  /// Throws InvalidSpec unless 0 < alpha <= 1 and 0 < delta <= gamma.
  void validate() const;
  std::size_t grid_points() const;
  double tau(std::size_t index) const { return static_cast<double>(index) * delta; }
};

/// Fills unset gamma with M / (smallest realized path cost), i.e. M times the
/// largest sampled efficiency (an upper bound on f), and unset delta with
/// gamma / 20.
RiskParams default_risk_params(const EfficiencyMatrix& matrix, double alpha,
                               std::optional<double> gamma = std::nullopt,
                               std::optional<double> delta = std::nullopt);

using TupleSet = std::vector<TupleIndex>;

/// f(S, y_d): sum over demands of the best efficiency among the tuples of S
/// serving that demand in draw d. Unserved demands add 0.
double total_efficiency(std::span<const TupleIndex> set, const EfficiencyMatrix& matrix, int draw);

/// f(S, y_d) for every draw d.
std::vector<double> efficiency_distribution(std::span<const TupleIndex> set,
                                            const EfficiencyMatrix& matrix);

/// Number of samples averaged by cvar_empirical: ceil(alpha * n), at least 1.
std::size_t cvar_tail_size(std::size_t n, double alpha);

/// Mean of the ceil(alpha * n) smallest samples (left tail of a reward).
double cvar_empirical(std::span<const double> samples, double alpha);

/// tau - 1/(alpha * D) * sum_d max(tau - f_d, 0).
double h_hat_from_samples(std::span<const double> f, double tau, double alpha);
double h_hat(std::span<const TupleIndex> set, double tau, const EfficiencyMatrix& matrix,
             double alpha);

/// One greedy round: the tuple added and its marginal gain in H-hat.
struct GreedyRound {
  TupleIndex chosen;
  double gain = 0.0;
};

/// The set kept for one grid value of tau.
struct TauCandidate {
  double tau = 0.0;
  TupleSet set;
  double h_value = 0.0;
  std::vector<GreedyRound> rounds;  // empty for the exhaustive solver
};

struct AssignmentSolution {
  RiskParams params;
  TupleSet selected;
  std::size_t tau_index = 0;
  double tau_star = 0.0;
  double h_value = 0.0;
  /// One entry per grid point, in grid order.
  std::vector<TauCandidate> trace;

  /// (tau index, round) pairs whose chosen gain was <= 0.
  std::vector<std::pair<std::size_t, std::size_t>> non_positive_gain_rounds() const;
};

/**
 * Sequential greedy risk-aware assignment.
 *
 * For every grid tau, runs |D| greedy rounds; each round adds the tuple with
 * the largest marginal gain in H-hat(., tau) among vehicles not yet used
 * (ties: lexicographically smallest tuple) and then retires that vehicle. A
 * round that finds no unused vehicle adds nothing. Returns the (set, tau)
 * pair with the largest H-hat (ties: smallest tau).
 */
AssignmentSolution sga_assign(const EfficiencyMatrix& matrix, const RiskParams& params);

/// Number of partition-feasible sets with at most M tuples, saturating at
/// UINT64_MAX.
std::uint64_t feasible_subset_count(int num_vehicles, int num_demands, int num_paths);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Exhaustive maximizer of H-hat over every partition-feasible set with at
/// most M tuples and every grid tau, with the same draws and tie rules as
/// sga_assign. trace[i] holds the best set for tau index i. Throws
/// InstanceTooLarge above `limit` sets.
AssignmentSolution brute_force_assign(const EfficiencyMatrix& matrix, const RiskParams& params,
                                      std::uint64_t limit = kBruteForceLimit);

}  // namespace riskgrid
