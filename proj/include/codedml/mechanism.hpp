#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "codedml/runtime_engine.hpp"
#include "codedml/worker_model.hpp"

namespace codedml {

struct PlatformConfig {
  double gamma_time = 2000.0;  // valuation on expected runtime
  double gamma_pay = 1.0;      // valuation on payment
  double total_rows = 1000.0;  // r

  /// Solvers need gamma_pay > 0; cost evaluation alone accepts zero.
  void validate(bool allow_zero_pay = false) const;
};

enum class Scenario { CompleteHetero, IncompleteHetero, IncompleteHeteCostOnly };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view text);

struct Mechanism {
  Scenario scenario = Scenario::CompleteHetero;
  std::vector<TypeId> targeted;  // prefix {1..threshold_type}
  TypeId threshold_type;
  std::vector<double> rewards;   // expected reward per round, one per type in id order
  LoadAssignment assignment;
  std::optional<std::size_t> recovery_threshold;  // cost-only scenario
  std::optional<double> alpha;                    // cost-only scenario
  /// Runtime the rewards are priced against; workers evaluate their
  /// expected cost c * announced_runtime.
  double announced_runtime = 0.0;
  double expected_cost = 0.0;

  double reward(TypeId id) const;
  bool targets(TypeId id) const;
  std::size_t participant_count(const Population& pop) const;
};

Mechanism solve_complete(const Population& pop, const PlatformConfig& cfg);
Mechanism solve_incomplete(const Population& pop, const PlatformConfig& cfg);

/// Types must share (speed, startup); the population is then ordered by cost.
Mechanism solve_cost_only(const Population& pop, const PlatformConfig& cfg);
Mechanism solve_cost_only(std::vector<WorkerType> types, const PlatformConfig& cfg);

Mechanism solve(Scenario scenario, const Population& pop, const PlatformConfig& cfg);

struct SubsetChoice {
  std::vector<TypeId> subset;
  double cost = 0.0;
};

/// (gamma_time + gamma_pay sum N c) r / sum N phi for an arbitrary subset.
double complete_information_cost(const Population& pop, std::span<const TypeId> subset,
                                 const PlatformConfig& cfg);

/// Exhaustive search over all nonempty subsets; ties go to the
/// lexicographically smallest subset. Refuses populations above 20 types.
SubsetChoice brute_force_complete(const Population& pop, const PlatformConfig& cfg);

/// A posted-price mechanism with caller-chosen targeted set and rewards.
/// Loads and the announced runtime follow the scenario's runtime model.
Mechanism make_posted_mechanism(const Population& pop, const PlatformConfig& cfg,
                                Scenario scenario, std::vector<TypeId> targeted,
                                std::vector<double> rewards,
                                std::optional<std::size_t> recovery_threshold = std::nullopt);

enum class RuntimeMode {
  Exact,             // harmonic-number order statistics for MDS
  LogApproximation,  // (r/k)(a + log(1/(1 - alpha)) / mu)
};

/// gamma_time E[T] + gamma_pay sum_{m in S} N_m p_m, recomputed from the
/// population rather than taken from the mechanism.
double platform_cost(const Mechanism& mech, const Population& pop, const PlatformConfig& cfg,
                     RuntimeMode mode = RuntimeMode::Exact);

/// Per-rank rewards with expectation p under `order_probs` (rank j at
/// index j-1). Returns the constant schedule.
std::vector<double> order_reward_schedule(double expected_reward,
                                          std::span<const double> order_probs);

}  // namespace codedml
