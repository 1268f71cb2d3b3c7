#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "codedml/random_stream.hpp"
#include "codedml/worker_model.hpp"

namespace codedml {

enum class LoadScheme { HeteroAsymptotic, MdsUniform };

struct TypeLoad {
  TypeId type;
  double rows = 0.0;  // per worker, per round
};

struct LoadAssignment {
  std::vector<TypeLoad> loads;  // ascending type id
  double total_rows = 0.0;
  LoadScheme scheme = LoadScheme::HeteroAsymptotic;
  std::size_t mds_k = 0;  // recovery threshold under MdsUniform

  std::vector<TypeId> targeted() const;
  std::optional<double> load_of(TypeId id) const;
};

enum class EstimateMethod { Analytic, MonteCarlo };

struct RuntimeEstimate {
  double expected_runtime = 0.0;
  EstimateMethod method = EstimateMethod::Analytic;
  double standard_error = 0.0;
  std::size_t replicates = 0;
  /// (r/k)(a + log(n/(n-k)) / mu); analytic MDS estimates with k < n only.
  std::optional<double> log_approximation;
  /// Per type, probability that one of its workers finishes at rank j
  /// (index j-1) among all participating workers.
  std::map<TypeId, std::vector<double>> finish_order_probs;
  /// Distribution of the number of finishers needed to reach r rows.
  std::map<std::size_t, double> realized_k_distribution;
};

/// Validates a targeted set against the population and returns it sorted.
std::vector<TypeId> normalize_selection(const Population& pop, std::span<const TypeId> targeted);

/// Sum of N_m phi_m over the targeted types.
double effective_throughput(const Population& pop, std::span<const TypeId> targeted);

/// Asymptotically optimal heterogeneous loads r / (lambda_m sum N phi).
LoadAssignment assign_loads_hetero(const Population& pop, std::span<const TypeId> targeted,
                                   double total_rows);

LoadAssignment assign_loads_mds(const Population& pop, std::span<const TypeId> targeted,
                                std::size_t k, double total_rows);

/// r / sum N phi over the targeted types.
RuntimeEstimate expected_runtime_hetero(const Population& pop, std::span<const TypeId> targeted,
                                        double total_rows);

/// Exact k-th order statistic of n shifted exponentials with load r/k.
RuntimeEstimate expected_runtime_mds(std::size_t n, std::size_t k, double total_rows, double mu,
                                     double a);

enum class RowRounding {
  Fractional,        // keep the continuum loads
  LargestRemainder,  // integral rows, at least one per worker
};

/// One participating worker's slot in a round.
struct WorkerSlot {
  TypeId type;
  double rows = 0.0;
};

/// Expands a type-level assignment into per-worker slots, ascending type id.
std::vector<WorkerSlot> expand_workers(const Population& pop, const LoadAssignment& assignment,
                                       RowRounding rounding);

struct RoundDraw {
  std::vector<double> times;        // per slot
  std::vector<std::size_t> order;   // slot indices by finish time, ties by index
  std::size_t realized_k = 0;       // finishers needed to reach r rows
  double runtime = 0.0;             // finish time of the realized_k-th worker
};

/// Samples one round and applies the stop-at-r-rows rule.
RoundDraw draw_round(const Population& pop, std::span<const WorkerSlot> slots, double total_rows,
                     RandomStream& rng);

struct MonteCarloOptions {
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  RowRounding rounding = RowRounding::Fractional;
  unsigned threads = 0;
  bool order_probabilities = true;
};

/// Replicate r's stream is derived from (seed, r), so results are identical
/// for any thread count.
RuntimeEstimate monte_carlo_runtime(const Population& pop, const LoadAssignment& assignment,
                                    const MonteCarloOptions& options);

}  // namespace codedml
