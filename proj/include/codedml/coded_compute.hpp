#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "codedml/mechanism.hpp"
#include "codedml/random_stream.hpp"
#include "codedml/worker_model.hpp"

namespace codedml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x k real Vandermonde matrix on nodes 1..n, each column scaled to unit
/// 2-norm. Every k x k row subset is invertible.
Matrix vandermonde_generator(std::size_t n, std::size_t k);

/// n x k matrix of independent standard normals; MDS with probability one.
Matrix gaussian_generator(std::size_t n, std::size_t k, RandomStream& rng);

struct CodedTask {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t original_rows = 0;  // rows of A before zero padding
  std::size_t block_rows = 0;     // rows per split and per shard
  Matrix generator;               // n x k
  std::vector<Matrix> shards;     // shard i = sum_j generator(i, j) A_j
};

/// Pads A with zero rows to a multiple of k, splits it into k blocks and
/// encodes n shards. Uses the Vandermonde generator unless one is supplied.
CodedTask mds_encode(const Matrix& a, std::size_t n, std::size_t k,
                     const std::optional<Matrix>& generator = std::nullopt);

struct ShardResult {
  std::size_t worker = 0;  // shard index, 0-based
  Vector value;            // shard * x
};

/// Decodes A x from the first k distinct workers in `results` (finish
/// order). Returns nullopt while fewer than k results are available.
std::optional<Vector> mds_decode(const CodedTask& task, std::span<const ShardResult> results);

/// 2-norm condition number of the generator rows in `rows`.
double subset_condition(const Matrix& generator, std::span<const std::size_t> rows);

/// Largest subset_condition over all k-row subsets.
double worst_subset_condition(const Matrix& generator);

struct FinishEvent {
  std::size_t worker = 0;
  TypeId type;
  double time = 0.0;
};

struct SimOutcome {
  double runtime = 0.0;
  std::vector<FinishEvent> finish_order;   // every instantiated worker, by time
  std::vector<std::size_t> contributors;   // workers whose results were decoded
  std::size_t realized_k = 0;
  Vector decoded;
  std::vector<TypeId> worker_types;        // per instantiated worker
  std::vector<double> payments;            // per instantiated worker
  std::vector<double> worker_payoffs;      // payment - c * runtime
  double platform_cost_realized = 0.0;     // gamma_time runtime + gamma_pay sum payments
  /// Extra finishers waited for because the first r coded rows were rank deficient.
  std::size_t rank_extensions = 0;
};

struct SimOptions {
  /// Replaces the MDS generator (must be n x k for the realized n).
  std::optional<Matrix> generator_override;
  /// Largest n encoded with the Vandermonde generator; beyond it a Gaussian
  /// generator is drawn.
  std::size_t vandermonde_limit = 32;
};

/// Workers of every type whose best response is to participate are
/// instantiated with the mechanism's loads (integral rows), timed, decoded
/// after the stop rule and paid.
SimOutcome simulate_round(const Mechanism& mech, const Population& pop, const PlatformConfig& cfg,
                          const Matrix& a, const Vector& x, std::uint64_t seed,
                          const SimOptions& options = {});

/// Same as simulate_round with caller-supplied completion times, one per
/// instantiated worker in ascending type order.
SimOutcome simulate_round_with_times(const Mechanism& mech, const Population& pop,
                                     const PlatformConfig& cfg, const Matrix& a, const Vector& x,
                                     std::span<const double> times, std::uint64_t seed,
                                     const SimOptions& options = {});

/// Per-worker slots simulate_round instantiates for this mechanism.
std::vector<WorkerSlot> round_slots(const Mechanism& mech, const Population& pop);

/// Plain dense text: "rows cols" then row-major values.
Matrix read_matrix(std::istream& in);
Vector read_vector(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);

}  // namespace codedml
