#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "codedml/numerics.hpp"
#include "codedml/random_stream.hpp"

namespace codedml {

/// 1-based worker-type label. After population construction, id m is the
/// m-th smallest cost-performance ratio.
struct TypeId {
  std::size_t value = 0;

  constexpr TypeId() = default;
  constexpr explicit TypeId(std::size_t v) : value(v) {}
  constexpr std::size_t index() const { return value - 1; }
  static constexpr TypeId from_index(std::size_t i) { return TypeId(i + 1); }

  friend constexpr auto operator<=>(TypeId, TypeId) = default;
};

inline std::ostream& operator<<(std::ostream& os, TypeId id) { return os << id.value; }

struct WorkerType {
  TypeId id;
  double cost_rate = 0.0;  // c: cost per unit time
  double speed = 0.0;      // mu: per-row rate
  double startup = 0.0;    // a: start-up time per row
  std::size_t count = 0;   // N_m

  void validate() const;
};

struct PerformanceProfile {
  double lambda = 0.0;  // time per row
  double phi = 0.0;     // effective throughput mu / (1 + mu lambda)
  double ratio = 0.0;   // cost-performance ratio c / phi
};

struct TypeEntry {
  WorkerType type;
  PerformanceProfile profile;
};

PerformanceProfile derive_profile(const WorkerType& t, const numerics::Tolerance& tol = {});

/// Immutable set of worker types sorted by nondecreasing cost-performance
/// ratio, ids relabeled 1..M in that order.
class Population {
 public:
  std::size_t type_count() const { return entries_.size(); }
  std::size_t total_workers() const { return total_; }

  const TypeEntry& operator[](TypeId id) const;
  std::span<const TypeEntry> entries() const { return entries_; }
  std::vector<TypeId> ids() const;
  bool contains(TypeId id) const { return id.value >= 1 && id.value <= entries_.size(); }

  /// Same types and profiles, new headcounts (one per type, in id order).
  Population with_counts(std::span<const std::size_t> counts) const;

  /// True when every type shares the same (speed, startup).
  bool homogeneous_performance() const;

 private:
  friend Population build_population(std::vector<WorkerType> raw, const numerics::Tolerance& tol);

  std::vector<TypeEntry> entries_;
  std::size_t total_ = 0;
};

/// Derives profiles and sorts by ratio. Ties fall back to cost, speed,
/// startup and count so the result does not depend on input order.
Population build_population(std::vector<WorkerType> raw, const numerics::Tolerance& tol = {});

/// Completion time l (a + E / mu), E unit exponential.
double sample_time(const WorkerType& t, double load, RandomStream& rng);

/// Pr(T <= t) for a worker carrying `load` rows.
double completion_cdf(const WorkerType& t, double load, double time);

/// Largest-remainder apportionment of `total` units proportional to
/// `weights`. Remainder ties go to the lower index.
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights);

/// The bundled ten-type table used by the figure sweeps (counts zero).
std::vector<WorkerType> reference_worker_types();

}  // namespace codedml
