#include "codedml/runtime_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "codedml/errors.hpp"
#include "codedml/numerics.hpp"
#include "codedml/parallel.hpp"

namespace codedml {

namespace {

// Cumulative rows within this relative slack of r count as complete.
constexpr double kRowSlack = 1e-12;

void check_rows(double total_rows) {
  if (!(total_rows > 0.0) || !std::isfinite(total_rows)) {
    throw ConfigError("total rows must be positive");
  }
}

}  // namespace

std::vector<TypeId> LoadAssignment::targeted() const {
  std::vector<TypeId> out;
  out.reserve(loads.size());
  for (const auto& l : loads) out.push_back(l.type);
  return out;
}

std::optional<double> LoadAssignment::load_of(TypeId id) const {
  for (const auto& l : loads) {
    if (l.type == id) return l.rows;
  }
  return std::nullopt;
}

std::vector<TypeId> normalize_selection(const Population& pop, std::span<const TypeId> targeted) {
  if (targeted.empty()) throw ConfigError("invalid selection: targeted set is empty");
  std::vector<TypeId> out(targeted.begin(), targeted.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw ConfigError("invalid selection: duplicate type id");
  }
  for (auto id : out) {
    if (!pop.contains(id)) {
      throw ConfigError("invalid selection: unknown type id " + std::to_string(id.value));
    }
  }
  return out;
}

double effective_throughput(const Population& pop, std::span<const TypeId> targeted) {
  double sum = 0.0;
  for (auto id : normalize_selection(pop, targeted)) {
    const auto& e = pop[id];
    sum += static_cast<double>(e.type.count) * e.profile.phi;
  }
  return sum;
}

LoadAssignment assign_loads_hetero(const Population& pop, std::span<const TypeId> targeted,
                                   double total_rows) {
  check_rows(total_rows);
  const auto ids = normalize_selection(pop, targeted);
  const double throughput = effective_throughput(pop, ids);
  if (!(throughput > 0.0)) throw InfeasibleError("targeted types have no workers");

  LoadAssignment out;
  out.total_rows = total_rows;
  out.scheme = LoadScheme::HeteroAsymptotic;
  for (auto id : ids) {
    out.loads.push_back({id, total_rows / (pop[id].profile.lambda * throughput)});
  }
  return out;
}

LoadAssignment assign_loads_mds(const Population& pop, std::span<const TypeId> targeted,
                                std::size_t k, double total_rows) {
  check_rows(total_rows);
  const auto ids = normalize_selection(pop, targeted);
  std::size_t n = 0;
  for (auto id : ids) n += pop[id].type.count;
  if (k < 1 || k > n) {
    throw DomainError("mds assignment: recovery threshold must lie in [1, " + std::to_string(n) +
                      "]");
  }
  LoadAssignment out;
  out.total_rows = total_rows;
  out.scheme = LoadScheme::MdsUniform;
  out.mds_k = k;
  for (auto id : ids) out.loads.push_back({id, total_rows / static_cast<double>(k)});
  return out;
}

RuntimeEstimate expected_runtime_hetero(const Population& pop, std::span<const TypeId> targeted,
                                        double total_rows) {
  check_rows(total_rows);
  const double throughput = effective_throughput(pop, targeted);
  if (!(throughput > 0.0)) throw InfeasibleError("targeted types have no workers");
  RuntimeEstimate est;
  est.expected_runtime = total_rows / throughput;
  est.method = EstimateMethod::Analytic;
  return est;
}

RuntimeEstimate expected_runtime_mds(std::size_t n, std::size_t k, double total_rows, double mu,
                                     double a) {
  check_rows(total_rows);
  if (k < 1 || k > n) throw DomainError("expected_runtime_mds: need 1 <= k <= n");
  if (!(mu > 0.0)) throw DomainError("expected_runtime_mds: mu must be positive");
  if (!(a >= 0.0)) throw DomainError("expected_runtime_mds: a must be nonnegative");

  const double block = total_rows / static_cast<double>(k);
  RuntimeEstimate est;
  est.method = EstimateMethod::Analytic;
  est.expected_runtime = block * (a + numerics::harmonic_difference(n, n - k) / mu);
  if (k < n) {
    const double ratio = static_cast<double>(n) / static_cast<double>(n - k);
    est.log_approximation = block * (a + std::log(ratio) / mu);
  }
  return est;
}

std::vector<WorkerSlot> expand_workers(const Population& pop, const LoadAssignment& assignment,
                                       RowRounding rounding) {
  std::vector<WorkerSlot> slots;
  for (const auto& l : assignment.loads) {
    const auto& e = pop[l.type];
    if (!(l.rows > 0.0)) throw ConfigError("load assignment: loads must be positive");
    for (std::size_t i = 0; i < e.type.count; ++i) slots.push_back({l.type, l.rows});
  }
  if (rounding == RowRounding::Fractional || slots.empty()) return slots;

  if (assignment.scheme == LoadScheme::MdsUniform) {
    // Each shard carries ceil(r/k) rows after zero-padding r up to a multiple of k.
    for (auto& s : slots) s.rows = std::ceil(s.rows * (1.0 - kRowSlack));
    return slots;
  }

  double total = 0.0;
  std::vector<double> weights;
  weights.reserve(slots.size());
  for (const auto& s : slots) {
    weights.push_back(s.rows);
    total += s.rows;
  }
  const auto units = static_cast<std::size_t>(std::ceil(total * (1.0 - kRowSlack)));
  const auto rows = apportion(units, weights);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    slots[i].rows = static_cast<double>(std::max<std::size_t>(rows[i], 1));
  }
  return slots;
}

RoundDraw draw_round(const Population& pop, std::span<const WorkerSlot> slots, double total_rows,
                     RandomStream& rng) {
  RoundDraw draw;
  draw.times.resize(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    draw.times[i] = sample_time(pop[slots[i].type].type, slots[i].rows, rng);
  }
  draw.order.resize(slots.size());
  std::iota(draw.order.begin(), draw.order.end(), 0);
  std::sort(draw.order.begin(), draw.order.end(), [&](std::size_t l, std::size_t r) {
    return draw.times[l] < draw.times[r] || (draw.times[l] == draw.times[r] && l < r);
  });

  const double needed = total_rows * (1.0 - kRowSlack);
  double rows = 0.0;
  for (std::size_t j = 0; j < draw.order.size(); ++j) {
    rows += slots[draw.order[j]].rows;
    if (rows >= needed) {
      draw.realized_k = j + 1;
      draw.runtime = draw.times[draw.order[j]];
      return draw;
    }
  }
  throw InfeasibleError("assigned rows (" + std::to_string(rows) + ") fall short of r = " +
                        std::to_string(total_rows));
}

RuntimeEstimate monte_carlo_runtime(const Population& pop, const LoadAssignment& assignment,
                                    const MonteCarloOptions& options) {
  if (options.replicates < 1) throw ConfigError("monte carlo: need at least one replicate");
  check_rows(assignment.total_rows);
  const auto slots = expand_workers(pop, assignment, options.rounding);
  double assigned = 0.0;
  for (const auto& s : slots) assigned += s.rows;
  if (assigned < assignment.total_rows * (1.0 - kRowSlack)) {
    throw InfeasibleError("infeasible assignment: rows assigned to participants are below r");
  }

  const std::size_t reps = options.replicates;
  const std::size_t n = slots.size();
  const std::size_t types = pop.type_count();
  std::vector<double> runtimes(reps);
  std::vector<std::size_t> realized(reps);

  // Rank counts are integers, so block-wise accumulation is exact for any
  // partition of the replicates.
  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t blocks = options.order_probabilities ? std::min<std::size_t>(threads, reps) : 0;
  std::vector<std::vector<std::uint64_t>> rank_counts(blocks,
                                                      std::vector<std::uint64_t>(types * n, 0));
  const RandomStream root(options.seed);

  auto run_replicate = [&](std::size_t rep, std::vector<std::uint64_t>* counts) {
    RandomStream rng = root.derive(rep);
    const RoundDraw draw = draw_round(pop, slots, assignment.total_rows, rng);
    runtimes[rep] = draw.runtime;
    realized[rep] = draw.realized_k;
    if (counts) {
      for (std::size_t j = 0; j < n; ++j) {
        (*counts)[slots[draw.order[j]].type.index() * n + j] += 1;
      }
    }
  };

  if (blocks > 0) {
    const std::size_t per_block = (reps + blocks - 1) / blocks;
    parallel_for(blocks, threads, [&](std::size_t b) {
      const std::size_t begin = b * per_block;
      const std::size_t end = std::min(reps, begin + per_block);
      for (std::size_t rep = begin; rep < end; ++rep) run_replicate(rep, &rank_counts[b]);
    });
  } else {
    parallel_for(reps, threads, [&](std::size_t rep) { run_replicate(rep, nullptr); });
  }

  RuntimeEstimate est;
  est.method = EstimateMethod::MonteCarlo;
  est.replicates = reps;
  double sum = 0.0;
  for (double t : runtimes) sum += t;
  est.expected_runtime = sum / static_cast<double>(reps);
  double sq = 0.0;
  for (double t : runtimes) sq += (t - est.expected_runtime) * (t - est.expected_runtime);
  if (reps > 1) {
    est.standard_error = std::sqrt(sq / static_cast<double>(reps - 1) / static_cast<double>(reps));
  }

  std::map<std::size_t, std::size_t> k_counts;
  for (auto k : realized) k_counts[k] += 1;
  for (auto [k, c] : k_counts) {
    est.realized_k_distribution[k] = static_cast<double>(c) / static_cast<double>(reps);
  }

  if (blocks > 0) {
    std::vector<std::uint64_t> total(types * n, 0);
    for (const auto& block : rank_counts) {
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += block[i];
    }
    for (const auto& l : assignment.loads) {
      const double workers = static_cast<double>(pop[l.type].type.count);
      if (workers == 0.0) continue;
      auto& row = est.finish_order_probs[l.type];
      row.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = static_cast<double>(total[l.type.index() * n + j]) /
                 (workers * static_cast<double>(reps));
      }
    }
  }
  return est;
}

}  // namespace codedml
