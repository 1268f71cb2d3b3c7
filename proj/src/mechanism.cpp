#include "codedml/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "codedml/errors.hpp"
#include "codedml/numerics.hpp"

namespace codedml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PrefixSums {
  std::vector<double> throughput;  // sum_{m<=n} N_m phi_m
  std::vector<double> cost;        // sum_{m<=n} N_m c_m
  std::vector<double> workers;     // sum_{m<=n} N_m
};

PrefixSums prefix_sums(const Population& pop) {
  PrefixSums s;
  double p = 0.0, q = 0.0, w = 0.0;
  for (const auto& e : pop.entries()) {
    const auto n = static_cast<double>(e.type.count);
    p += n * e.profile.phi;
    q += n * e.type.cost_rate;
    w += n;
    s.throughput.push_back(p);
    s.cost.push_back(q);
    s.workers.push_back(w);
  }
  return s;
}

std::vector<TypeId> prefix(std::size_t n) {
  std::vector<TypeId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(TypeId::from_index(i));
  return out;
}

double payments(const Mechanism& mech, const Population& pop) {
  double total = 0.0;
  for (auto id : mech.targeted) total += static_cast<double>(pop[id].type.count) * mech.reward(id);
  return total;
}

// (r/k)(a + log(1/(1 - alpha)) / mu)
double priced_mds_runtime(double total_rows, std::size_t k, double mu, double a, double alpha) {
  return total_rows / static_cast<double>(k) * (a - std::log1p(-alpha) / mu);
}

void check_mechanism(const Mechanism& mech, const Population& pop, const PlatformConfig& cfg) {
  if (mech.rewards.size() != pop.type_count()) {
    throw ConfigError("mechanism: reward table has " + std::to_string(mech.rewards.size()) +
                      " entries for " + std::to_string(pop.type_count()) + " types");
  }
  normalize_selection(pop, mech.targeted);
  if (std::abs(mech.assignment.total_rows - cfg.total_rows) > 1e-9 * cfg.total_rows) {
    throw ConfigError("mechanism: assignment rows differ from the platform's r");
  }
  if (mech.scenario == Scenario::IncompleteHeteCostOnly && !mech.recovery_threshold) {
    throw ConfigError("mechanism: cost-only scenario needs a recovery threshold");
  }
}

}  // namespace

void PlatformConfig::validate(bool allow_zero_pay) const {
  if (!(gamma_time >= 0.0) || !std::isfinite(gamma_time)) {
    throw ConfigError("platform: gamma_time must be nonnegative");
  }
  const bool pay_ok = allow_zero_pay ? gamma_pay >= 0.0 : gamma_pay > 0.0;
  if (!pay_ok || !std::isfinite(gamma_pay)) {
    throw ConfigError(allow_zero_pay ? "platform: gamma_pay must be nonnegative"
                                     : "platform: gamma_pay must be positive");
  }
  if (!(total_rows > 0.0) || !std::isfinite(total_rows)) {
    throw ConfigError("platform: total_rows must be positive");
  }
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::CompleteHetero: return "complete";
    case Scenario::IncompleteHetero: return "incomplete";
    case Scenario::IncompleteHeteCostOnly: return "cost-only";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "complete") return Scenario::CompleteHetero;
  if (text == "incomplete") return Scenario::IncompleteHetero;
  if (text == "cost-only") return Scenario::IncompleteHeteCostOnly;
  throw ConfigError("unknown scenario '" + std::string(text) +
                    "' (expected complete, incomplete or cost-only)");
}

double Mechanism::reward(TypeId id) const {
  if (id.value < 1 || id.value > rewards.size()) {
    throw ConfigError("mechanism: no reward for type " + std::to_string(id.value));
  }
  return rewards[id.index()];
}

bool Mechanism::targets(TypeId id) const {
  return std::find(targeted.begin(), targeted.end(), id) != targeted.end();
}

std::size_t Mechanism::participant_count(const Population& pop) const {
  std::size_t n = 0;
  for (auto id : targeted) n += pop[id].type.count;
  return n;
}

Mechanism solve_complete(const Population& pop, const PlatformConfig& cfg) {
  cfg.validate();
  const auto sums = prefix_sums(pop);
  const auto entries = pop.entries();

  // Largest n whose ratio stays below the running average cost per unit
  // throughput; the qualifying n form a prefix of the ratio order.
  std::size_t threshold = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double p = sums.throughput[i];
    if (p <= 0.0) {
      threshold = i + 1;
      continue;
    }
    const double bound = (cfg.gamma_time + cfg.gamma_pay * sums.cost[i]) / (cfg.gamma_pay * p);
    if (entries[i].profile.ratio <= bound) threshold = i + 1;
  }
  if (threshold == 0 || sums.throughput[threshold - 1] <= 0.0) {
    throw InfeasibleError("complete information: no targeted type has workers");
  }

  Mechanism mech;
  mech.scenario = Scenario::CompleteHetero;
  mech.targeted = prefix(threshold);
  mech.threshold_type = TypeId(threshold);
  mech.assignment = assign_loads_hetero(pop, mech.targeted, cfg.total_rows);
  mech.announced_runtime = cfg.total_rows / sums.throughput[threshold - 1];
  mech.rewards.assign(pop.type_count(), 0.0);
  for (auto id : mech.targeted) {
    mech.rewards[id.index()] = pop[id].type.cost_rate * mech.announced_runtime;
  }
  mech.expected_cost = cfg.gamma_time * mech.announced_runtime + cfg.gamma_pay * payments(mech, pop);
  return mech;
}

Mechanism solve_incomplete(const Population& pop, const PlatformConfig& cfg) {
  cfg.validate();
  const auto sums = prefix_sums(pop);
  const auto entries = pop.entries();

  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double p = sums.throughput[i];
    if (p <= 0.0) continue;
    const double value = (cfg.gamma_time + cfg.gamma_pay * entries[i].profile.ratio * p) / p;
    if (value < best_value) {
      best_value = value;
      best = i + 1;
    }
  }
  if (best == 0) throw InfeasibleError("incomplete information: no targeted type has workers");

  Mechanism mech;
  mech.scenario = Scenario::IncompleteHetero;
  mech.targeted = prefix(best);
  mech.threshold_type = TypeId(best);
  mech.assignment = assign_loads_hetero(pop, mech.targeted, cfg.total_rows);
  const double throughput = sums.throughput[best - 1];
  mech.announced_runtime = cfg.total_rows / throughput;

  // Every type, targeted or not, is offered the boundary type's reward per
  // unit of effective throughput.
  const auto& boundary = entries[best - 1];
  const double rate = cfg.total_rows * boundary.type.cost_rate / (boundary.profile.phi * throughput);
  mech.rewards.resize(pop.type_count());
  for (std::size_t i = 0; i < entries.size(); ++i) mech.rewards[i] = entries[i].profile.phi * rate;
  mech.expected_cost = cfg.gamma_time * mech.announced_runtime + cfg.gamma_pay * payments(mech, pop);
  return mech;
}

Mechanism solve_cost_only(const Population& pop, const PlatformConfig& cfg) {
  cfg.validate();
  if (!pop.homogeneous_performance()) {
    throw ConfigError("cost-only scenario: all types must share speed and startup");
  }
  const auto sums = prefix_sums(pop);
  const auto entries = pop.entries();

  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double w = sums.workers[i];
    if (w <= 0.0) continue;
    const double value = (cfg.gamma_time + cfg.gamma_pay * entries[i].type.cost_rate * w) / w;
    if (value < best_value) {
      best_value = value;
      best = i + 1;
    }
  }
  if (best == 0) throw InfeasibleError("cost-only: no targeted type has workers");

  const double mu = entries.front().type.speed;
  const double a = entries.front().type.startup;
  const auto n = static_cast<std::size_t>(sums.workers[best - 1]);
  const double alpha = numerics::mds_alpha(mu, a);

  // alpha n is continuous; keep whichever neighbouring integer has the
  // smaller exact order-statistic runtime.
  const double target = alpha * static_cast<double>(n);
  auto clamp_k = [n](double v) {
    return static_cast<std::size_t>(std::clamp(v, 1.0, static_cast<double>(n)));
  };
  const std::size_t k_lo = clamp_k(std::floor(target));
  const std::size_t k_hi = clamp_k(std::ceil(target));
  std::size_t k = k_lo;
  if (k_hi != k_lo) {
    const double t_lo = expected_runtime_mds(n, k_lo, cfg.total_rows, mu, a).expected_runtime;
    const double t_hi = expected_runtime_mds(n, k_hi, cfg.total_rows, mu, a).expected_runtime;
    if (t_hi < t_lo) k = k_hi;
  }

  Mechanism mech;
  mech.scenario = Scenario::IncompleteHeteCostOnly;
  mech.targeted = prefix(best);
  mech.threshold_type = TypeId(best);
  mech.recovery_threshold = k;
  mech.alpha = alpha;
  mech.assignment = assign_loads_mds(pop, mech.targeted, k, cfg.total_rows);
  mech.announced_runtime = priced_mds_runtime(cfg.total_rows, k, mu, a, alpha);
  mech.rewards.assign(pop.type_count(), entries[best - 1].type.cost_rate * mech.announced_runtime);
  mech.expected_cost = platform_cost(mech, pop, cfg);
  return mech;
}

Mechanism solve_cost_only(std::vector<WorkerType> types, const PlatformConfig& cfg) {
  if (types.empty()) throw ConfigError("cost-only scenario: empty type list");
  return solve_cost_only(build_population(std::move(types)), cfg);
}

Mechanism solve(Scenario scenario, const Population& pop, const PlatformConfig& cfg) {
  switch (scenario) {
    case Scenario::CompleteHetero: return solve_complete(pop, cfg);
    case Scenario::IncompleteHetero: return solve_incomplete(pop, cfg);
    case Scenario::IncompleteHeteCostOnly: return solve_cost_only(pop, cfg);
  }
  throw ConfigError("unknown scenario");
}

double complete_information_cost(const Population& pop, std::span<const TypeId> subset,
                                 const PlatformConfig& cfg) {
  double p = 0.0, q = 0.0;
  for (auto id : normalize_selection(pop, subset)) {
    const auto& e = pop[id];
    p += static_cast<double>(e.type.count) * e.profile.phi;
    q += static_cast<double>(e.type.count) * e.type.cost_rate;
  }
  if (p <= 0.0) return kInf;
  return (cfg.gamma_time + cfg.gamma_pay * q) * cfg.total_rows / p;
}

SubsetChoice brute_force_complete(const Population& pop, const PlatformConfig& cfg) {
  cfg.validate();
  const std::size_t m = pop.type_count();
  if (m > 20) throw ConfigError("brute force: refusing to enumerate more than 20 types");
  const auto entries = pop.entries();

  auto members = [m](std::uint32_t mask) {
    std::vector<TypeId> out;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) out.push_back(TypeId::from_index(i));
    }
    return out;
  };

  std::uint32_t best_mask = 0;
  double best_cost = kInf;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    double p = 0.0, q = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(mask & (1u << i))) continue;
      p += static_cast<double>(entries[i].type.count) * entries[i].profile.phi;
      q += static_cast<double>(entries[i].type.count) * entries[i].type.cost_rate;
    }
    if (p <= 0.0) continue;
    const double cost = (cfg.gamma_time + cfg.gamma_pay * q) * cfg.total_rows / p;
    if (cost < best_cost || (cost == best_cost && members(mask) < members(best_mask))) {
      best_cost = cost;
      best_mask = mask;
    }
  }
  if (best_mask == 0) throw InfeasibleError("brute force: every subset is empty of workers");
  return {members(best_mask), best_cost};
}

Mechanism make_posted_mechanism(const Population& pop, const PlatformConfig& cfg,
                                Scenario scenario, std::vector<TypeId> targeted,
                                std::vector<double> rewards,
                                std::optional<std::size_t> recovery_threshold) {
  cfg.validate(true);
  Mechanism mech;
  mech.scenario = scenario;
  mech.targeted = normalize_selection(pop, targeted);
  mech.threshold_type = mech.targeted.back();
  mech.rewards = std::move(rewards);
  if (mech.rewards.size() != pop.type_count()) {
    throw ConfigError("posted mechanism: need one reward per type");
  }
  if (scenario == Scenario::IncompleteHeteCostOnly) {
    if (!pop.homogeneous_performance()) {
      throw ConfigError("cost-only scenario: all types must share speed and startup");
    }
    const auto& first = pop.entries().front().type;
    const double alpha = numerics::mds_alpha(first.speed, first.startup);
    const std::size_t n = mech.participant_count(pop);
    const std::size_t k = recovery_threshold.value_or(std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)))));
    mech.recovery_threshold = k;
    mech.alpha = alpha;
    mech.assignment = assign_loads_mds(pop, mech.targeted, k, cfg.total_rows);
    mech.announced_runtime = priced_mds_runtime(cfg.total_rows, k, first.speed, first.startup, alpha);
  } else {
    mech.assignment = assign_loads_hetero(pop, mech.targeted, cfg.total_rows);
    mech.announced_runtime =
        expected_runtime_hetero(pop, mech.targeted, cfg.total_rows).expected_runtime;
  }
  mech.expected_cost = platform_cost(mech, pop, cfg);
  return mech;
}

double platform_cost(const Mechanism& mech, const Population& pop, const PlatformConfig& cfg,
                     RuntimeMode mode) {
  cfg.validate(true);
  check_mechanism(mech, pop, cfg);

  double runtime = 0.0;
  if (mech.scenario == Scenario::IncompleteHeteCostOnly) {
    if (!pop.homogeneous_performance()) {
      throw ConfigError("cost-only scenario: all types must share speed and startup");
    }
    const auto& first = pop.entries().front().type;
    const std::size_t n = mech.participant_count(pop);
    const std::size_t k = *mech.recovery_threshold;
    if (mode == RuntimeMode::Exact) {
      runtime = expected_runtime_mds(n, k, cfg.total_rows, first.speed, first.startup)
                    .expected_runtime;
    } else {
      const double alpha =
          mech.alpha.value_or(static_cast<double>(k) / static_cast<double>(n));
      runtime = priced_mds_runtime(cfg.total_rows, k, first.speed, first.startup, alpha);
    }
  } else {
    runtime = expected_runtime_hetero(pop, mech.targeted, cfg.total_rows).expected_runtime;
  }
  return cfg.gamma_time * runtime + cfg.gamma_pay * payments(mech, pop);
}

std::vector<double> order_reward_schedule(double expected_reward,
                                          std::span<const double> order_probs) {
  if (order_probs.empty()) throw ConfigError("reward schedule: no ranks");
  double mass = 0.0;
  for (double p : order_probs) {
    if (p < 0.0) throw ConfigError("reward schedule: negative probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw ConfigError("reward schedule: rank probabilities sum to " + std::to_string(mass));
  }
  return std::vector<double>(order_probs.size(), expected_reward);
}

}  // namespace codedml
