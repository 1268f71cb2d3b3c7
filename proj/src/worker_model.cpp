#include "codedml/worker_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "codedml/errors.hpp"

namespace codedml {

void WorkerType::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(cost_rate)) throw ConfigError("worker type: cost rate must be positive");
  if (!positive(speed)) throw ConfigError("worker type: speed must be positive");
  if (!positive(startup)) throw ConfigError("worker type: startup must be positive");
}

PerformanceProfile derive_profile(const WorkerType& t, const numerics::Tolerance& tol) {
  t.validate();
  PerformanceProfile p;
  p.lambda = numerics::solve_lambda(t.speed, t.startup, tol);
  p.phi = t.speed / (1.0 + t.speed * p.lambda);
  p.ratio = t.cost_rate / p.phi;
  return p;
}

const TypeEntry& Population::operator[](TypeId id) const {
  if (!contains(id)) throw ConfigError("population: unknown type id " + std::to_string(id.value));
  return entries_[id.index()];
}

std::vector<TypeId> Population::ids() const {
  std::vector<TypeId> out;
  out.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) out.push_back(TypeId::from_index(i));
  return out;
}

Population Population::with_counts(std::span<const std::size_t> counts) const {
  if (counts.size() != entries_.size()) {
    throw ConfigError("population: expected " + std::to_string(entries_.size()) + " counts, got " +
                      std::to_string(counts.size()));
  }
  Population out = *this;
  out.total_ = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.entries_[i].type.count = counts[i];
    out.total_ += counts[i];
  }
  return out;
}

bool Population::homogeneous_performance() const {
  return std::all_of(entries_.begin(), entries_.end(), [&](const TypeEntry& e) {
    return e.type.speed == entries_.front().type.speed &&
           e.type.startup == entries_.front().type.startup;
  });
}

Population build_population(std::vector<WorkerType> raw, const numerics::Tolerance& tol) {
  if (raw.empty()) throw ConfigError("population: at least one worker type is required");
  Population pop;
  pop.entries_.reserve(raw.size());
  for (auto& t : raw) pop.entries_.push_back({t, derive_profile(t, tol)});

  auto key = [](const TypeEntry& e) {
    return std::make_tuple(e.profile.ratio, e.type.cost_rate, e.type.speed, e.type.startup,
                           e.type.count);
  };
  std::stable_sort(pop.entries_.begin(), pop.entries_.end(),
                   [&](const TypeEntry& l, const TypeEntry& r) { return key(l) < key(r); });
  for (std::size_t i = 0; i < pop.entries_.size(); ++i) {
    pop.entries_[i].type.id = TypeId::from_index(i);
    pop.total_ += pop.entries_[i].type.count;
  }
  return pop;
}

double sample_time(const WorkerType& t, double load, RandomStream& rng) {
  return load * (t.startup + rng.exponential() / t.speed);
}

double completion_cdf(const WorkerType& t, double load, double time) {
  const double shifted = time / load - t.startup;
  if (shifted <= 0.0) return 0.0;
  return -std::expm1(-t.speed * shifted);
}

std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
  if (weights.empty()) throw ConfigError("apportion: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("apportion: weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ConfigError("apportion: weights sum to zero");

  std::vector<std::size_t> out(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return remainder[l] > remainder[r]; });
  for (std::size_t j = 0; assigned < total; ++j, ++assigned) out[order[j % order.size()]] += 1;
  return out;
}

std::vector<WorkerType> reference_worker_types() {
  // (c, mu, a) per type, already in increasing cost-performance order.
  constexpr double table[10][3] = {
      {1, 50, 0.012},  {7, 100, 0.024}, {8, 200, 0.033},  {3, 10, 0.031},  {16, 400, 0.040},
      {5, 20, 0.081},  {21, 800, 0.044}, {9, 40, 0.123},  {12, 80, 0.153}, {20, 160, 0.172},
  };
  std::vector<WorkerType> out;
  for (std::size_t i = 0; i < 10; ++i) {
    out.push_back({TypeId::from_index(i), table[i][0], table[i][1], table[i][2], 0});
  }
  return out;
}

}  // namespace codedml
