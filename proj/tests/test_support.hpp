#pragma once

// Oracles for the tests. Plain long-double bisection and brute-force
// enumeration; nothing here calls the library's numerics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "codedml/mechanism.hpp"
#include "codedml/worker_model.hpp"

namespace oracle {

/// Bisection on a sign change of f over [lo, hi] until the bracket stops shrinking.
template <class F>
long double bisect(F f, long double lo, long double hi) {
  long double flo = f(lo);
  for (int i = 0; i < 400; ++i) {
    const long double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    const long double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

/// Root lambda > a of exp(mu (lambda - a)) = mu lambda + 1, by bisection in
/// the offset d = lambda - a using log form: mu d = log(mu (a + d) + 1).
inline double lambda(double mu, double a) {
  const long double m = mu, s = a;
  auto g = [&](long double d) { return m * d - std::log1p(m * (s + d)); };
  long double hi = 1.0L / m;
  while (g(hi) <= 0) hi *= 2;
  // g < 0 just above 0 because log1p(mu a) > 0.
  return static_cast<double>(s + bisect(g, 0.0L, hi));
}

/// Lower real branch of Lambert W for x in [-1/e, 0): solves w + log(-w) = log(-x), w <= -1.
inline double lambert_wm1(double x) {
  const long double target = std::log(-static_cast<long double>(x));
  auto g = [&](long double w) { return w + std::log(-w) - target; };
  long double lo = -2;
  while (g(lo) > 0) lo *= 2;
  return static_cast<double>(bisect(g, lo, -1.0L));
}

inline long double harmonic(std::size_t n) {
  long double h = 0;
  for (std::size_t i = 1; i <= n; ++i) h += 1.0L / static_cast<long double>(i);
  return h;
}

/// E of the k-th smallest of n iid shifted exponentials with load r/k.
inline double mds_runtime(std::size_t n, std::size_t k, double r, double mu, double a) {
  const long double h = harmonic(n) - harmonic(n - k);
  return static_cast<double>(r / static_cast<long double>(k) * (a + h / mu));
}

/// Platform cost of a subset under complete information, from the
/// definitions: runtime r / sum N phi and rewards c * runtime.
inline double complete_cost(const codedml::Population& pop, std::uint32_t mask,
                            const codedml::PlatformConfig& cfg) {
  long double p = 0, q = 0;
  for (std::size_t i = 0; i < pop.type_count(); ++i) {
    if (!(mask >> i & 1u)) continue;
    const auto& e = pop.entries()[i];
    const long double lam = lambda(e.type.speed, e.type.startup);
    const long double phi = e.type.speed / (1 + e.type.speed * lam);
    p += e.type.count * phi;
    q += e.type.count * e.type.cost_rate;
  }
  if (p <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>((cfg.gamma_time + cfg.gamma_pay * q) * cfg.total_rows / p);
}

}  // namespace oracle

namespace testgen {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random heterogeneous population in the neighbourhood of the reference table.
inline std::vector<codedml::WorkerType> hetero_types(std::mt19937_64& rng, std::size_t m,
                                                     std::size_t max_count = 500) {
  std::vector<codedml::WorkerType> out;
  for (std::size_t i = 0; i < m; ++i) {
    codedml::WorkerType t;
    t.cost_rate = uniform(rng, 0.5, 25.0);
    t.speed = log_uniform(rng, 5.0, 1000.0);
    t.startup = uniform(rng, 0.005, 0.2);
    t.count = uniform_int(rng, 1, max_count);
    out.push_back(t);
  }
  return out;
}

/// Types sharing (mu, a), differing in cost; total workers at most max_total.
inline std::vector<codedml::WorkerType> cost_only_types(std::mt19937_64& rng, std::size_t m,
                                                        std::size_t max_total) {
  const double mu = log_uniform(rng, 1.0, 500.0);
  const double a = log_uniform(rng, 0.001, 0.5);
  std::vector<codedml::WorkerType> out;
  std::size_t budget = max_total;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t left = m - i;
    const std::size_t cap = budget - (left - 1);
    const std::size_t share = std::max<std::size_t>(1, 2 * cap / left);
    const std::size_t count = uniform_int(rng, 1, std::min(cap, share));
    budget -= count;
    out.push_back({codedml::TypeId{}, uniform(rng, 0.5, 25.0), mu, a, count});
  }
  return out;
}

}  // namespace testgen
