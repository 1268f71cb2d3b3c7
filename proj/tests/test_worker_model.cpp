#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "codedml/errors.hpp"
#include "codedml/worker_model.hpp"
#include "test_support.hpp"

using namespace codedml;

TEST_CASE("profile follows from the time-per-row root") {
  const WorkerType t{TypeId(1), 3.0, 50.0, 0.02, 4};
  const auto p = derive_profile(t);
  const double lam = oracle::lambda(50.0, 0.02);
  CHECK(p.lambda == doctest::Approx(lam).epsilon(1e-12));
  CHECK(p.phi == doctest::Approx(50.0 / (1.0 + 50.0 * lam)).epsilon(1e-12));
  CHECK(p.ratio == doctest::Approx(3.0 / p.phi).epsilon(1e-12));
}

TEST_CASE("population is sorted by ratio and relabeled") {
  std::vector<WorkerType> raw{{TypeId{}, 9.0, 10.0, 0.1, 2},
                              {TypeId{}, 1.0, 10.0, 0.1, 3},
                              {TypeId{}, 4.0, 10.0, 0.1, 5}};
  const auto pop = build_population(raw);
  REQUIRE(pop.type_count() == 3);
  CHECK(pop.total_workers() == 10);
  CHECK(pop[TypeId(1)].type.cost_rate == 1.0);
  CHECK(pop[TypeId(2)].type.cost_rate == 4.0);
  CHECK(pop[TypeId(3)].type.cost_rate == 9.0);
  for (auto id : pop.ids()) CHECK(pop[id].type.id == id);
  CHECK(pop.homogeneous_performance());
  CHECK_THROWS_AS(pop[TypeId(4)], ConfigError);
  CHECK_FALSE(pop.contains(TypeId(0)));
}

TEST_CASE("population order does not depend on input order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto raw = testgen::hetero_types(rng, 8, 20);
    raw[3] = raw[1];  // exact duplicate
    raw[5] = raw[1];
    raw[5].count += 1;  // same profile, different headcount
    const auto a = build_population(raw);
    std::shuffle(raw.begin(), raw.end(), rng);
    const auto b = build_population(raw);
    for (auto id : a.ids()) {
      CHECK(a[id].type.cost_rate == b[id].type.cost_rate);
      CHECK(a[id].type.speed == b[id].type.speed);
      CHECK(a[id].type.count == b[id].type.count);
    }
    for (std::size_t i = 1; i < a.type_count(); ++i) {
      CHECK(a.entries()[i - 1].profile.ratio <= a.entries()[i].profile.ratio);
    }
  }
}

TEST_CASE("reference table is already in ratio order") {
  const auto raw = reference_worker_types();
  const auto pop = build_population(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(pop.entries()[i].type.cost_rate == raw[i].cost_rate);
    CHECK(pop.entries()[i].type.speed == raw[i].speed);
  }
}

TEST_CASE("invalid worker types are rejected") {
  CHECK_THROWS_AS(build_population({}), ConfigError);
  CHECK_THROWS_AS(build_population({{TypeId{}, -1.0, 10.0, 0.1, 1}}), ConfigError);
  CHECK_THROWS_AS(build_population({{TypeId{}, 1.0, 0.0, 0.1, 1}}), ConfigError);
  CHECK_THROWS_AS(build_population({{TypeId{}, 1.0, 10.0, 0.0, 1}}), ConfigError);
  CHECK_THROWS_AS(build_population({{TypeId{}, 1.0, INFINITY, 0.1, 1}}), ConfigError);
}

TEST_CASE("with_counts keeps the order and updates totals") {
  const auto pop = build_population(reference_worker_types());
  std::vector<std::size_t> counts(10, 7);
  counts[2] = 0;
  const auto p2 = pop.with_counts(counts);
  CHECK(p2.total_workers() == 63);
  CHECK(p2[TypeId(3)].type.count == 0);
  CHECK(p2[TypeId(3)].profile.phi == pop[TypeId(3)].profile.phi);
  std::vector<std::size_t> wrong(9, 1);
  CHECK_THROWS_AS(pop.with_counts(wrong), ConfigError);
}

TEST_CASE("completion times follow the shifted exponential law (KS)") {
  const WorkerType t{TypeId(1), 1.0, 20.0, 0.05, 1};
  const double load = 12.5;
  RandomStream rng(2024);
  const std::size_t n = 20000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_time(t, load, rng);
  std::sort(xs.begin(), xs.end());
  CHECK(xs.front() >= load * t.startup);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = completion_cdf(t, load, xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(f - static_cast<double>(i + 1) / n)});
  }
  // 1.63 / sqrt(n) is the 1% critical value.
  CHECK(d * std::sqrt(static_cast<double>(n)) < 1.63);
  CHECK(completion_cdf(t, load, load * t.startup) == 0.0);
}

TEST_CASE("largest-remainder apportionment") {
  const std::vector<double> equal(3, 1.0);
  CHECK(apportion(7, equal) == std::vector<std::size_t>{3, 2, 2});
  CHECK(apportion(9, equal) == std::vector<std::size_t>{3, 3, 3});
  const std::vector<double> w{0.5, 0.3, 0.2};
  CHECK(apportion(10, w) == std::vector<std::size_t>{5, 3, 2});
  const auto r = apportion(1001, std::vector<double>(10, 0.1));
  std::size_t sum = 0;
  for (auto v : r) sum += v;
  CHECK(sum == 1001);
  CHECK(r[0] == 101);
  CHECK(r[1] == 100);
  const std::vector<double> zeros(2, 0.0);
  CHECK_THROWS_AS(apportion(3, zeros), ConfigError);
}

TEST_CASE("derived random streams are reproducible and distinct") {
  const RandomStream root(42);
  auto a = root.derive(3);
  auto b = root.derive(3);
  auto c = root.derive(4);
  const double x = a.uniform01();
  CHECK(x == b.uniform01());
  CHECK(x != c.uniform01());
  RandomStream d(42, {3});
  CHECK(RandomStream(42, {3}).uniform01() == d.uniform01());
}
