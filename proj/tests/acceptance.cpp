// Acceptance suite: one PASS/FAIL line per criterion at its stated tolerance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "codedml/coded_compute.hpp"
#include "codedml/errors.hpp"
#include "codedml/experiments.hpp"
#include "codedml/game_verifier.hpp"
#include "codedml/mechanism.hpp"
#include "codedml/numerics.hpp"
#include "codedml/runtime_engine.hpp"
#include "test_support.hpp"

using namespace codedml;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::function<Verdict()> run;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

PlatformConfig random_platform(std::mt19937_64& rng) {
  return {testgen::uniform(rng, 1.0, 1e4), testgen::uniform(rng, 0.1, 10.0), 1000.0};
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(1001);
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = testgen::uniform_int(rng, 2, 12);
    const auto pop = build_population(testgen::hetero_types(rng, m));
    const auto cfg = random_platform(rng);
    if (solve_complete(pop, cfg).targeted != brute_force_complete(pop, cfg).subset) ++mismatches;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {mismatches == 0 && secs < 60.0,
          std::to_string(mismatches) + " mismatches in 1000 instances, " + fmt(secs, 3) + " s"};
}

Verdict ir_ic_compliance() {
  std::mt19937_64 rng(1002);
  std::size_t violations = 0, checks = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = testgen::uniform_int(rng, 2, 12);
    const auto pop = build_population(testgen::hetero_types(rng, m));
    const auto cfg = random_platform(rng);
    const auto co = build_population(testgen::cost_only_types(rng, m, 500));
    const std::vector<std::pair<Mechanism, const Population*>> cases{
        {solve_complete(pop, cfg), &pop},
        {solve_incomplete(pop, cfg), &pop},
        {solve_cost_only(co, cfg), &co}};
    for (const auto& [mech, p] : cases) {
      const auto rep = verify_ir_ic(mech, *p);
      checks += rep.ir_checks + rep.ic_checks + rep.ic_checks_all_types;
      violations += rep.ir_violations.size() + rep.ic_violations.size() +
                    rep.ic_violations_all_types.size() + rep.unintended_participants.size();
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " +
                               std::to_string(checks) + " checks (3000 mechanisms)"};
}

Verdict order_statistic_runtime() {
  bool ok = true;
  std::string detail;
  const double r = 1000.0, mu = 5.0, a = 0.02;
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{5, 3}, {10, 7}, {50, 25}, {100, 60}}) {
    const auto pop = build_population({{TypeId{}, 1.0, mu, a, n}});
    const auto as = assign_loads_mds(pop, std::vector<TypeId>{TypeId(1)}, k, r);
    MonteCarloOptions opt;
    opt.replicates = 100000;
    opt.seed = 3000 + n;
    opt.order_probabilities = false;
    const auto mc = monte_carlo_runtime(pop, as, opt);
    const double exact = oracle::mds_runtime(n, k, r, mu, a);
    const double z = (mc.expected_runtime - exact) / mc.standard_error;
    ok = ok && std::abs(z) <= 3.0;
    detail += "(" + std::to_string(n) + "," + std::to_string(k) + ") z=" + fmt(z, 3) + " ";
  }
  return {ok, detail};
}

Verdict asymptotic_runtime() {
  const auto base = build_population(reference_worker_types());
  const auto pop = base.with_counts(std::vector<std::size_t>(10, 500));
  bool ok = true;
  std::string detail;
  const PlatformConfig cfg;
  const std::vector<std::pair<std::string, std::vector<TypeId>>> sets{
      {"all types", pop.ids()}, {"complete-information set", solve_complete(pop, cfg).targeted}};
  for (const auto& [label, sel] : sets) {
    const auto as = assign_loads_hetero(pop, sel, cfg.total_rows);
    MonteCarloOptions opt;
    opt.replicates = 10000;
    opt.seed = 4000;
    opt.order_probabilities = false;
    const auto mc = monte_carlo_runtime(pop, as, opt);
    const double analytic = expected_runtime_hetero(pop, sel, cfg.total_rows).expected_runtime;
    const double rel = std::abs(mc.expected_runtime / analytic - 1.0);
    ok = ok && rel <= 0.02;
    detail += label + ": rel err " + fmt(100.0 * rel, 3) + "%; ";
  }
  return {ok, detail};
}

Verdict fig4_anchor() {
  const auto table = run_fig4(default_spec(ExperimentKind::Fig4));
  const auto nc = table.column("n_complete"), ni = table.column("n_incomplete");
  bool anchor = false;
  std::string near;
  bool monotone = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row[0] >= 1300 && row[0] <= 1500) {
      near += "N=" + fmt(row[0]) + ":" + fmt(row[nc]) + "/" + fmt(row[ni]) + " ";
      anchor = anchor || (row[nc] == 3 && row[ni] == 4);
    }
    if (i > 0) {
      monotone = monotone && row[nc] <= table.rows[i - 1][nc] && row[ni] <= table.rows[i - 1][ni];
    }
  }
  return {anchor && monotone, "complete/incomplete " + near +
                                  (monotone ? "; both nonincreasing" : "; NOT nonincreasing")};
}

Verdict fig5_anchors() {
  const auto table = run_fig5(default_spec(ExperimentKind::Fig5));
  const auto gi = table.column("gap"), ci = table.column("cost_incomplete");
  const auto& rows = table.rows;
  auto zero = [&](const std::vector<double>& row) { return std::abs(row[gi]) <= 1e-9 * row[ci]; };

  bool nonnegative = true;
  for (const auto& row : rows) nonnegative = nonnegative && row[gi] >= -1e-9 * row[ci];

  std::size_t first_zero_tail = rows.size();
  while (first_zero_tail > 0 && zero(rows[first_zero_tail - 1])) --first_zero_tail;
  const bool tail = first_zero_tail < rows.size();
  const double threshold = tail ? rows[first_zero_tail][0] : 0.0;
  const bool threshold_ok = tail && threshold >= 3000 && threshold <= 4000;

  double largest_rise = -std::numeric_limits<double>::infinity();
  double rise_at = 0.0;
  bool rises = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = rows[i][gi] - rows[i - 1][gi];
    if (d > largest_rise) {
      largest_rise = d;
      rise_at = rows[i][0];
    }
    rises = rises || d > 1e-9 * rows[i][ci];
  }
  std::string detail = std::string("gap >= 0: ") + (nonnegative ? "yes" : "no") +
                       "; zero from N=" + fmt(threshold) + (threshold_ok ? " (in range)" : " (OUT of range)") +
                       "; largest step change " + fmt(largest_rise, 3) + " at N=" + fmt(rise_at) +
                       (rises ? " (non-monotone)" : " (gap is monotone nonincreasing)");
  return {nonnegative && threshold_ok && rises, detail};
}

Verdict fig7_anchor() {
  auto spec = default_spec(ExperimentKind::Fig7);
  spec.replications = 200;
  const auto table = run_fig7(spec);
  const auto mi = table.column("mean_gap"), si = table.column("stderr_gap");
  std::size_t checked = 0, outside = 0;
  double worst_z = 0.0, worst_n = 0.0;
  for (const auto& row : table.rows) {
    if (row[0] <= 400) continue;
    ++checked;
    const double mean = row[mi], se = row[si];
    const bool ok = se > 0.0 ? std::abs(mean) <= 2.0 * se : std::abs(mean) <= 1e-9;
    if (!ok) ++outside;
    const double z = se > 0.0 ? std::abs(mean) / se : (mean == 0.0 ? 0.0 : INFINITY);
    if (z > worst_z) {
      worst_z = z;
      worst_n = row[0];
    }
  }
  return {outside == 0, std::to_string(outside) + " of " + std::to_string(checked) +
                            " points with N > 400 outside 2 stderr; worst |mean|/stderr " +
                            fmt(worst_z, 3) + " at N=" + fmt(worst_n)};
}

Verdict mds_decode_correctness() {
  Matrix a(4, 3);
  a << 1, 2, 0, 0, 1, 3, 2, 0, 1, 1, 1, 1;
  Vector x(3);
  x << 1, -1, 2;
  Matrix g(3, 2);
  g << 1, 0, 0, 1, 1, 1;
  const auto fig = mds_encode(a, 3, 2, g);
  const Vector y2 = fig.shards[1] * x, y3 = fig.shards[2] * x;
  const std::vector<ShardResult> two{{1, y2}, {2, y3}};
  Vector expect(4);
  expect << y3 - y2, y2;
  const Vector y = *mds_decode(fig, two);
  const bool exact = y == expect && y == a * x;

  std::mt19937_64 rng(8008);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  std::size_t subsets = 0;
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{5, 3}, {8, 5}, {12, 8}}) {
    Matrix m(24, 6);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    Vector v(6);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
    const auto task = mds_encode(m, n, k);
    const Vector truth = m * v;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::vector<ShardResult> res;
      for (auto w : pick) res.push_back({w, task.shards[w] * v});
      worst = std::max(worst, (*mds_decode(task, res) - truth).cwiseAbs().maxCoeff());
      ++subsets;
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return {exact && worst <= 1e-6, std::string("two-of-three exact: ") + (exact ? "yes" : "no") +
                                      "; max error over " + std::to_string(subsets) +
                                      " subsets " + fmt(worst, 3)};
}

Verdict k_star_optimality() {
  std::mt19937_64 rng(9009);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto m = testgen::uniform_int(rng, 1, 8);
    const auto pop = build_population(testgen::cost_only_types(rng, m, 500));
    const auto cfg = random_platform(rng);
    const auto mech = solve_cost_only(pop, cfg);
    const std::size_t n = mech.participant_count(pop);
    const double c_n = pop[mech.threshold_type].type.cost_rate;
    const auto& t = pop.entries().front().type;
    auto cost = [&](std::size_t k) {
      return (cfg.gamma_time + cfg.gamma_pay * static_cast<double>(n) * c_n) *
             oracle::mds_runtime(n, k, cfg.total_rows, t.speed, t.startup);
    };
    double grid = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n; ++k) grid = std::min(grid, cost(k));
    worst = std::max(worst, cost(*mech.recovery_threshold) / grid - 1.0);
  }
  return {worst <= 0.005, "worst excess over the grid minimum " + fmt(100.0 * worst, 3) + "%"};
}

Verdict weight_monotonicity() {
  std::mt19937_64 rng(10010);
  std::size_t violations = 0, comparisons = 0;
  for (int p = 0; p < 50; ++p) {
    const auto m = testgen::uniform_int(rng, 2, 12);
    const auto pop = build_population(testgen::hetero_types(rng, m));
    for (int variant = 0; variant < 2; ++variant) {
      std::size_t grid[20][20];
      for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
          const PlatformConfig cfg{std::pow(10.0, 5.0 * i / 19.0), std::pow(10.0, -1.0 + 2.0 * j / 19.0),
                                   1000.0};
          grid[i][j] = (variant == 0 ? solve_complete(pop, cfg) : solve_incomplete(pop, cfg))
                           .threshold_type.value;
        }
      }
      for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
          if (i > 0) {
            ++comparisons;
            if (grid[i][j] < grid[i - 1][j]) ++violations;
          }
          if (j > 0) {
            ++comparisons;
            if (grid[i][j] > grid[i][j - 1]) ++violations;
          }
        }
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " +
                               std::to_string(comparisons) +
                               " neighbour comparisons (complete and incomplete)"};
}

Verdict special_functions() {
  std::mt19937_64 rng(11011);
  double worst_lambda = 0.0, worst_w = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double mu = testgen::log_uniform(rng, 1e-2, 1e4);
    const double a = testgen::log_uniform(rng, 1e-5, 10.0);
    const double ref = oracle::lambda(mu, a);
    worst_lambda = std::max(worst_lambda, std::abs(numerics::solve_lambda(mu, a) / ref - 1.0));

    const double x = i % 2 == 0 ? -testgen::uniform(rng, 1e-300, std::exp(-1.0))
                                : -std::exp(-1.0 - testgen::log_uniform(rng, 1e-12, 700.0));
    const double wref = oracle::lambert_wm1(x);
    worst_w = std::max(worst_w, std::abs(numerics::lambert_w_minus1(x) / wref - 1.0));
  }
  return {worst_lambda <= 1e-9 && worst_w <= 1e-9,
          "max rel err lambda " + fmt(worst_lambda, 3) + ", W_-1 " + fmt(worst_w, 3)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "complete-information selection equals brute force", oracle_equivalence},
      {2, "IR and IC hold for every solver output", ir_ic_compliance},
      {3, "k-th order statistic runtime", order_statistic_runtime},
      {4, "asymptotic heterogeneous runtime", asymptotic_runtime},
      {5, "targeted types versus N (3 complete / 4 incomplete near N=1400)", fig4_anchor},
      {6, "information cost gap versus N", fig5_anchors},
      {7, "strongly incomplete information gap vanishes for N > 400", fig7_anchor},
      {8, "MDS decoding", mds_decode_correctness},
      {9, "integer recovery threshold optimality", k_star_optimality},
      {10, "threshold type monotone in platform weights", weight_monotonicity},
      {11, "special functions versus bisection oracles", special_functions},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title
              << " | " << v.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
