#include "codedml/coded_compute.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "codedml/errors.hpp"
#include "codedml/game_verifier.hpp"

namespace codedml {

namespace {

constexpr double kMinRcond = 1e-13;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void check_code_shape(std::size_t n, std::size_t k) {
  if (k < 1 || n < 1) throw DomainError("code: n and k must be positive");
  if (k > n) {
    throw DomainError("code: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
}

}  // namespace

Matrix vandermonde_generator(std::size_t n, std::size_t k) {
  check_code_shape(n, k);
  Matrix g(idx(n), idx(k));
  for (std::size_t i = 0; i < n; ++i) {
    const double node = static_cast<double>(i + 1);
    double p = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      g(idx(i), idx(j)) = p;
      p *= node;
    }
  }
  for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j).normalize();
  return g;
}

Matrix gaussian_generator(std::size_t n, std::size_t k, RandomStream& rng) {
  check_code_shape(n, k);
  Matrix g(idx(n), idx(k));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal();
  }
  return g;
}

CodedTask mds_encode(const Matrix& a, std::size_t n, std::size_t k,
                     const std::optional<Matrix>& generator) {
  check_code_shape(n, k);
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("encode: matrix is empty");
  CodedTask task;
  task.n = n;
  task.k = k;
  task.original_rows = static_cast<std::size_t>(a.rows());
  task.block_rows = (task.original_rows + k - 1) / k;
  if (generator) {
    if (generator->rows() != idx(n) || generator->cols() != idx(k)) {
      throw ConfigError("encode: generator must be " + std::to_string(n) + " x " +
                        std::to_string(k));
    }
    task.generator = *generator;
  } else {
    task.generator = vandermonde_generator(n, k);
  }

  Matrix padded = Matrix::Zero(idx(task.block_rows * k), a.cols());
  padded.topRows(a.rows()) = a;
  const Eigen::Index b = idx(task.block_rows);
  task.shards.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix shard = Matrix::Zero(b, a.cols());
    for (std::size_t j = 0; j < k; ++j) {
      const double w = task.generator(idx(i), idx(j));
      if (w != 0.0) shard += w * padded.middleRows(idx(j) * b, b);
    }
    task.shards.push_back(std::move(shard));
  }
  return task;
}

std::optional<Vector> mds_decode(const CodedTask& task, std::span<const ShardResult> results) {
  std::vector<const ShardResult*> used;
  std::vector<bool> seen(task.n, false);
  for (const auto& r : results) {
    if (r.worker >= task.n) throw ConfigError("decode: worker index out of range");
    if (r.value.size() != idx(task.block_rows)) throw ConfigError("decode: result length mismatch");
    if (seen[r.worker]) continue;
    seen[r.worker] = true;
    used.push_back(&r);
    if (used.size() == task.k) break;
  }
  if (used.size() < task.k) return std::nullopt;

  const Eigen::Index k = idx(task.k);
  const Eigen::Index b = idx(task.block_rows);
  Matrix g(k, k);
  Matrix y(k, b);
  for (Eigen::Index i = 0; i < k; ++i) {
    g.row(i) = task.generator.row(idx(used[static_cast<std::size_t>(i)]->worker));
    y.row(i) = used[static_cast<std::size_t>(i)]->value.transpose();
  }
  Eigen::PartialPivLU<Matrix> lu(g);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    throw NumericalError("decode: generator subset is ill-conditioned (rcond " +
                         std::to_string(rcond) + ")");
  }
  const Matrix blocks = lu.solve(y);  // row j is A_j x
  Vector out(idx(task.original_rows));
  for (std::size_t row = 0; row < task.original_rows; ++row) {
    out(idx(row)) = blocks(idx(row / task.block_rows), idx(row % task.block_rows));
  }
  return out;
}

double subset_condition(const Matrix& generator, std::span<const std::size_t> rows) {
  Matrix sub(idx(rows.size()), generator.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(idx(i)) = generator.row(idx(rows[i]));
  Eigen::JacobiSVD<Matrix> svd(sub);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smallest = s(s.size() - 1);
  return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
}

double worst_subset_condition(const Matrix& generator) {
  const auto n = static_cast<std::size_t>(generator.rows());
  const auto k = static_cast<std::size_t>(generator.cols());
  check_code_shape(n, k);
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  double worst = 0.0;
  while (true) {
    worst = std::max(worst, subset_condition(generator, pick));
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return worst;
}

std::vector<WorkerSlot> round_slots(const Mechanism& mech, const Population& pop) {
  const auto joining = participating_types(mech, pop);
  LoadAssignment active = mech.assignment;
  // Participants without an assigned load receive no rows and stay idle.
  std::erase_if(active.loads, [&](const TypeLoad& l) {
    return std::find(joining.begin(), joining.end(), l.type) == joining.end();
  });
  std::erase_if(active.loads, [&](const TypeLoad& l) { return pop[l.type].type.count == 0; });
  return expand_workers(pop, active, RowRounding::LargestRemainder);
}

namespace {

struct PricedWorker {
  TypeId type;
  double payment = 0.0;
};

std::vector<PricedWorker> price_workers(const Mechanism& mech, const Population& pop,
                                        std::span<const WorkerSlot> slots) {
  std::vector<PricedWorker> out;
  out.reserve(slots.size());
  for (const auto& s : slots) {
    const auto decision = best_response(s.type, mech, pop);
    const TypeId report = decision.reported_type.value_or(s.type);
    // Offered reward for the chosen report, scaled to the worker's own throughput.
    double offer = mech.reward(report);
    if (mech.scenario != Scenario::CompleteHetero) {
      offer *= pop[s.type].profile.phi / pop[report].profile.phi;
    }
    const std::vector<double> flat{1.0};
    out.push_back({s.type, order_reward_schedule(offer, flat).front()});
  }
  return out;
}

}  // namespace

SimOutcome simulate_round_with_times(const Mechanism& mech, const Population& pop,
                                     const PlatformConfig& cfg, const Matrix& a, const Vector& x,
                                     std::span<const double> times, std::uint64_t seed,
                                     const SimOptions& options) {
  cfg.validate(true);
  if (a.rows() != idx(static_cast<std::size_t>(std::llround(cfg.total_rows))) ||
      std::abs(cfg.total_rows - std::round(cfg.total_rows)) > 0.0) {
    throw ConfigError("simulate: A must have r = " + std::to_string(cfg.total_rows) + " rows");
  }
  if (x.size() != a.cols()) throw ConfigError("simulate: x length must equal the columns of A");

  const auto slots = round_slots(mech, pop);
  if (times.size() != slots.size()) {
    throw ConfigError("simulate: expected " + std::to_string(slots.size()) +
                      " completion times, got " + std::to_string(times.size()));
  }
  const std::size_t n = slots.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return times[l] < times[r] || (times[l] == times[r] && l < r);
  });

  SimOutcome out;
  out.worker_types.reserve(n);
  for (const auto& s : slots) out.worker_types.push_back(s.type);
  for (auto w : order) out.finish_order.push_back({w, slots[w].type, times[w]});

  const RandomStream root(seed);
  const Vector ax = a * x;

  if (mech.assignment.scheme == LoadScheme::MdsUniform) {
    const std::size_t k = mech.assignment.mds_k;
    if (n < k) {
      throw InfeasibleError("simulate: " + std::to_string(n) + " participants cannot meet k = " +
                            std::to_string(k));
    }
    std::optional<Matrix> generator = options.generator_override;
    if (!generator && n > options.vandermonde_limit) {
      RandomStream g = root.derive(1);
      generator = gaussian_generator(n, k, g);
    }
    const CodedTask task = mds_encode(a, n, k, generator);
    std::vector<ShardResult> results;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t w = order[j];
      results.push_back({w, task.shards[w] * x});
      out.contributors.push_back(w);
    }
    out.realized_k = k;
    out.runtime = times[order[k - 1]];
    out.decoded = *mds_decode(task, results);
  } else {
    const auto r = static_cast<std::size_t>(a.rows());
    const Eigen::Index cols = idx(r);
    std::vector<Matrix> gens(n);
    for (std::size_t w = 0; w < n; ++w) {
      RandomStream g = root.derive(2).derive(w);
      gens[w].resize(idx(static_cast<std::size_t>(slots[w].rows)), cols);
      for (Eigen::Index i = 0; i < gens[w].rows(); ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) gens[w](i, j) = g.normal();
      }
    }
    Eigen::Index stacked = 0;
    std::size_t j = 0;
    std::size_t first_sufficient = 0;
    bool decoded = false;
    for (; j < n; ++j) {
      stacked += gens[order[j]].rows();
      if (stacked < cols) continue;
      if (first_sufficient == 0) first_sufficient = j + 1;
      Matrix g(stacked, cols);
      Vector y(stacked);
      Eigen::Index at = 0;
      for (std::size_t q = 0; q <= j; ++q) {
        const Matrix& gq = gens[order[q]];
        g.middleRows(at, gq.rows()) = gq;
        y.segment(at, gq.rows()) = gq * ax;
        at += gq.rows();
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(g);
      if (qr.rank() < cols) continue;
      out.decoded = qr.solve(y);
      decoded = true;
      break;
    }
    if (!decoded) {
      throw InfeasibleError("simulate: coded rows of all finishers do not determine A x");
    }
    out.realized_k = j + 1;
    out.rank_extensions = out.realized_k - first_sufficient;
    out.runtime = times[order[j]];
    for (std::size_t q = 0; q <= j; ++q) out.contributors.push_back(order[q]);
  }

  const auto priced = price_workers(mech, pop, slots);
  double paid = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    out.payments.push_back(priced[w].payment);
    out.worker_payoffs.push_back(priced[w].payment -
                                 pop[slots[w].type].type.cost_rate * out.runtime);
    paid += priced[w].payment;
  }
  out.platform_cost_realized = cfg.gamma_time * out.runtime + cfg.gamma_pay * paid;
  return out;
}

SimOutcome simulate_round(const Mechanism& mech, const Population& pop, const PlatformConfig& cfg,
                          const Matrix& a, const Vector& x, std::uint64_t seed,
                          const SimOptions& options) {
  const auto slots = round_slots(mech, pop);
  RandomStream rng = RandomStream(seed).derive(0);
  std::vector<double> times(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    times[i] = sample_time(pop[slots[i].type].type, slots[i].rows, rng);
  }
  return simulate_round_with_times(mech, pop, cfg, a, x, times, seed, options);
}

Matrix read_matrix(std::istream& in) {
  long long rows = 0;
  long long cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw ConfigError("matrix text: expected a positive 'rows cols' header");
  }
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) {
        throw ConfigError("matrix text: missing or invalid value at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
    }
  }
  return m;
}

Vector read_vector(std::istream& in) {
  const Matrix m = read_matrix(in);
  if (m.cols() != 1 && m.rows() != 1) throw ConfigError("vector text: expected one row or column");
  return m.reshaped();
}

void write_matrix(std::ostream& out, const Matrix& m) {
  const auto old = out.precision(17);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace codedml
