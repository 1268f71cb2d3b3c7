#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "codedml/coded_compute.hpp"
#include "codedml/errors.hpp"
#include "codedml/experiments.hpp"
#include "codedml/game_verifier.hpp"
#include "codedml/mechanism.hpp"

namespace {

using namespace codedml;

struct PopulationArgs {
  std::string source = "reference";
  std::optional<std::size_t> workers;
};

struct PlatformArgs {
  double gamma_time = 2000.0;
  double gamma_pay = 1.0;
  double rows = 1000.0;

  PlatformConfig config() const { return {gamma_time, gamma_pay, rows}; }
};

void add_population_options(CLI::App& cmd, PopulationArgs& p) {
  cmd.add_option("--population", p.source,
                 "Worker-type table (c mu a count per line) or 'reference'")
      ->capture_default_str();
  cmd.add_option("-N,--workers", p.workers,
                 "Total workers, apportioned by the table's counts (equally if all zero)");
}

void add_platform_options(CLI::App& cmd, PlatformArgs& p) {
  cmd.add_option("--gamma-time", p.gamma_time, "Platform valuation on runtime")->capture_default_str();
  cmd.add_option("--gamma-pay", p.gamma_pay, "Platform valuation on payment")->capture_default_str();
  cmd.add_option("--rows", p.rows, "Rows r of the data matrix")->capture_default_str();
}

Population make_population(const PopulationArgs& args) {
  ExperimentSpec spec;
  spec.types = args.source == "reference" ? reference_worker_types()
                                       : load_population_table(args.source);
  if (args.workers) return population_at(spec, *args.workers);
  return build_population(spec.types);
}

/// Writes to `path`, or stdout when empty or "-".
template <class Fn>
void emit(const std::string& path, Fn write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write(out);
}

void print_mechanism(std::ostream& os, const Mechanism& mech, const Population& pop) {
  os << std::setprecision(10);
  os << "scenario          " << to_string(mech.scenario) << '\n';
  os << "targeted types    ";
  for (auto id : mech.targeted) os << id << ' ';
  os << "(" << mech.participant_count(pop) << " workers)\n";
  if (mech.recovery_threshold) {
    os << "recovery k        " << *mech.recovery_threshold << "  (alpha " << *mech.alpha << ")\n";
  }
  os << "announced runtime " << mech.announced_runtime << '\n';
  os << "expected cost     " << mech.expected_cost << '\n';
  os << "type  c        mu       a        count  phi           ratio         reward        load\n";
  for (const auto& e : pop.entries()) {
    const auto load = mech.assignment.load_of(e.type.id);
    os << std::left << std::setw(6) << e.type.id.value << std::setw(9) << e.type.cost_rate
       << std::setw(9) << e.type.speed << std::setw(9) << e.type.startup << std::setw(7)
       << e.type.count << std::setw(14) << e.profile.phi << std::setw(14) << e.profile.ratio
       << std::setw(14) << mech.reward(e.type.id) << (load ? std::to_string(*load) : "-")
       << std::right << '\n';
  }
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

void encode_demo(std::ostream& os, const std::optional<std::string>& matrix_path,
                 const std::optional<std::string>& vector_path) {
  Matrix a(4, 3);
  a << 1, 2, 0, 0, 1, 3, 2, 0, 1, 1, 1, 1;
  Vector x(3);
  x << 1, -1, 2;
  if (matrix_path) {
    std::ifstream in(*matrix_path);
    if (!in) throw ConfigError("cannot open " + *matrix_path);
    a = read_matrix(in);
  }
  if (vector_path) {
    std::ifstream in(*vector_path);
    if (!in) throw ConfigError("cannot open " + *vector_path);
    x = read_vector(in);
  }
  if (x.size() != a.cols()) throw ConfigError("encode-demo: x length must equal the columns of A");

  Matrix g(3, 2);
  g << 1, 0, 0, 1, 1, 1;
  const auto task = mds_encode(a, 3, 2, g);
  os << "A is split into A1 (top half) and A2 (bottom half); three workers hold\n"
        "A1, A2 and A1 + A2. Any two results recover y = A x.\n\n";
  os << "A =\n" << a << "\n\nx =\n" << x.transpose() << "\n\n";
  for (std::size_t w = 0; w < 3; ++w) {
    os << "worker " << w + 1 << " computes y" << w + 1 << " = " << (task.shards[w] * x).transpose()
       << '\n';
  }
  os << "\nworker 1 straggles; decode from workers 2 and 3:\n";
  const std::vector<ShardResult> results{{1, task.shards[1] * x}, {2, task.shards[2] * x}};
  const Vector y = *mds_decode(task, results);
  const Vector direct = a * x;
  os << "  [y3 - y2; y2] = " << y.transpose() << '\n';
  os << "  A x           = " << direct.transpose() << '\n';
  os << "  max error     = " << (y - direct).cwiseAbs().maxCoeff() << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Incentive mechanisms and coded-computation runtimes for distributed coded ML"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Compute the platform's optimal mechanism");
  std::string scenario_name = "complete";
  PopulationArgs solve_pop;
  PlatformArgs solve_platform;
  std::string solve_out;
  solve_cmd->add_option("--scenario", scenario_name, "complete, incomplete or cost-only")
      ->capture_default_str();
  add_population_options(*solve_cmd, solve_pop);
  add_platform_options(*solve_cmd, solve_platform);
  solve_cmd->add_option("--out", solve_out, "Write the mechanism file here (read by verify)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check IR and IC of a mechanism file");
  std::string verify_in;
  bool verify_table = false;
  verify_cmd->add_option("mechanism", verify_in, "Mechanism file written by solve --out")
      ->required();
  verify_cmd->add_flag("--table", verify_table, "Print the machine-readable table");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run coded computation rounds end to end");
  std::string sim_scenario = "incomplete";
  std::optional<std::string> sim_mech;
  PopulationArgs sim_pop;
  PlatformArgs sim_platform;
  sim_platform.rows = 200;
  std::size_t rounds = 10;
  std::size_t cols = 8;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  sim_cmd->add_option("--scenario", sim_scenario, "complete, incomplete or cost-only")
      ->capture_default_str();
  sim_cmd->add_option("--mechanism", sim_mech, "Use a mechanism file instead of solving");
  add_population_options(*sim_cmd, sim_pop);
  add_platform_options(*sim_cmd, sim_platform);
  sim_cmd->add_option("--rounds,--reps", rounds, "Number of rounds")->capture_default_str();
  sim_cmd->add_option("--cols", cols, "Columns of the random data matrix")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "CSV output path (stdout when omitted)");

  // encode-demo
  auto* demo_cmd = app.add_subcommand("encode-demo", "Walk through a (3,2) MDS example");
  std::optional<std::string> demo_matrix;
  std::optional<std::string> demo_vector;
  demo_cmd->add_option("--matrix", demo_matrix, "Dense text matrix A ('rows cols' header)");
  demo_cmd->add_option("--vector", demo_vector, "Dense text vector x");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run a figure sweep and write CSV");
  std::string exp_name;
  std::optional<std::string> exp_config;
  std::optional<std::uint64_t> exp_seed;
  std::optional<std::size_t> exp_reps;
  std::optional<unsigned> exp_threads;
  std::string exp_out;
  exp_cmd->add_option("name", exp_name, "fig4, fig5, fig6, fig7 or custom")->required();
  exp_cmd->add_option("--config", exp_config, "Experiment config file");
  exp_cmd->add_option("--seed", exp_seed, "Override the config seed");
  exp_cmd->add_option("--reps", exp_reps, "Override the replication count");
  exp_cmd->add_option("--threads", exp_threads, "Worker threads (results do not depend on it)");
  exp_cmd->add_option("--out", exp_out, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Config);
  }

  if (*solve_cmd) {
    const auto pop = make_population(solve_pop);
    const auto cfg = solve_platform.config();
    const auto mech = solve(parse_scenario(scenario_name), pop, cfg);
    print_mechanism(std::cout, mech, pop);
    if (!solve_out.empty()) emit(solve_out, [&](std::ostream& os) { write_mechanism(os, mech, pop, cfg); });
  } else if (*verify_cmd) {
    std::ifstream in(verify_in);
    if (!in) throw ConfigError("cannot open " + verify_in);
    const auto file = read_mechanism(in, verify_in);
    const auto report = verify_ir_ic(file.mechanism, file.population);
    std::cout << (verify_table ? report.to_table() : report.to_text());
  } else if (*sim_cmd) {
    std::optional<MechanismFile> loaded;
    if (sim_mech) {
      std::ifstream in(*sim_mech);
      if (!in) throw ConfigError("cannot open " + *sim_mech);
      loaded = read_mechanism(in, *sim_mech);
    }
    const auto pop = loaded ? loaded->population : make_population(sim_pop);
    const auto cfg = loaded ? loaded->platform : sim_platform.config();
    const auto mech = loaded ? loaded->mechanism : solve(parse_scenario(sim_scenario), pop, cfg);
    if (cfg.total_rows != std::floor(cfg.total_rows)) {
      throw ConfigError("simulate: r must be an integer");
    }
    if (cols < 1) throw ConfigError("simulate: --cols must be positive");
    RandomStream data(sim_seed, {0xda7a});
    const auto r = static_cast<Eigen::Index>(cfg.total_rows);
    const Matrix a = gaussian_matrix(r, static_cast<Eigen::Index>(cols), data);
    const Vector x = gaussian_matrix(static_cast<Eigen::Index>(cols), 1, data).col(0);
    const Vector direct = a * x;

    ResultTable table;
    table.columns = {"round", "runtime", "finishers_used", "decode_error", "total_payment",
                     "platform_cost"};
    table.metadata = {"codedml " + std::string(library_version()) + " simulate",
                      "scenario " + std::string(to_string(mech.scenario)),
                      "seed " + std::to_string(sim_seed), "cols " + std::to_string(cols)};
    for (std::size_t i = 0; i < rounds; ++i) {
      std::uint64_t state = sim_seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
      const auto outcome = simulate_round(mech, pop, cfg, a, x, splitmix64(state));
      double paid = 0.0;
      for (double p : outcome.payments) paid += p;
      table.add_row({static_cast<double>(i), outcome.runtime,
                     static_cast<double>(outcome.realized_k),
                     (outcome.decoded - direct).cwiseAbs().maxCoeff(), paid,
                     outcome.platform_cost_realized});
    }
    emit(sim_out, [&](std::ostream& os) { table.write_csv(os); });
  } else if (*demo_cmd) {
    encode_demo(std::cout, demo_matrix, demo_vector);
  } else if (*exp_cmd) {
    const auto kind = parse_experiment_kind(exp_name);
    ExperimentSpec spec = exp_config ? load_config(*exp_config) : default_spec(kind);
    spec.name = kind;
    if (kind == ExperimentKind::Fig7 && !spec.type_probabilities) {
      spec.type_probabilities = std::vector<double>(spec.types.size(), 1.0 / spec.types.size());
    }
    if (exp_seed) spec.seed = *exp_seed;
    if (exp_reps) spec.replications = *exp_reps;
    if (exp_threads) spec.threads = *exp_threads;
    const auto table = run_experiment(spec);
    emit(exp_out, [&](std::ostream& os) { table.write_csv(os); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const codedml::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
