#include "codedml/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "codedml/errors.hpp"
#include "codedml/game_verifier.hpp"
#include "codedml/parallel.hpp"
#include "codedml/random_stream.hpp"

#ifndef CODEDML_VERSION
#define CODEDML_VERSION "0.0.0"
#endif

namespace codedml {

std::string_view library_version() { return CODEDML_VERSION; }

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Fig4: return "fig4";
    case ExperimentKind::Fig5: return "fig5";
    case ExperimentKind::Fig6: return "fig6";
    case ExperimentKind::Fig7: return "fig7";
    case ExperimentKind::Custom: return "custom";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::Fig4, ExperimentKind::Fig5, ExperimentKind::Fig6,
                 ExperimentKind::Fig7, ExperimentKind::Custom}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(text) +
                    "' (expected fig4, fig5, fig6, fig7 or custom)");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_words(std::string_view s, bool commas = true) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || (commas && ch == ',')) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Source location prefix for parse errors.
struct Where {
  std::string_view source;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ": " + what);
  }
};

double parse_double(std::string_view text, const Where& at, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    at.fail("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text, const Where& at, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    at.fail("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

WorkerType parse_type_row(const std::vector<std::string>& words, const Where& at) {
  if (words.size() != 3 && words.size() != 4) {
    at.fail("type row needs 'c mu a [count]', got " + std::to_string(words.size()) + " fields");
  }
  WorkerType t;
  t.cost_rate = parse_double(words[0], at, "cost");
  t.speed = parse_double(words[1], at, "speed");
  t.startup = parse_double(words[2], at, "startup");
  if (words.size() == 4) t.count = parse_unsigned(words[3], at, "count");
  try {
    t.validate();
  } catch (const Error& e) {
    at.fail(e.what());
  }
  return t;
}

std::string strip_comment(std::string_view line) {
  return trim(line.substr(0, line.find('#')));
}

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

// Shortest text that reads back to the same double.
std::string format_exact(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : format_number(v);
}

std::vector<std::size_t> parse_sweep(std::string_view text, const Where& at) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
      if (ch == ':') {
        parts.push_back(trim(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    parts.push_back(trim(cur));
    if (parts.size() != 3) at.fail("n_sweep range must be start:stop:step");
    const auto start = parse_unsigned(parts[0], at, "sweep start");
    const auto stop = parse_unsigned(parts[1], at, "sweep stop");
    const auto step = parse_unsigned(parts[2], at, "sweep step");
    if (step == 0 || start == 0 || stop < start) at.fail("n_sweep range is empty or has step 0");
    for (auto n = start; n <= stop; n += step) out.push_back(n);
  } else {
    for (const auto& w : split_words(text)) out.push_back(parse_unsigned(w, at, "sweep value"));
  }
  if (out.empty()) at.fail("n_sweep is empty");
  return out;
}

struct IndexedBase {
  Population base;                        // counts zero, sorted order
  std::vector<std::size_t> sorted_input;  // sorted position -> input index
};

IndexedBase index_types(const std::vector<WorkerType>& types) {
  std::vector<WorkerType> zeroed = types;
  for (auto& t : zeroed) t.count = 0;
  IndexedBase ib{build_population(zeroed), {}};
  std::vector<bool> used(types.size(), false);
  for (const auto& e : ib.base.entries()) {
    for (std::size_t i = 0; i < types.size(); ++i) {
      if (used[i]) continue;
      const auto& t = types[i];
      if (t.cost_rate == e.type.cost_rate && t.speed == e.type.speed &&
          t.startup == e.type.startup) {
        used[i] = true;
        ib.sorted_input.push_back(i);
        break;
      }
    }
  }
  return ib;
}

std::vector<double> count_weights(const std::vector<WorkerType>& types) {
  std::vector<double> w;
  bool any = false;
  for (const auto& t : types) {
    w.push_back(static_cast<double>(t.count));
    any = any || t.count > 0;
  }
  if (!any) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

Population with_input_counts(const IndexedBase& ib, std::span<const std::size_t> input_counts) {
  std::vector<std::size_t> sorted(input_counts.size());
  for (std::size_t s = 0; s < sorted.size(); ++s) sorted[s] = input_counts[ib.sorted_input[s]];
  return ib.base.with_counts(sorted);
}

ResultTable make_table(const ExperimentSpec& spec, std::vector<std::string> columns) {
  ResultTable t;
  t.columns = std::move(columns);
  t.metadata.push_back("codedml " + std::string(library_version()));
  t.metadata.push_back("experiment " + std::string(to_string(spec.name)));
  std::istringstream cfg(spec.to_config());
  for (std::string line; std::getline(cfg, line);) t.metadata.push_back("config: " + line);
  return t;
}

template <class Row>
ResultTable sweep(const ExperimentSpec& spec, std::vector<std::string> columns, Row row) {
  spec.validate();
  ResultTable table = make_table(spec, std::move(columns));
  std::vector<std::vector<double>> rows(spec.n_sweep.size());
  parallel_for(rows.size(), spec.threads, [&](std::size_t i) { rows[i] = row(spec.n_sweep[i]); });
  for (auto& r : rows) table.add_row(std::move(r));
  return table;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (types.empty()) throw ConfigError("experiment: population has no types");
  for (const auto& t : types) t.validate();
  platform.validate();
  if (n_sweep.empty()) throw ConfigError("experiment: N sweep is empty");
  for (auto n : n_sweep) {
    if (n == 0) throw ConfigError("experiment: N values must be positive");
  }
  if (name == ExperimentKind::Fig7) {
    if (!type_probabilities) throw ConfigError("experiment fig7: type_probabilities required");
    if (replications < 1) throw ConfigError("experiment fig7: need at least one replication");
  }
  if (type_probabilities) {
    if (type_probabilities->size() != types.size()) {
      throw ConfigError("experiment: need one type probability per type");
    }
    double total = 0.0;
    for (double p : *type_probabilities) {
      if (!(p >= 0.0)) throw ConfigError("experiment: type probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ConfigError("experiment: type probabilities sum to " + format_number(total));
    }
  }
}

std::string ExperimentSpec::to_config() const {
  std::ostringstream os;
  os << "experiment = " << to_string(name) << '\n';
  os << "gamma_time = " << format_exact(platform.gamma_time) << '\n';
  os << "gamma_pay = " << format_exact(platform.gamma_pay) << '\n';
  os << "total_rows = " << format_exact(platform.total_rows) << '\n';
  os << "n_sweep =";
  for (auto n : n_sweep) os << ' ' << n;
  os << '\n';
  os << "replications = " << replications << '\n';
  os << "seed = " << seed << '\n';
  if (type_probabilities) {
    os << "type_probabilities =";
    for (double p : *type_probabilities) os << ' ' << format_exact(p);
    os << '\n';
  }
  for (const auto& t : types) {
    os << "type = " << format_exact(t.cost_rate) << ' ' << format_exact(t.speed) << ' '
       << format_exact(t.startup) << ' ' << t.count << '\n';
  }
  return os.str();
}

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.name = kind;
  spec.types = reference_worker_types();
  for (std::size_t n = 100; n <= 5000; n += 100) spec.n_sweep.push_back(n);
  if (kind == ExperimentKind::Fig7) {
    spec.type_probabilities = std::vector<double>(spec.types.size(), 1.0 / spec.types.size());
  }
  return spec;
}

std::vector<WorkerType> parse_population_table(std::istream& in, std::string_view source) {
  std::vector<WorkerType> out;
  std::string raw;
  Where at{source, 0};
  while (std::getline(in, raw)) {
    ++at.line;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    out.push_back(parse_type_row(split_words(line, false), at));
  }
  if (out.empty()) throw ConfigError(std::string(source) + ": population table has no types");
  return out;
}

std::vector<WorkerType> load_population_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open population table " + path.string());
  return parse_population_table(in, path.string());
}

ExperimentSpec parse_config(std::istream& in, std::string_view source,
                            const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  spec.types.clear();
  bool has_population = false;
  bool has_sweep = false;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  Where at{source, 0};
  while (std::getline(in, raw)) {
    ++at.line;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty()) at.fail("missing value for '" + key + "'");
    if (key != "type" && seen.count(key)) {
      at.fail("duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    }
    seen.emplace(key, at.line);

    if (key == "experiment") {
      try {
        spec.name = parse_experiment_kind(value);
      } catch (const ConfigError& e) {
        at.fail(e.what());
      }
    } else if (key == "population") {
      has_population = true;
      spec.population_source = value;
      if (value == "reference") {
        spec.types = reference_worker_types();
      } else {
        std::filesystem::path p(value);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        try {
          spec.types = load_population_table(p);
        } catch (const ConfigError& e) {
          at.fail(e.what());
        }
      }
    } else if (key == "type") {
      spec.types.push_back(parse_type_row(split_words(value, false), at));
      spec.population_source = "inline";
    } else if (key == "gamma_time") {
      spec.platform.gamma_time = parse_double(value, at, "gamma_time");
    } else if (key == "gamma_pay") {
      spec.platform.gamma_pay = parse_double(value, at, "gamma_pay");
    } else if (key == "total_rows") {
      spec.platform.total_rows = parse_double(value, at, "total_rows");
    } else if (key == "n_sweep") {
      spec.n_sweep = parse_sweep(value, at);
      has_sweep = true;
    } else if (key == "replications") {
      spec.replications = parse_unsigned(value, at, "replications");
    } else if (key == "seed") {
      spec.seed = parse_unsigned(value, at, "seed");
    } else if (key == "threads") {
      spec.threads = static_cast<unsigned>(parse_unsigned(value, at, "threads"));
    } else if (key == "type_probabilities") {
      if (value == "uniform") {
        spec.type_probabilities = std::vector<double>{};  // sized once types are known
      } else {
        std::vector<double> probs;
        for (const auto& w : split_words(value)) probs.push_back(parse_double(w, at, "probability"));
        spec.type_probabilities = std::move(probs);
      }
    } else {
      at.fail("unknown key '" + key + "'");
    }
  }

  if (has_population && seen.count("type")) {
    throw ConfigError(std::string(source) + ": use either 'population' or 'type' lines, not both");
  }
  if (spec.types.empty()) spec.types = reference_worker_types();
  if (!has_sweep) {
    for (std::size_t n = 100; n <= 5000; n += 100) spec.n_sweep.push_back(n);
  }
  if (spec.type_probabilities && spec.type_probabilities->empty()) {
    spec.type_probabilities = std::vector<double>(spec.types.size(), 1.0 / spec.types.size());
  }
  if (spec.name == ExperimentKind::Fig7 && !spec.type_probabilities) {
    spec.type_probabilities = std::vector<double>(spec.types.size(), 1.0 / spec.types.size());
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.string(), path.parent_path());
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw ConfigError("result table: row has " + std::to_string(row.size()) + " values for " +
                      std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("result table: no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

void ResultTable::write_csv(std::ostream& out) const {
  for (const auto& m : metadata) out << "# " << m << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

Population population_at(const ExperimentSpec& spec, std::size_t n_total) {
  const auto ib = index_types(spec.types);
  const auto counts = apportion(n_total, count_weights(spec.types));
  return with_input_counts(ib, counts);
}

ResultTable run_fig4(const ExperimentSpec& spec) {
  return sweep(spec, {"N", "n_complete", "n_incomplete"}, [&](std::size_t n) {
    const auto pop = population_at(spec, n);
    return std::vector<double>{
        static_cast<double>(n),
        static_cast<double>(solve_complete(pop, spec.platform).threshold_type.value),
        static_cast<double>(solve_incomplete(pop, spec.platform).threshold_type.value)};
  });
}

ResultTable run_fig5(const ExperimentSpec& spec) {
  return sweep(spec, {"N", "cost_complete", "cost_incomplete", "gap"}, [&](std::size_t n) {
    const auto pop = population_at(spec, n);
    const double c = solve_complete(pop, spec.platform).expected_cost;
    const double i = solve_incomplete(pop, spec.platform).expected_cost;
    return std::vector<double>{static_cast<double>(n), c, i, i - c};
  });
}

ResultTable run_fig6(const ExperimentSpec& spec) {
  std::vector<std::string> columns{"N"};
  for (std::size_t m = 1; m <= spec.types.size(); ++m) {
    columns.push_back("payoff_type_" + std::to_string(m));
  }
  return sweep(spec, std::move(columns), [&](std::size_t n) {
    const auto pop = population_at(spec, n);
    const auto mech = solve_incomplete(pop, spec.platform);
    std::vector<double> row{static_cast<double>(n)};
    for (auto id : pop.ids()) {
      const auto d = best_response(id, mech, pop);
      row.push_back(d.participate ? worker_payoff(id, id, mech, pop) : 0.0);
    }
    return row;
  });
}

Fig7Point strongly_incomplete_gap(const ExperimentSpec& spec, std::size_t n_total) {
  spec.validate();
  if (!spec.type_probabilities) throw ConfigError("strongly incomplete: no type probabilities");
  const auto ib = index_types(spec.types);
  const auto& probs = *spec.type_probabilities;
  const std::size_t m = spec.types.size();

  const auto expected = with_input_counts(ib, apportion(n_total, probs));
  const Mechanism committed = solve_incomplete(expected, spec.platform);
  const auto joining = participating_types(committed, expected);

  std::vector<double> cumulative(m);
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());

  const RandomStream point(spec.seed, {static_cast<std::uint64_t>(n_total)});
  std::vector<double> gaps;
  Fig7Point out;
  for (std::size_t rep = 0; rep < spec.replications; ++rep) {
    RandomStream rng = point.derive(rep);
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t w = 0; w < n_total; ++w) ++counts[rng.categorical(cumulative.data(), m)];
    const auto realized = with_input_counts(ib, counts);

    double throughput = 0.0;
    double paid = 0.0;
    for (auto id : joining) {
      const auto& e = realized[id];
      const auto cnt = static_cast<double>(e.type.count);
      throughput += cnt * e.profile.phi;
      paid += cnt * committed.reward(id);
    }
    if (throughput <= 0.0) {
      ++out.skipped;
      continue;
    }
    const double cost = spec.platform.gamma_time * spec.platform.total_rows / throughput +
                        spec.platform.gamma_pay * paid;
    gaps.push_back(cost - solve_incomplete(realized, spec.platform).expected_cost);
  }
  out.replications = gaps.size();
  if (!gaps.empty()) {
    const double n = static_cast<double>(gaps.size());
    out.mean_gap = std::accumulate(gaps.begin(), gaps.end(), 0.0) / n;
    if (gaps.size() > 1) {
      double sq = 0.0;
      for (double g : gaps) sq += (g - out.mean_gap) * (g - out.mean_gap);
      out.stderr_gap = std::sqrt(sq / (n - 1.0) / n);
    }
  }
  return out;
}

ResultTable run_fig7(const ExperimentSpec& spec) {
  return sweep(spec, {"N", "mean_gap", "stderr_gap", "replications", "skipped"},
               [&](std::size_t n) {
                 const auto p = strongly_incomplete_gap(spec, n);
                 return std::vector<double>{static_cast<double>(n), p.mean_gap, p.stderr_gap,
                                            static_cast<double>(p.replications),
                                            static_cast<double>(p.skipped)};
               });
}

ResultTable run_custom(const ExperimentSpec& spec) {
  std::vector<std::string> columns{"N", "n_complete", "n_incomplete", "cost_complete",
                                   "cost_incomplete", "gap"};
  const auto probe = population_at(spec, spec.n_sweep.front());
  const bool cost_only = probe.homogeneous_performance();
  if (cost_only) {
    for (const char* c : {"n_cost_only", "k_cost_only", "cost_cost_only"}) columns.push_back(c);
  }
  return sweep(spec, std::move(columns), [&](std::size_t n) {
    const auto pop = population_at(spec, n);
    const auto c = solve_complete(pop, spec.platform);
    const auto i = solve_incomplete(pop, spec.platform);
    std::vector<double> row{static_cast<double>(n),
                            static_cast<double>(c.threshold_type.value),
                            static_cast<double>(i.threshold_type.value),
                            c.expected_cost,
                            i.expected_cost,
                            i.expected_cost - c.expected_cost};
    if (cost_only) {
      const auto o = solve_cost_only(pop, spec.platform);
      row.push_back(static_cast<double>(o.threshold_type.value));
      row.push_back(static_cast<double>(*o.recovery_threshold));
      row.push_back(o.expected_cost);
    }
    return row;
  });
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  switch (spec.name) {
    case ExperimentKind::Fig4: return run_fig4(spec);
    case ExperimentKind::Fig5: return run_fig5(spec);
    case ExperimentKind::Fig6: return run_fig6(spec);
    case ExperimentKind::Fig7: return run_fig7(spec);
    case ExperimentKind::Custom: return run_custom(spec);
  }
  throw ConfigError("unknown experiment");
}

void write_mechanism(std::ostream& out, const Mechanism& mech, const Population& pop,
                     const PlatformConfig& cfg) {
  out << "# codedml mechanism " << library_version() << '\n';
  out << "scenario = " << to_string(mech.scenario) << '\n';
  out << "gamma_time = " << format_exact(cfg.gamma_time) << '\n';
  out << "gamma_pay = " << format_exact(cfg.gamma_pay) << '\n';
  out << "total_rows = " << format_exact(cfg.total_rows) << '\n';
  out << "targeted =";
  for (auto id : mech.targeted) out << ' ' << id;
  out << '\n';
  if (mech.recovery_threshold) out << "recovery_threshold = " << *mech.recovery_threshold << '\n';
  out << "rewards =";
  for (double r : mech.rewards) out << ' ' << format_exact(r);
  out << '\n';
  out << "# announced_runtime = " << format_exact(mech.announced_runtime) << '\n';
  out << "# expected_cost = " << format_exact(mech.expected_cost) << '\n';
  for (const auto& e : pop.entries()) {
    out << "type = " << format_exact(e.type.cost_rate) << ' ' << format_exact(e.type.speed)
        << ' ' << format_exact(e.type.startup) << ' ' << e.type.count << '\n';
  }
}

MechanismFile read_mechanism(std::istream& in, std::string_view source) {
  std::optional<Scenario> scenario;
  PlatformConfig cfg;
  std::vector<TypeId> targeted;
  std::vector<double> rewards;
  std::optional<std::size_t> k;
  std::vector<WorkerType> types;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  Where at{source, 0};
  while (std::getline(in, raw)) {
    ++at.line;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key != "type" && seen.count(key)) at.fail("duplicate key '" + key + "'");
    seen.emplace(key, at.line);
    if (key == "scenario") {
      try {
        scenario = parse_scenario(value);
      } catch (const ConfigError& e) {
        at.fail(e.what());
      }
    } else if (key == "gamma_time") {
      cfg.gamma_time = parse_double(value, at, "gamma_time");
    } else if (key == "gamma_pay") {
      cfg.gamma_pay = parse_double(value, at, "gamma_pay");
    } else if (key == "total_rows") {
      cfg.total_rows = parse_double(value, at, "total_rows");
    } else if (key == "targeted") {
      for (const auto& w : split_words(value)) {
        targeted.emplace_back(parse_unsigned(w, at, "type id"));
      }
    } else if (key == "recovery_threshold") {
      k = parse_unsigned(value, at, "recovery threshold");
    } else if (key == "rewards") {
      for (const auto& w : split_words(value)) rewards.push_back(parse_double(w, at, "reward"));
    } else if (key == "type") {
      types.push_back(parse_type_row(split_words(value, false), at));
    } else {
      at.fail("unknown key '" + key + "'");
    }
  }
  const std::string where(source);
  if (!scenario) throw ConfigError(where + ": missing 'scenario'");
  if (types.empty()) throw ConfigError(where + ": missing 'type' lines");
  if (targeted.empty()) throw ConfigError(where + ": missing 'targeted'");
  auto pop = build_population(std::move(types));
  auto mech = make_posted_mechanism(pop, cfg, *scenario, targeted, std::move(rewards), k);
  return {std::move(pop), cfg, std::move(mech)};
}

}  // namespace codedml
