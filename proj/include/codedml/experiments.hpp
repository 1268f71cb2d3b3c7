#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codedml/mechanism.hpp"
#include "codedml/worker_model.hpp"

namespace codedml {

std::string_view library_version();

enum class ExperimentKind { Fig4, Fig5, Fig6, Fig7, Custom };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentSpec {
  ExperimentKind name = ExperimentKind::Fig4;
  /// "reference" or the path the types were read from; informational once
  /// `types` is filled.
  std::string population_source = "reference";
  std::vector<WorkerType> types;
  PlatformConfig platform;
  std::vector<std::size_t> n_sweep;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> type_probabilities;
  unsigned threads = 0;  // 0: hardware concurrency; never affects results

  void validate() const;
  /// Self-contained config text (types inlined) that load_config reads back
  /// to an identical spec.
  std::string to_config() const;
};

/// Bundled ten-type table with the default platform; N runs 100..5000.
ExperimentSpec default_spec(ExperimentKind kind);

/// Lines of `c mu a count` (count optional, default 0); `#` starts a comment.
std::vector<WorkerType> parse_population_table(std::istream& in, std::string_view source);
std::vector<WorkerType> load_population_table(const std::filesystem::path& path);

/// `key = value` lines; see README for the keys. Relative population paths
/// resolve against the config file's directory.
ExperimentSpec parse_config(std::istream& in, std::string_view source,
                            const std::filesystem::path& base_dir = {});
ExperimentSpec load_config(const std::filesystem::path& path);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> metadata;  // written as `# ` lines

  void add_row(std::vector<double> row);
  std::size_t column(std::string_view name) const;
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

/// Population for total worker count N: counts apportioned proportionally to
/// the configured counts, or equally when none are given.
Population population_at(const ExperimentSpec& spec, std::size_t n_total);

ResultTable run_fig4(const ExperimentSpec& spec);
ResultTable run_fig5(const ExperimentSpec& spec);
ResultTable run_fig6(const ExperimentSpec& spec);
ResultTable run_fig7(const ExperimentSpec& spec);
ResultTable run_custom(const ExperimentSpec& spec);
ResultTable run_experiment(const ExperimentSpec& spec);

struct Fig7Point {
  double mean_gap = 0.0;
  double stderr_gap = 0.0;
  std::size_t replications = 0;
  std::size_t skipped = 0;  // realizations with no targeted worker present
};

/// Strongly incomplete information at one N: the platform commits to the
/// incomplete-information mechanism for the expected counts. Each replicate
/// draws every worker's type independently, and workers best-respond. The
/// gap is the realized cost minus that of the mechanism solved on the
/// realized counts.
Fig7Point strongly_incomplete_gap(const ExperimentSpec& spec, std::size_t n_total);

/// Mechanism exchange format used by `solve --out` and `verify`.
struct MechanismFile {
  Population population;
  PlatformConfig platform;
  Mechanism mechanism;
};

void write_mechanism(std::ostream& out, const Mechanism& mech, const Population& pop,
                     const PlatformConfig& cfg);
MechanismFile read_mechanism(std::istream& in, std::string_view source);

}  // namespace codedml
