#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codedml/mechanism.hpp"
#include "codedml/worker_model.hpp"

namespace codedml {

struct WorkerDecision {
  bool participate = false;
  std::optional<TypeId> reported_type;  // set only when participating
  /// Payoff at the best available report, negative when declining.
  double expected_payoff = 0.0;
};

struct IrViolation {
  TypeId type;
  double payoff = 0.0;
};

struct IcViolation {
  TypeId true_type;
  TypeId report;
  double gain = 0.0;
};

struct ComplianceReport {
  std::vector<IrViolation> ir_violations;
  /// Reports restricted to the announced targeted set.
  std::vector<IcViolation> ic_violations;
  /// Every ordered pair of distinct types, targeted or not.
  std::vector<IcViolation> ic_violations_all_types;
  /// Non-targeted types whose best response is to participate.
  std::vector<TypeId> unintended_participants;
  std::size_t ir_checks = 0;
  std::size_t ic_checks = 0;
  std::size_t ic_checks_all_types = 0;
  bool truthful = true;

  std::string to_text() const;
  /// CSV rows: kind,true_type,reported_type,value
  std::string to_table() const;
};

/// Differences below this are treated as float noise.
double payoff_noise(double a, double b);

/// Expected per-round payoff of a true type-m worker reporting `reported`.
/// The reported type fixes the reward per unit of effective throughput; the
/// worker's own (public) throughput scales it. With complete information
/// the platform observes types, so misreports are rejected.
double worker_payoff(TypeId true_type, TypeId reported, const Mechanism& mech,
                     const Population& pop);

/// Best report among the announced targeted types (own type only under
/// complete information); participates on a nonnegative payoff.
WorkerDecision best_response(TypeId true_type, const Mechanism& mech, const Population& pop);

/// Types whose best response is to participate.
std::vector<TypeId> participating_types(const Mechanism& mech, const Population& pop);

ComplianceReport verify_ir_ic(const Mechanism& mech, const Population& pop);

}  // namespace codedml
