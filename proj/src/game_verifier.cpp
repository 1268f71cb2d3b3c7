#include "codedml/game_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "codedml/errors.hpp"

namespace codedml {

namespace {

void check_ids(const Mechanism& mech, const Population& pop, TypeId a, TypeId b) {
  if (!pop.contains(a) || !pop.contains(b)) throw ConfigError("verifier: unknown type id");
  if (mech.rewards.size() != pop.type_count()) {
    throw ConfigError("verifier: reward table does not match the population");
  }
}

double offered_reward(TypeId true_type, TypeId reported, const Mechanism& mech,
                      const Population& pop) {
  if (mech.scenario == Scenario::CompleteHetero) return mech.reward(true_type);
  return mech.reward(reported) * pop[true_type].profile.phi / pop[reported].profile.phi;
}

}  // namespace

double payoff_noise(double a, double b) {
  return 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

double worker_payoff(TypeId true_type, TypeId reported, const Mechanism& mech,
                     const Population& pop) {
  check_ids(mech, pop, true_type, reported);
  if (mech.scenario == Scenario::CompleteHetero && reported != true_type) {
    throw ConfigError("complete information: the platform observes types, misreport is impossible");
  }
  return offered_reward(true_type, reported, mech, pop) -
         pop[true_type].type.cost_rate * mech.announced_runtime;
}

WorkerDecision best_response(TypeId true_type, const Mechanism& mech, const Population& pop) {
  std::vector<TypeId> reports;
  if (mech.scenario == Scenario::CompleteHetero) {
    reports.push_back(true_type);
  } else {
    reports = mech.targeted;
  }

  std::vector<double> payoffs;
  for (auto r : reports) payoffs.push_back(worker_payoff(true_type, r, mech, pop));
  const double best = *std::max_element(payoffs.begin(), payoffs.end());
  const double cost = pop[true_type].type.cost_rate * mech.announced_runtime;

  // Near-ties: truthful first, then the smallest id.
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (payoffs[i] < best - payoff_noise(best, cost)) continue;
    if (reports[i] == true_type) {
      pick = i;
      break;
    }
    if (!pick) pick = i;
  }

  WorkerDecision d;
  d.expected_payoff = payoffs[*pick];
  d.participate = d.expected_payoff >= -payoff_noise(d.expected_payoff + cost, cost);
  if (d.participate) d.reported_type = reports[*pick];
  return d;
}

std::vector<TypeId> participating_types(const Mechanism& mech, const Population& pop) {
  std::vector<TypeId> out;
  for (auto id : pop.ids()) {
    if (best_response(id, mech, pop).participate) out.push_back(id);
  }
  return out;
}

ComplianceReport verify_ir_ic(const Mechanism& mech, const Population& pop) {
  ComplianceReport rep;
  const auto ids = pop.ids();

  for (auto m : mech.targeted) {
    ++rep.ir_checks;
    const double u = worker_payoff(m, m, mech, pop);
    const double cost = pop[m].type.cost_rate * mech.announced_runtime;
    if (u < -payoff_noise(u + cost, cost)) rep.ir_violations.push_back({m, u});
  }

  // Types are observed under complete information; there is nothing to misreport.
  if (mech.scenario != Scenario::CompleteHetero) {
    auto gain_of = [&](TypeId m, TypeId r) {
      const double truthful = worker_payoff(m, m, mech, pop);
      const double deviated = worker_payoff(m, r, mech, pop);
      return std::pair{deviated - truthful, payoff_noise(truthful, deviated)};
    };
    for (auto m : mech.targeted) {
      for (auto r : mech.targeted) {
        if (r == m) continue;
        ++rep.ic_checks;
        auto [gain, noise] = gain_of(m, r);
        if (gain > noise) rep.ic_violations.push_back({m, r, gain});
      }
    }
    for (auto m : ids) {
      for (auto r : ids) {
        if (r == m) continue;
        ++rep.ic_checks_all_types;
        auto [gain, noise] = gain_of(m, r);
        if (gain > noise) rep.ic_violations_all_types.push_back({m, r, gain});
      }
    }
  }

  for (auto m : ids) {
    if (mech.targets(m)) continue;
    if (best_response(m, mech, pop).participate) rep.unintended_participants.push_back(m);
  }

  rep.truthful = rep.ir_violations.empty() && rep.ic_violations.empty() &&
                 rep.ic_violations_all_types.empty();
  return rep;
}

std::string ComplianceReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "compliance: " << (truthful ? "truthful" : "VIOLATED") << '\n';
  os << "  IR checks: " << ir_checks << ", violations: " << ir_violations.size() << '\n';
  for (const auto& v : ir_violations) {
    os << "    type " << v.type << " expected payoff " << v.payoff << '\n';
  }
  os << "  IC checks (targeted reports): " << ic_checks << ", violations: " << ic_violations.size()
     << '\n';
  for (const auto& v : ic_violations) {
    os << "    type " << v.true_type << " gains " << v.gain << " by reporting " << v.report << '\n';
  }
  os << "  IC checks (all types): " << ic_checks_all_types
     << ", violations: " << ic_violations_all_types.size() << '\n';
  for (const auto& v : ic_violations_all_types) {
    os << "    type " << v.true_type << " gains " << v.gain << " by reporting " << v.report << '\n';
  }
  os << "  non-targeted types participating: " << unintended_participants.size() << '\n';
  for (auto id : unintended_participants) os << "    type " << id << '\n';
  return os.str();
}

std::string ComplianceReport::to_table() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind,true_type,reported_type,value\n";
  for (const auto& v : ir_violations) os << "ir," << v.type << ',' << v.type << ',' << v.payoff << '\n';
  for (const auto& v : ic_violations) {
    os << "ic," << v.true_type << ',' << v.report << ',' << v.gain << '\n';
  }
  for (const auto& v : ic_violations_all_types) {
    os << "ic_all," << v.true_type << ',' << v.report << ',' << v.gain << '\n';
  }
  for (auto id : unintended_participants) os << "unintended," << id << ",,\n";
  return os.str();
}

}  // namespace codedml
