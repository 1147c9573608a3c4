#pragma once

// Fault tree engine: exact top-event probability under independence,
// MOCUS minimal cut sets, Birnbaum / Fussell-Vesely importance and a
// seeded Monte Carlo cross-check.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uam/core.hpp"

namespace uam::fta {

struct FtaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BasicEvent {
  std::string id;
  double lambda = 0.0;    // failures per hour
  double exposure = 1.0;  // hours
  std::optional<double> fixed_probability;  // overrides lambda * exposure
};

// fixed_probability if set, else 1 - exp(-lambda * exposure).
double event_probability(const BasicEvent& e);

enum class GateOp { And, Or, KofN };

struct Gate {
  std::string id;
  GateOp op = GateOp::Or;
  int k = 0;  // KofN only
  std::vector<std::string> children;  // gate or event ids
};

struct FaultTree {
  std::string id;
  std::string top;  // gate or event id
  std::map<std::string, BasicEvent> events;
  std::map<std::string, Gate> gates;

  // Hazard metadata consumed by the compliance stage.
  std::optional<Severity> severity;
  int contributors = 1;  // independent contributors sharing the budget
  std::string condition;  // failure condition description
};

// Structural checks: reference integrity, acyclicity, KOFN bounds,
// probability ranges. Throws FtaError on the first violation.
void validate(const FaultTree& tree);

// Exact probability. Uses bottom-up combination while sibling subtrees
// share no basic events, otherwise inclusion-exclusion over minimal cut
// sets (exact up to 20 sets). Shared-event trees with more cut sets throw
// an FtaError pointing at monte_carlo_top.
double evaluate_top(const FaultTree& tree);

struct CutSet {
  std::vector<std::string> events;  // sorted ids
  double probability = 0.0;         // product of member probabilities
};

// MOCUS top-down expansion with subset minimization. Sorted by
// (order, lexicographic ids). Throws on > 1e6 intermediate sets.
std::vector<CutSet> minimal_cut_sets(const FaultTree& tree);

struct Importance {
  double birnbaum = 0.0;        // P(top | e=1) - P(top | e=0)
  double fussell_vesely = 0.0;  // P(union of cut sets containing e) / P(top)
};

// Throws FtaError when P(top) = 0 (Fussell-Vesely undefined).
Importance importance(const FaultTree& tree, const std::string& event_id);

// All events, sorted by descending Birnbaum measure.
std::vector<std::pair<std::string, Importance>> importance_ranking(const FaultTree& tree);

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  bool reliable = true;  // false when hits < 10
};

// Bernoulli sampling of every basic event per trial; bit-identical for a
// fixed seed.
MonteCarloResult monte_carlo_top(const FaultTree& tree, std::uint64_t trials,
                                 std::uint64_t seed);

// Exhaustive 2^n enumeration, n <= 20. Exact reference implementation used
// by the test oracles and the acceptance suite.
double brute_force_top(const FaultTree& tree);

}  // namespace uam::fta
