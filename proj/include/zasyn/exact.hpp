#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "zasyn/model.hpp"
#include "zasyn/types.hpp"
#include "zasyn/za_dfa.hpp"

namespace zasyn {

enum class OptMode { Max, Min };

/// Action set available after a history; must be non-empty on every
/// reachable history shorter than the horizon.
using EnabledFn = std::function<std::vector<ActionId>(const History&)>;

EnabledFn all_actions_enabled(const Pomdp& model);
EnabledFn supervisor_enabled(const ZaDfa& dfa);

struct ExactLimits {
  std::size_t max_nodes = 2'000'000;
};

struct OptimalResult {
  double value = 0.0;
  /// Arg-optimal action at every explored history (the full enabled tree,
  /// not just the optimal path), ties resolved toward the lowest index.
  Adversary adversary;
  /// Conditional value of each initial-observation branch.
  std::map<ObsId, double> branch_values;
};

/// Exhaustive belief-tree dynamic program on the absorbing model. Leaf
/// value at depth k is the phi2 mass of the belief; internal nodes optimize
/// over enabled actions with evidence-weighted children; the root optimizes
/// over unweighted initial-observation branches.
OptimalResult optimal_value(const Pomdp& model, const BoundedUntilSpec& spec, OptMode mode,
                            const EnabledFn& enabled, const ExactLimits& limits = {});

/// Probability mass absorbed in phi2 within min(|y|, k) steps while the
/// non-absorbed mass follows y's observation gating. The first observation
/// is unweighted; mass already absorbed keeps counting after any deviation.
double policy_string_value(const Pomdp& model, const BoundedUntilSpec& spec,
                           const PolicyString& y);

struct SupervisorCheck {
  bool satisfied = false;
  double p_c = 0.0;
  Adversary witness;
};

/// Maximum satisfaction probability over observation-based adversaries the
/// supervisor enables. Requires a non-blocking supervisor.
SupervisorCheck check_supervisor(const Pomdp& model, const ZaDfa& dfa,
                                 const BoundedUntilSpec& spec);

/// History-indexed DTMC induced by a fixed adversary on the absorbing
/// model, rooted per initial-observation branch. Mass entering phi2 leaves
/// the chain immediately through an edge to the dummy sink h_d carrying the
/// absorbing action; depth-k nodes keep the (then zero-mass) sink edge.
struct DerivedDtmc {
  struct Node {
    History history;
    Belief belief;  // normalized, phi2 mass already diverted to h_d
    int depth = 0;
    ActionId action = -1;  // adversary's choice; -1 at depth k
    double hd_weight = 0.0;
    PolicyString hd_string;
    struct Edge {
      ObsId z;
      double weight;
      int child;
    };
    std::vector<Edge> children;
  };

  std::vector<Node> nodes;
  std::map<ObsId, int> roots;  // one per initial observation with O(s0, z) > 0
  int num_obs = 0;
  int num_actions = 0;
};

DerivedDtmc build_derived_dtmc(const Pomdp& model, const BoundedUntilSpec& spec,
                               const Adversary& adv);

struct Evidence {
  PolicyString word;
  double mass = 0.0;
};

/// Best-first enumeration of root-to-h_d paths in non-increasing mass order
/// (exact on the acyclic chain; ties broken lexicographically); returns the
/// first path whose word is not skipped, or nothing when exhausted.
std::optional<Evidence> strongest_evidence(const DerivedDtmc& dtmc,
                                           const std::function<bool(const PolicyString&)>& skip);

/// All positive-mass h_d paths, sorted by (mass desc, word lex asc).
std::vector<Evidence> enumerate_evidence(const DerivedDtmc& dtmc);

/// True iff every action in the word equals the adversary's choice on the
/// corresponding history prefix (the strongest-evidence skip rule).
bool fully_consistent_with(const Adversary& adv, const PolicyString& y);

/// Deterministic graph text of the derived chain, for debugging.
std::string to_dot(const DerivedDtmc& dtmc, const Pomdp& model);

}  // namespace zasyn
