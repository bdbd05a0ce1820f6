#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "zasyn/exact.hpp"
#include "zasyn/model.hpp"

namespace zasyn {

struct PomcpConfig {
  int n_simulations = 100'000;
  double ucb_c = 1.0;
  std::uint64_t seed = 0;
  double n_init = 0.0;
  double v_init = 0.0;
  /// When set, one "simulation,running_value" line per episode.
  std::ostream* convergence_csv = nullptr;
};

struct PomcpResult {
  double p_hat = 0.0;
  /// Greedy action per visited tree node (argmax of the value estimate,
  /// ties toward the lowest index).
  Adversary greedy;
};

/// Monte-Carlo tree search on the absorbing model: UCB1 selection over the
/// enabled actions inside the tree, uniform rollouts beyond it, terminal
/// reward at depth k equal to the phi2 mass of the exactly-propagated
/// belief of the simulated history. Single-threaded and bit-reproducible
/// for a fixed seed.
PomcpResult estimate_max(const Pomdp& model, const BoundedUntilSpec& spec,
                         const EnabledFn& enabled, const PomcpConfig& cfg);

/// Same search with negated terminal rewards; returns -V(root).
PomcpResult estimate_min(const Pomdp& model, const BoundedUntilSpec& spec,
                         const EnabledFn& enabled, const PomcpConfig& cfg);

/// Visited histories and their particle sets, for support audits.
struct PomcpAudit {
  std::vector<std::pair<History, std::vector<StateId>>> particles;
};

PomcpResult estimate_max_audited(const Pomdp& model, const BoundedUntilSpec& spec,
                                 const EnabledFn& enabled, const PomcpConfig& cfg,
                                 PomcpAudit* audit);

}  // namespace zasyn
