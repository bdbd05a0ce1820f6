#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zasyn/model.hpp"
#include "zasyn/types.hpp"

namespace zasyn {

/// Deterministic finite automaton over (observation, action) symbols whose
/// prefix-closed accepted language encodes which actions a supervisor
/// enables after each history. Missing transitions mean "disabled"; the
/// effective language runs through accepting states only.
struct ZaDfa {
  int num_obs = 0;
  int num_actions = 0;
  int num_states = 0;
  int initial = 0;
  std::vector<bool> accepting;
  std::map<std::pair<int, Symbol>, int> delta;

  std::optional<int> step(int q, Symbol sym) const {
    auto it = delta.find({q, sym});
    if (it == delta.end()) return std::nullopt;
    return it->second;
  }

  /// Membership in the effective (prefix-closed) language: every visited
  /// state, start to end, must be accepting.
  bool accepts(const PolicyString& word) const;

  /// DFA state after consuming the history's symbols through accepting
  /// states only; nullopt when the history is not allowed.
  std::optional<int> route(const History& h) const;

  static ZaDfa trivial_full(int num_obs, int num_actions);
  static ZaDfa empty_supervisor(int num_obs, int num_actions);
};

/// Chain automaton accepting exactly the prefixes of y.
ZaDfa from_policy_string(const PolicyString& y, int num_obs, int num_actions);

/// Actions a with delta(q_h, <last obs, a>) accepting; empty when the
/// history itself is not accepted.
std::vector<ActionId> enabled_actions(const ZaDfa& dfa, const History& h);

/// Drops states from which no accepting state is ever visited, i.e. the
/// rejecting sinks L* introduces; the effective language is unchanged.
ZaDfa prune_rejecting(const ZaDfa& dfa);

/// Exhaustive effective-language comparison on words of length <= max_len.
bool language_equivalent_up_to(const ZaDfa& a, const ZaDfa& b, int max_len);

struct DotOptions {
  std::vector<std::string> observation_names;
  std::vector<std::string> action_names;
  bool digit_legend = false;  // label edges with the 1-based digit coding
};

std::string to_dot(const ZaDfa& dfa, const DotOptions& opts = {});

/// History-action words the adversary can produce with positive probability
/// within the horizon, on the phi-absorbing dynamics it was computed for.
std::vector<PolicyString> adversary_words(const Adversary& adv, const Pomdp& model,
                                          const StateFormula& phi1, const StateFormula& phi2,
                                          int horizon);

/// Tree-shaped DFA accepting exactly the history-action words the adversary
/// can produce within the horizon (merged by language equivalence when
/// requested).
ZaDfa adversary_to_dfa(const Adversary& adv, const Pomdp& model,
                       const StateFormula& phi1, const StateFormula& phi2, int horizon,
                       bool merge_equivalent = false);

}  // namespace zasyn
