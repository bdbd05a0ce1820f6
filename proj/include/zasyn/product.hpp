#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zasyn/model.hpp"
#include "zasyn/types.hpp"
#include "zasyn/za_dfa.hpp"

namespace zasyn {

/// State of the parallel composition. The initial state carries no
/// observation component (z = -1): its outgoing moves are gated by the
/// first symbol's observation instead.
struct ProductState {
  StateId s = 0;
  ObsId z = -1;
  int q = 0;

  auto operator<=>(const ProductState&) const = default;
};

/// Regulated behavior of the POMDP under a supervisor. Transitions landing
/// in non-accepting DFA states are omitted. Rows may be sub-stochastic.
struct ProductMdp {
  struct Move {
    Symbol sym;  // sym.z is the gating observation, sym.a the action
    std::vector<std::pair<int, double>> successors;
  };

  std::vector<ProductState> states;
  int initial_index = 0;
  std::vector<std::vector<Move>> moves;
  std::vector<int> first_depth;  // BFS distance from the initial state

  int num_obs = 0;
  int num_actions = 0;

  std::string state_name(int i, const Pomdp& model) const;
  int find_state(const ProductState& ps) const;
};

ProductMdp product(const Pomdp& model, const ZaDfa& dfa);

struct BlockedReport {
  int state_index = -1;          // representative blocked state
  PolicyString gating_string;    // shortest, then lexicographic
  std::vector<int> blocked_states;
};

/// Breadth-first reachability check for the finite horizon: every state
/// first reached at depth < k must have an outgoing move; states first
/// reached exactly at depth k are exempt.
std::optional<BlockedReport> nonblocking_check(const ProductMdp& prod, int k);

/// Iteratively marks transition-free reachable states dark, removes every
/// (state, action) row with a branch into a dark state, and repeats to a
/// fixpoint. Returns the deduplicated gating strings of depth-<=k traces
/// ending with a transition into a dark state.
std::set<PolicyString> dark_state_pruning(const ProductMdp& prod, int k);

std::string to_dot(const ProductMdp& prod, const Pomdp& model);

}  // namespace zasyn
