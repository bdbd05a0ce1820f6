#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zasyn/pctl.hpp"
#include "zasyn/types.hpp"

namespace zasyn {

/// Finite POMDP with dense indices. Ids are strings only in files.
struct Pomdp {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  StateId initial = 0;
  /// transition[s][a] is the probability row over successor states, or
  /// absent when the action is not defined at s. Issuing an undefined
  /// action leaves the state unchanged (the command is ignored).
  std::vector<std::vector<std::optional<std::vector<double>>>> transition;
  std::vector<std::vector<double>> observation_fn;  // [state][observation]
  std::vector<std::set<std::string>> labels;
  std::set<std::string> atomic_props;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
  int num_observations() const { return static_cast<int>(observations.size()); }

  bool has_row(StateId s, ActionId a) const {
    return transition[s][a].has_value();
  }

  /// Defined row, or the Dirac self-loop for an ignored command.
  std::vector<double> effective_row(StateId s, ActionId a) const;

  bool satisfies(StateId s, const StateFormula& f) const {
    return eval_state_formula(f, labels[s]);
  }
};

/// Empty list iff all well-formedness invariants hold; each violation names
/// the offending row and its residual.
std::vector<std::string> validate(const Pomdp& model);

/// Copy of the model in which every state with s |= !phi1 or s |= phi2
/// self-loops with probability 1 under every action.
Pomdp make_absorbing(const Pomdp& model, const StateFormula& phi1, const StateFormula& phi2);

struct Belief {
  std::vector<double> p;

  double mass_where(const Pomdp& model, const StateFormula& f) const;
  void normalize();
};

Belief dirac_belief(int num_states, StateId s);

/// One Bayes-filter step. Returns the normalized posterior and the
/// pre-normalization evidence; evidence 0 yields an empty belief and is a
/// legal result (impossible observation branch).
std::pair<Belief, double> belief_update(const Belief& b, ActionId a, ObsId z, const Pomdp& model);

/// Observation-action history. initial_observation is absent when the run
/// starts from the synthetic known-initial-state observation, in which case
/// it carries no probability weight anywhere.
struct History {
  std::optional<ObsId> initial_observation;
  std::vector<std::pair<ActionId, ObsId>> steps;

  auto operator<=>(const History&) const = default;

  History extended(ActionId a, ObsId z) const {
    History h = *this;
    h.steps.emplace_back(a, z);
    return h;
  }

  /// Observation preceding the next action: the last step's observation,
  /// or the initial one for an empty history.
  std::optional<ObsId> last_observation() const {
    if (!steps.empty()) return steps.back().second;
    return initial_observation;
  }

  /// The (observation, action) word this history spells, one symbol per
  /// action taken. Requires an initial observation when steps exist.
  PolicyString symbols() const;
};

std::string format_history(const History& h, const Pomdp& model);

/// Deterministic history-to-action map (a pure observation-based adversary
/// restricted to the histories it was computed on).
using Adversary = std::map<History, ActionId>;

/// Measure of the basic cylinder set of a finite path with its observation
/// sequence. The leading observation factor is 1 when the history starts
/// with the synthetic initial observation.
double cylinder_probability(const Pomdp& model, const std::vector<StateId>& path,
                            const History& obs, const std::vector<ActionId>& actions);

/// Plain DTMC; rows may be sub-stochastic (blocked mass).
struct Dtmc {
  std::vector<std::string> states;
  int initial = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<std::set<std::string>> labels;
};

}  // namespace zasyn
