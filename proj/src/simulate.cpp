#include "zasyn/simulate.hpp"

#include <sstream>

namespace zasyn {

double canonical_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_index(const std::vector<double>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = canonical_unit(rng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;  // guards the u == total rounding edge
}

Trace simulate(const Pomdp& model, const ZaDfa& dfa, int k, std::uint64_t seed,
               const ActionPicker& picker) {
  std::mt19937_64 rng(seed);
  Trace trace;
  StateId s = model.initial;
  trace.states.push_back(s);
  History history;
  int q = dfa.initial;

  for (int i = 0; i < k; ++i) {
    ObsId z = sample_index(model.observation_fn[s], rng);
    trace.observations.push_back(z);
    if (i == 0) {
      history.initial_observation = z;
    } else {
      history.steps.emplace_back(trace.actions[i - 1], z);
    }

    std::vector<ActionId> enabled;
    for (ActionId a = 0; a < model.num_actions(); ++a) {
      auto next = dfa.step(q, Symbol{z, a});
      if (next && dfa.accepting[*next]) enabled.push_back(a);
    }
    if (enabled.empty() || !dfa.accepting[q]) {
      std::ostringstream msg;
      msg << "supervisor blocks at step " << i << " after history "
          << format_history(history, model);
      throw BlockingError(msg.str(), history);
    }

    ActionId a;
    if (picker) {
      a = picker(history, enabled, rng);
    } else {
      a = enabled[static_cast<int>(canonical_unit(rng) * enabled.size()) %
                  static_cast<int>(enabled.size())];
    }
    trace.actions.push_back(a);
    q = *dfa.step(q, Symbol{z, a});

    s = sample_index(model.effective_row(s, a), rng);
    trace.states.push_back(s);
  }
  return trace;
}

}  // namespace zasyn
