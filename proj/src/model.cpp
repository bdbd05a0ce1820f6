#include "zasyn/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace zasyn {

std::vector<double> Pomdp::effective_row(StateId s, ActionId a) const {
  if (transition[s][a]) return *transition[s][a];
  std::vector<double> row(states.size(), 0.0);
  row[s] = 1.0;
  return row;
}

std::vector<std::string> validate(const Pomdp& model) {
  std::vector<std::string> violations;
  auto report = [&](const std::string& msg) { violations.push_back(msg); };

  if (model.initial < 0 || model.initial >= model.num_states()) {
    report("initial state index out of range");
    return violations;
  }

  for (StateId s = 0; s < model.num_states(); ++s) {
    for (ActionId a = 0; a < model.num_actions(); ++a) {
      if (!model.transition[s][a]) continue;
      const auto& row = *model.transition[s][a];
      double sum = 0.0;
      bool any_positive = false;
      for (StateId t = 0; t < model.num_states(); ++t) {
        double v = row[t];
        if (v < -kProbTolerance || v > 1.0 + kProbTolerance) {
          std::ostringstream out;
          out << "T entry (" << model.states[s] << "," << model.actions[a] << ","
              << model.states[t] << ") = " << v << " outside [0,1]";
          report(out.str());
        }
        if (v > 0.0) any_positive = true;
        sum += v;
      }
      if (any_positive && std::abs(sum - 1.0) > kProbTolerance) {
        std::ostringstream out;
        out << "T row (" << model.states[s] << "," << model.actions[a] << ") sums to " << sum;
        report(out.str());
      }
    }

    double osum = 0.0;
    for (ObsId z = 0; z < model.num_observations(); ++z) {
      double v = model.observation_fn[s][z];
      if (v < -kProbTolerance || v > 1.0 + kProbTolerance) {
        std::ostringstream out;
        out << "O entry (" << model.states[s] << "," << model.observations[z] << ") = " << v
            << " outside [0,1]";
        report(out.str());
      }
      osum += v;
    }
    if (std::abs(osum - 1.0) > kProbTolerance) {
      std::ostringstream out;
      out << "O row " << model.states[s] << " sums to " << osum;
      report(out.str());
    }

    for (const auto& ap : model.labels[s]) {
      if (!model.atomic_props.count(ap)) {
        report("label \"" + ap + "\" on " + model.states[s] +
               " is not in the declared atomic proposition set");
      }
    }
  }
  return violations;
}

Pomdp make_absorbing(const Pomdp& model, const StateFormula& phi1, const StateFormula& phi2) {
  Pomdp out = model;
  for (StateId s = 0; s < model.num_states(); ++s) {
    if (!model.satisfies(s, phi1) || model.satisfies(s, phi2)) {
      std::vector<double> self(model.num_states(), 0.0);
      self[s] = 1.0;
      for (ActionId a = 0; a < model.num_actions(); ++a) {
        out.transition[s][a] = self;
      }
    }
  }
  return out;
}

double Belief::mass_where(const Pomdp& model, const StateFormula& f) const {
  double total = 0.0;
  for (StateId s = 0; s < static_cast<int>(p.size()); ++s) {
    if (p[s] > 0.0 && model.satisfies(s, f)) total += p[s];
  }
  return total;
}

void Belief::normalize() {
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (sum <= 0.0) return;
  for (double& v : p) v /= sum;
}

Belief dirac_belief(int num_states, StateId s) {
  Belief b;
  b.p.assign(num_states, 0.0);
  b.p[s] = 1.0;
  return b;
}

std::pair<Belief, double> belief_update(const Belief& b, ActionId a, ObsId z,
                                        const Pomdp& model) {
  const int n = model.num_states();
  Belief post;
  post.p.assign(n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    if (b.p[s] <= 0.0) continue;
    const auto row = model.effective_row(s, a);
    for (StateId t = 0; t < n; ++t) {
      if (row[t] > 0.0) post.p[t] += b.p[s] * row[t];
    }
  }
  double evidence = 0.0;
  for (StateId t = 0; t < n; ++t) {
    post.p[t] *= model.observation_fn[t][z];
    evidence += post.p[t];
  }
  if (evidence <= 0.0) {
    post.p.assign(n, 0.0);
    return {post, 0.0};
  }
  for (double& v : post.p) v /= evidence;
  return {post, evidence};
}

PolicyString History::symbols() const {
  PolicyString word;
  if (steps.empty()) return word;
  if (!initial_observation) {
    throw std::logic_error("history with steps but no initial observation has no word form");
  }
  ObsId z = *initial_observation;
  for (const auto& [a, next_z] : steps) {
    word.push_back({z, a});
    z = next_z;
  }
  return word;
}

std::string format_history(const History& h, const Pomdp& model) {
  std::ostringstream out;
  out << (h.initial_observation ? model.observations[*h.initial_observation] : "Init");
  for (const auto& [a, z] : h.steps) {
    out << " " << model.actions[a] << " " << model.observations[z];
  }
  return out.str();
}

double cylinder_probability(const Pomdp& model, const std::vector<StateId>& path,
                            const History& obs, const std::vector<ActionId>& actions) {
  if (path.empty()) throw std::invalid_argument("empty path");
  if (actions.size() + 1 != path.size() || obs.steps.size() != actions.size()) {
    throw std::invalid_argument("path, observation and action lengths are inconsistent");
  }
  for (StateId s : path) {
    if (s < 0 || s >= model.num_states()) throw std::invalid_argument("unknown state id");
  }
  if (path.size() == 1) return 1.0;  // zero transitions: the whole space

  double prob = 1.0;
  if (obs.initial_observation) {
    ObsId z0 = *obs.initial_observation;
    if (z0 < 0 || z0 >= model.num_observations()) throw std::invalid_argument("unknown observation");
    prob *= model.observation_fn[path[0]][z0];
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    ActionId a = actions[i];
    if (a < 0 || a >= model.num_actions()) throw std::invalid_argument("unknown action id");
    if (obs.steps[i].first != a) {
      throw std::invalid_argument("history actions disagree with the action sequence");
    }
    ObsId z = obs.steps[i].second;
    if (z < 0 || z >= model.num_observations()) throw std::invalid_argument("unknown observation");
    const auto row = model.effective_row(path[i], a);
    prob *= row[path[i + 1]] * model.observation_fn[path[i + 1]][z];
    if (prob == 0.0) return 0.0;
  }
  return prob;
}

}  // namespace zasyn
