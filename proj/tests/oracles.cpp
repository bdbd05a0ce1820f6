#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "zasyn/simulate.hpp"

namespace zasyn::testing {

Pomdp sec6_model() {
  Pomdp m;
  m.states = {"s0", "s1", "s2", "s3", "s4"};
  m.actions = {"a1", "a2", "a3"};
  m.observations = {"z1", "z2"};
  m.initial = 0;
  m.atomic_props = {"fail"};
  m.labels.assign(5, {});
  m.labels[4] = {"fail"};
  m.transition.assign(5, std::vector<std::optional<std::vector<double>>>(3, std::nullopt));
  auto row = [](std::vector<double> r) { return std::optional<std::vector<double>>(std::move(r)); };
  m.transition[0][0] = row({0, 0.9, 0, 0, 0.1});
  m.transition[0][1] = row({0, 0.1, 0, 0, 0.9});
  m.transition[0][2] = row({0, 0.1, 0, 0, 0.9});
  m.transition[1][0] = row({0, 0, 0.1, 0.9, 0});
  m.transition[1][1] = row({0, 0, 0.9, 0.1, 0});
  m.transition[1][2] = row({0, 1.0, 0, 0, 0});
  m.transition[2][0] = row({0, 0, 0, 0.1, 0.9});
  m.transition[2][1] = row({0, 0, 0, 0.9, 0.1});
  m.transition[2][2] = row({0, 0, 0, 0.1, 0.9});
  m.transition[3][0] = row({0, 0, 0, 0, 1.0});
  m.transition[3][1] = row({0, 0, 0, 0, 1.0});
  m.transition[3][2] = row({0, 0, 0, 0, 1.0});
  // s4 has no defined actions: every command is ignored there.
  m.observation_fn = {
      {0.3, 0.7}, {0.5, 0.5}, {0.2, 0.8}, {1.0, 0.0}, {0.0, 1.0},
  };
  return m;
}

BoundedUntilSpec sec6_spec() {
  return check_synthesizable(*parse_formula("P<=0.28 [ true U<=3 \"fail\" ]"));
}

PolicyString w6(const std::string& digits) { return parse_policy_string(digits, 3, 2); }

ZaDfa dfa_from_edges(int num_states, int initial, const std::vector<bool>& accepting,
                     const std::vector<Edge>& edges, int num_obs, int num_actions) {
  ZaDfa dfa;
  dfa.num_obs = num_obs;
  dfa.num_actions = num_actions;
  dfa.num_states = num_states;
  dfa.initial = initial;
  dfa.accepting = accepting;
  for (const Edge& e : edges) {
    for (int d : e.digits) {
      int idx = d - 1;
      dfa.delta[{e.from, Symbol{idx / num_actions, idx % num_actions}}] = e.to;
    }
  }
  return dfa;
}

ZaDfa sec6_fmin() {
  return dfa_from_edges(2, 0, {true, true},
                        {{0, {1, 4}, 1}, {1, {3, 6}, 1}});
}

ZaDfa sec6_f1() {
  return dfa_from_edges(2, 0, {true, false},
                        {{0, {1, 4}, 0}, {0, {2, 3, 5, 6}, 1}, {1, {1, 2, 3, 4, 5, 6}, 1}});
}

ZaDfa sec6_f2() {
  return dfa_from_edges(5, 0, {true, true, true, true, false},
                        {{0, {1, 4}, 1},
                         {0, {2, 3, 5, 6}, 4},
                         {1, {2, 3, 5, 6}, 2},
                         {1, {1, 4}, 3},
                         {2, {1, 2, 3, 4, 5, 6}, 2},
                         {3, {4, 5, 6}, 2},
                         {3, {1, 2, 3}, 4},
                         {4, {1, 2, 3, 4, 5, 6}, 4}});
}

ZaDfa sec6_f3() {
  return dfa_from_edges(4, 0, {true, true, true, false},
                        {{0, {1, 4}, 1},
                         {0, {2, 3, 5, 6}, 3},
                         {1, {2, 3, 5, 6}, 2},
                         {1, {1, 4}, 3},
                         {2, {1, 2, 3, 4, 5, 6}, 2},
                         {3, {1, 2, 3, 4, 5, 6}, 3}});
}

ZaDfa sec6_f4() {
  return dfa_from_edges(5, 0, {true, true, true, true, false},
                        {{0, {1, 4}, 1},
                         {0, {2, 3, 5, 6}, 4},
                         {1, {3, 6}, 2},
                         {1, {2, 5}, 3},
                         {1, {1, 4}, 4},
                         {2, {1, 2, 3, 4, 5, 6}, 2},
                         {3, {1, 2, 3, 5}, 2},
                         {3, {4, 6}, 4},
                         {4, {1, 2, 3, 4, 5, 6}, 4}});
}

ZaDfa sec6_f5() {
  return dfa_from_edges(5, 0, {true, true, true, true, false},
                        {{0, {1, 4}, 1},
                         {0, {2, 3, 5, 6}, 4},
                         {1, {3, 6}, 2},
                         {1, {2, 5}, 3},
                         {1, {1, 4}, 4},
                         {2, {1, 2, 3, 4, 5, 6}, 2},
                         {3, {2, 5}, 2},
                         {3, {1, 3, 4, 6}, 4},
                         {4, {1, 2, 3, 4, 5, 6}, 4}});
}

namespace {

double walk_adversary(const Pomdp& m, const BoundedUntilSpec& spec, const Adversary& adv,
                      StateId s, const History& h, int depth, double prob) {
  if (m.satisfies(s, *spec.phi2)) return prob;
  if (!m.satisfies(s, *spec.phi1)) return 0.0;
  if (depth == spec.horizon) return 0.0;
  ActionId a = adv.at(h);
  double total = 0.0;
  const auto row = m.effective_row(s, a);
  for (StateId t = 0; t < m.num_states(); ++t) {
    double p1 = prob * row[t];
    if (p1 <= 0.0) continue;
    if (m.satisfies(t, *spec.phi2)) {
      total += p1;  // absorbed on arrival; later observations are marginal
      continue;
    }
    if (!m.satisfies(t, *spec.phi1)) continue;
    for (ObsId z = 0; z < m.num_observations(); ++z) {
      double p2 = p1 * m.observation_fn[t][z];
      if (p2 > 0.0) total += walk_adversary(m, spec, adv, t, h.extended(a, z), depth + 1, p2);
    }
  }
  return total;
}

}  // namespace

double brute_adversary_value(const Pomdp& model, const BoundedUntilSpec& spec,
                             const Adversary& adv, ObsId z0) {
  if (model.satisfies(model.initial, *spec.phi2)) return 1.0;
  if (!model.satisfies(model.initial, *spec.phi1)) return 0.0;
  if (spec.horizon == 0) return 0.0;
  return walk_adversary(model, spec, adv, model.initial, History{z0, {}}, 0, 1.0);
}

namespace {

struct TodoNode {
  History h;
  std::vector<bool> support;  // states with positive mass (absorbing dynamics)
  int depth;
};

/// Enumerates every pure adversary restricted to its reachable histories on
/// one branch, evaluating each via path enumeration.
void enumerate_adversaries(const Pomdp& absorbing, const Pomdp& raw, const BoundedUntilSpec& spec,
                           std::deque<TodoNode> todo, Adversary& current, ObsId z0, OptMode mode,
                           bool& any, double& best) {
  if (todo.empty()) {
    double v = brute_adversary_value(raw, spec, current, z0);
    if (!any || (mode == OptMode::Max ? v > best : v < best)) best = v;
    any = true;
    return;
  }
  TodoNode node = todo.front();
  todo.pop_front();
  const int n = absorbing.num_states();
  for (ActionId a = 0; a < absorbing.num_actions(); ++a) {
    current[node.h] = a;
    std::deque<TodoNode> extended = todo;
    if (node.depth + 1 < spec.horizon) {
      std::vector<bool> pushed(n, false);
      for (StateId s = 0; s < n; ++s) {
        if (!node.support[s]) continue;
        const auto row = absorbing.effective_row(s, a);
        for (StateId t = 0; t < n; ++t) {
          if (row[t] > 0.0) pushed[t] = true;
        }
      }
      for (ObsId z = 0; z < absorbing.num_observations(); ++z) {
        std::vector<bool> child(n, false);
        bool reachable = false;
        for (StateId t = 0; t < n; ++t) {
          if (pushed[t] && absorbing.observation_fn[t][z] > 0.0) {
            child[t] = true;
            reachable = true;
          }
        }
        if (reachable) extended.push_back({node.h.extended(a, z), child, node.depth + 1});
      }
    }
    enumerate_adversaries(absorbing, raw, spec, std::move(extended), current, z0, mode, any, best);
  }
  current.erase(node.h);
}

}  // namespace

double brute_optimal(const Pomdp& model, const BoundedUntilSpec& spec, OptMode mode) {
  if (model.satisfies(model.initial, *spec.phi2)) return 1.0;
  if (!model.satisfies(model.initial, *spec.phi1)) return 0.0;
  Pomdp absorbing = make_absorbing(model, *spec.phi1, *spec.phi2);
  bool any_branch = false;
  double result = 0.0;
  for (ObsId z0 = 0; z0 < model.num_observations(); ++z0) {
    if (model.observation_fn[model.initial][z0] <= 0.0) continue;
    double branch_best = 0.0;
    bool any = false;
    if (spec.horizon == 0) {
      branch_best = 0.0;
      any = true;
    } else {
      Adversary current;
      std::vector<bool> support(model.num_states(), false);
      support[model.initial] = true;
      std::deque<TodoNode> todo{{History{z0, {}}, support, 0}};
      enumerate_adversaries(absorbing, model, spec, std::move(todo), current, z0, mode, any,
                            branch_best);
    }
    if (!any_branch || (mode == OptMode::Max ? branch_best > result : branch_best < result)) {
      result = branch_best;
    }
    any_branch = true;
  }
  return result;
}

namespace {

double walk_policy(const Pomdp& m, const BoundedUntilSpec& spec, const PolicyString& y,
                   StateId s, std::size_t i, double prob) {
  if (i == y.size()) return 0.0;
  ActionId a = y[i].a;
  double total = 0.0;
  const auto row = m.effective_row(s, a);
  for (StateId t = 0; t < m.num_states(); ++t) {
    double p1 = prob * row[t];
    if (p1 <= 0.0) continue;
    if (m.satisfies(t, *spec.phi2)) {
      total += p1;
      continue;
    }
    if (!m.satisfies(t, *spec.phi1)) continue;
    if (i + 1 < y.size()) {
      double p2 = p1 * m.observation_fn[t][y[i + 1].z];
      if (p2 > 0.0) total += walk_policy(m, spec, y, t, i + 1, p2);
    }
  }
  return total;
}

}  // namespace

double brute_policy_value(const Pomdp& model, const BoundedUntilSpec& spec,
                          const PolicyString& y) {
  if (model.satisfies(model.initial, *spec.phi2)) return 1.0;
  if (!model.satisfies(model.initial, *spec.phi1)) return 0.0;
  PolicyString word = y;
  if (static_cast<int>(word.size()) > spec.horizon) word.resize(spec.horizon);
  if (word.empty()) return 0.0;
  if (model.observation_fn[model.initial][word[0].z] <= 0.0) return 0.0;
  return walk_policy(model, spec, word, model.initial, 0, 1.0);
}

namespace {

double walk_uniform(const Pomdp& m, const BoundedUntilSpec& spec, const EnabledFn& enabled,
                    StateId s, const History& h, int depth) {
  if (m.satisfies(s, *spec.phi2)) return 1.0;
  if (!m.satisfies(s, *spec.phi1)) return 0.0;
  if (depth == spec.horizon) return 0.0;
  auto actions = enabled(h);
  if (actions.empty()) throw BlockingError("uniform walk blocked", h);
  double mean = 0.0;
  for (ActionId a : actions) {
    double value = 0.0;
    const auto row = m.effective_row(s, a);
    for (StateId t = 0; t < m.num_states(); ++t) {
      if (row[t] <= 0.0) continue;
      if (m.satisfies(t, *spec.phi2)) {
        value += row[t];
        continue;
      }
      if (!m.satisfies(t, *spec.phi1)) continue;
      for (ObsId z = 0; z < m.num_observations(); ++z) {
        double p = row[t] * m.observation_fn[t][z];
        if (p > 0.0) value += p * walk_uniform(m, spec, enabled, t, h.extended(a, z), depth + 1);
      }
    }
    mean += value;
  }
  return mean / static_cast<double>(actions.size());
}

}  // namespace

double brute_uniform_value(const Pomdp& model, const BoundedUntilSpec& spec,
                           const EnabledFn& enabled) {
  double total = 0.0;
  for (ObsId z0 = 0; z0 < model.num_observations(); ++z0) {
    double w = model.observation_fn[model.initial][z0];
    if (w <= 0.0) continue;
    total += w * walk_uniform(model, spec, enabled, model.initial, History{z0, {}}, 0);
  }
  return total;
}

double brute_history_probability(const Pomdp& model, const History& h) {
  // Sum of path probabilities consistent with h, actions fixed by h.
  std::function<double(StateId, std::size_t)> walk = [&](StateId s, std::size_t i) -> double {
    if (i == h.steps.size()) return 1.0;
    auto [a, z] = h.steps[i];
    double total = 0.0;
    const auto row = model.effective_row(s, a);
    for (StateId t = 0; t < model.num_states(); ++t) {
      double p = row[t] * model.observation_fn[t][z];
      if (p > 0.0) total += p * walk(t, i + 1);
    }
    return total;
  };
  // The initial observation routes but never weighs.
  return walk(model.initial, 0);
}

Pomdp random_pomdp(std::mt19937_64& rng, const RandomModelParams& params) {
  auto unit = [&] { return canonical_unit(rng); };
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(unit() * (hi - lo + 1)) % (hi - lo + 1);
  };

  Pomdp m;
  const int ns = pick(2, params.max_states);
  const int na = pick(1, params.max_actions);
  const int nz = pick(1, params.max_observations);
  for (int s = 0; s < ns; ++s) m.states.push_back("s" + std::to_string(s));
  for (int a = 0; a < na; ++a) m.actions.push_back("a" + std::to_string(a + 1));
  for (int z = 0; z < nz; ++z) m.observations.push_back("z" + std::to_string(z + 1));
  m.initial = 0;
  m.atomic_props = {"goal", "bad"};
  m.labels.assign(ns, {});
  for (int s = 1; s < ns; ++s) {
    if (unit() < 0.35) m.labels[s].insert("goal");
    else if (unit() < 0.25) m.labels[s].insert("bad");
  }
  // Make sure some goal state exists so specs are not vacuous too often.
  if (unit() < 0.9) m.labels[ns - 1].insert("goal");

  m.transition.assign(ns, std::vector<std::optional<std::vector<double>>>(na, std::nullopt));
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      if (!params.all_rows_defined && unit() < 0.15) continue;  // undefined action
      std::vector<double> row(ns, 0.0);
      double sum = 0.0;
      for (int t = 0; t < ns; ++t) {
        double w = unit() < 0.4 ? 0.0 : unit();
        row[t] = w;
        sum += w;
      }
      if (sum <= 0.0) {
        row[pick(0, ns - 1)] = 1.0;
      } else {
        for (double& v : row) v /= sum;
      }
      m.transition[s][a] = std::move(row);
    }
  }

  m.observation_fn.assign(ns, std::vector<double>(nz, 0.0));
  for (int s = 0; s < ns; ++s) {
    if (nz == 1 || unit() < 0.4) {
      m.observation_fn[s][pick(0, nz - 1)] = 1.0;
    } else {
      double sum = 0.0;
      for (int z = 0; z < nz; ++z) {
        double w = unit();
        m.observation_fn[s][z] = w;
        sum += w;
      }
      for (int z = 0; z < nz; ++z) m.observation_fn[s][z] /= sum;
    }
  }
  return m;
}

BoundedUntilSpec random_spec(std::mt19937_64& rng, int max_horizon) {
  auto unit = [&] { return canonical_unit(rng); };
  BoundedUntilSpec spec;
  spec.phi1 = unit() < 0.6 ? f_true() : f_not(f_atom("bad"));
  spec.phi2 = f_atom("goal");
  spec.horizon = 1 + static_cast<int>(unit() * max_horizon) % max_horizon;
  spec.cmp = unit() < 0.8 ? CmpOp::Le : CmpOp::Lt;
  spec.p = unit();
  return spec;
}

}  // namespace zasyn::testing
