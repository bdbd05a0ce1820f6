#include "zasyn/exact.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

#include "zasyn/simulate.hpp"

namespace zasyn {

EnabledFn all_actions_enabled(const Pomdp& model) {
  std::vector<ActionId> all(model.num_actions());
  std::iota(all.begin(), all.end(), 0);
  return [all](const History&) { return all; };
}

EnabledFn supervisor_enabled(const ZaDfa& dfa) {
  return [dfa](const History& h) { return enabled_actions(dfa, h); };
}

namespace {

struct DpContext {
  const Pomdp& absorbing;
  const BoundedUntilSpec& spec;
  OptMode mode;
  const EnabledFn& enabled;
  std::size_t budget;
  std::size_t nodes = 0;
  Adversary adversary;
};

double dp_value(DpContext& ctx, const History& h, const Belief& belief, int depth) {
  if (++ctx.nodes > ctx.budget) {
    throw ResourceError("belief-tree size exceeds the exact-checker budget; "
                        "use the Monte-Carlo engine for horizons this deep");
  }
  if (depth == ctx.spec.horizon) {
    return belief.mass_where(ctx.absorbing, *ctx.spec.phi2);
  }
  const auto actions = ctx.enabled(h);
  if (actions.empty()) {
    throw BlockingError("no enabled action at a reachable history of depth " +
                            std::to_string(depth),
                        h);
  }
  double best = 0.0;
  ActionId best_action = -1;
  for (ActionId a : actions) {
    double value = 0.0;
    for (ObsId z = 0; z < ctx.absorbing.num_observations(); ++z) {
      auto [post, evidence] = belief_update(belief, a, z, ctx.absorbing);
      if (evidence <= 0.0) continue;
      value += evidence * dp_value(ctx, h.extended(a, z), post, depth + 1);
    }
    const bool better = best_action < 0 || (ctx.mode == OptMode::Max ? value > best : value < best);
    if (better) {
      best = value;
      best_action = a;
    }
  }
  ctx.adversary[h] = best_action;
  return best;
}

}  // namespace

OptimalResult optimal_value(const Pomdp& model, const BoundedUntilSpec& spec, OptMode mode,
                            const EnabledFn& enabled, const ExactLimits& limits) {
  Pomdp absorbing = make_absorbing(model, *spec.phi1, *spec.phi2);
  DpContext ctx{absorbing, spec, mode, enabled, limits.max_nodes, 0, {}};

  OptimalResult result;
  bool first = true;
  for (ObsId z0 = 0; z0 < model.num_observations(); ++z0) {
    if (model.observation_fn[model.initial][z0] <= 0.0) continue;
    History root{z0, {}};
    double v = dp_value(ctx, root, dirac_belief(model.num_states(), model.initial), 0);
    result.branch_values[z0] = v;
    if (first || (mode == OptMode::Max ? v > result.value : v < result.value)) {
      result.value = v;
      first = false;
    }
  }
  result.adversary = std::move(ctx.adversary);
  return result;
}

double policy_string_value(const Pomdp& model, const BoundedUntilSpec& spec,
                           const PolicyString& y) {
  const int n = model.num_states();
  if (model.satisfies(model.initial, *spec.phi2)) return 1.0;
  if (!model.satisfies(model.initial, *spec.phi1)) return 0.0;

  PolicyString word = y;
  if (static_cast<int>(word.size()) > spec.horizon) word.resize(spec.horizon);
  if (word.empty()) return 0.0;
  if (model.observation_fn[model.initial][word[0].z] <= 0.0) return 0.0;

  std::vector<double> mass(n, 0.0);
  mass[model.initial] = 1.0;
  double absorbed = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i > 0) {
      // The i-th observation gates the still-live mass; the first one is
      // carried unweighted.
      for (StateId s = 0; s < n; ++s) mass[s] *= model.observation_fn[s][word[i].z];
    }
    std::vector<double> next(n, 0.0);
    for (StateId s = 0; s < n; ++s) {
      if (mass[s] <= 0.0) continue;
      const auto row = model.effective_row(s, word[i].a);
      for (StateId t = 0; t < n; ++t) {
        if (row[t] > 0.0) next[t] += mass[s] * row[t];
      }
    }
    for (StateId t = 0; t < n; ++t) {
      if (next[t] <= 0.0) {
        next[t] = 0.0;
        continue;
      }
      if (model.satisfies(t, *spec.phi2)) {
        absorbed += next[t];  // counts from the moment of absorption
        next[t] = 0.0;
      } else if (!model.satisfies(t, *spec.phi1)) {
        next[t] = 0.0;  // dead mass, can never reach phi2 any more
      }
    }
    mass = std::move(next);
  }
  return absorbed;
}

SupervisorCheck check_supervisor(const Pomdp& model, const ZaDfa& dfa,
                                 const BoundedUntilSpec& spec) {
  auto result = optimal_value(model, spec, OptMode::Max, supervisor_enabled(dfa));
  return {spec.accepts(result.value), result.value, std::move(result.adversary)};
}

namespace {

struct DerivedBuilder {
  const Pomdp& absorbing;
  const BoundedUntilSpec& spec;
  const Adversary& adv;
  DerivedDtmc& out;

  int build(const History& h, const Belief& belief, int depth) {
    int index = static_cast<int>(out.nodes.size());
    out.nodes.push_back({});
    {
      DerivedDtmc::Node& node = out.nodes[index];
      node.history = h;
      node.belief = belief;
      node.depth = depth;
    }
    if (depth == spec.horizon) {
      // All phi2 mass was diverted on earlier edges, so this edge is 0.
      out.nodes[index].hd_weight = belief.mass_where(absorbing, *spec.phi2);
      out.nodes[index].hd_string = h.symbols();
      return index;
    }
    auto it = adv.find(h);
    if (it == adv.end()) {
      throw std::invalid_argument("adversary undefined on reachable history");
    }
    const ActionId a = it->second;
    const int n = absorbing.num_states();

    std::vector<double> pushed(n, 0.0);
    for (StateId s = 0; s < n; ++s) {
      if (belief.p[s] <= 0.0) continue;
      const auto row = absorbing.effective_row(s, a);
      for (StateId t = 0; t < n; ++t) {
        if (row[t] > 0.0) pushed[t] += belief.p[s] * row[t];
      }
    }

    double hd = 0.0;
    std::vector<double> residual(n, 0.0);
    for (StateId t = 0; t < n; ++t) {
      if (pushed[t] <= 0.0) continue;
      if (absorbing.satisfies(t, *spec.phi2)) {
        hd += pushed[t];
      } else {
        residual[t] = pushed[t];  // includes dead !phi1 mass: it still emits
      }
    }
    {
      PolicyString hd_string = h.symbols();
      hd_string.push_back({*h.last_observation(), a});
      DerivedDtmc::Node& node = out.nodes[index];
      node.action = a;
      node.hd_weight = hd;
      node.hd_string = std::move(hd_string);
    }

    for (ObsId z = 0; z < absorbing.num_observations(); ++z) {
      double evidence = 0.0;
      Belief child;
      child.p.assign(n, 0.0);
      for (StateId t = 0; t < n; ++t) {
        if (residual[t] <= 0.0) continue;
        child.p[t] = residual[t] * absorbing.observation_fn[t][z];
        evidence += child.p[t];
      }
      if (evidence <= 0.0) continue;
      for (double& v : child.p) v /= evidence;
      int child_index = build(h.extended(a, z), child, depth + 1);
      out.nodes[index].children.push_back({z, evidence, child_index});
    }
    return index;
  }
};

}  // namespace

DerivedDtmc build_derived_dtmc(const Pomdp& model, const BoundedUntilSpec& spec,
                               const Adversary& adv) {
  if (model.satisfies(model.initial, *spec.phi2) || !model.satisfies(model.initial, *spec.phi1)) {
    throw std::invalid_argument("initial state is already absorbing; nothing to derive");
  }
  Pomdp absorbing = make_absorbing(model, *spec.phi1, *spec.phi2);
  DerivedDtmc dtmc;
  dtmc.num_obs = model.num_observations();
  dtmc.num_actions = model.num_actions();
  DerivedBuilder builder{absorbing, spec, adv, dtmc};
  for (ObsId z0 = 0; z0 < model.num_observations(); ++z0) {
    if (model.observation_fn[model.initial][z0] <= 0.0) continue;
    // Conditional semantics: each initial-observation branch has weight 1.
    dtmc.roots[z0] =
        builder.build(History{z0, {}}, dirac_belief(model.num_states(), model.initial), 0);
  }
  return dtmc;
}

namespace {

struct FrontierEntry {
  double mass;
  PolicyString word;
  int node;      // -1 when this entry is a finished h_d path
};

struct FrontierOrder {
  // Max-heap by mass, lexicographically smallest word first on ties.
  bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
    if (a.mass != b.mass) return a.mass < b.mass;
    return a.word > b.word;
  }
};

}  // namespace

std::optional<Evidence> strongest_evidence(const DerivedDtmc& dtmc,
                                           const std::function<bool(const PolicyString&)>& skip) {
  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, FrontierOrder> frontier;
  for (const auto& [z0, root] : dtmc.roots) {
    frontier.push({1.0, dtmc.nodes[root].history.symbols(), root});
  }
  while (!frontier.empty()) {
    FrontierEntry entry = frontier.top();
    frontier.pop();
    if (entry.node < 0) {
      if (!skip || !skip(entry.word)) return Evidence{entry.word, entry.mass};
      continue;
    }
    const auto& node = dtmc.nodes[entry.node];
    if (node.hd_weight > 0.0) {
      frontier.push({entry.mass * node.hd_weight, node.hd_string, -1});
    }
    for (const auto& edge : node.children) {
      if (edge.weight <= 0.0) continue;
      frontier.push({entry.mass * edge.weight, dtmc.nodes[edge.child].history.symbols(),
                     edge.child});
    }
  }
  return std::nullopt;
}

bool fully_consistent_with(const Adversary& adv, const PolicyString& y) {
  if (y.empty()) return true;
  History h{y.front().z, {}};
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto it = adv.find(h);
    if (it == adv.end() || it->second != y[i].a) return false;
    if (i + 1 < y.size()) h = h.extended(y[i].a, y[i + 1].z);
  }
  return true;
}

std::vector<Evidence> enumerate_evidence(const DerivedDtmc& dtmc) {
  std::vector<Evidence> all;
  std::function<void(int, double)> walk = [&](int index, double mass) {
    const auto& node = dtmc.nodes[index];
    if (node.hd_weight > 0.0) all.push_back({node.hd_string, mass * node.hd_weight});
    for (const auto& edge : node.children) walk(edge.child, mass * edge.weight);
  };
  for (const auto& [z0, root] : dtmc.roots) walk(root, 1.0);
  std::sort(all.begin(), all.end(), [](const Evidence& a, const Evidence& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.word < b.word;
  });
  return all;
}


std::string to_dot(const DerivedDtmc& dtmc, const Pomdp& model) {
  std::ostringstream out;
  out << "digraph derived {\n  rankdir=LR;\n  hd [shape=doublecircle];\n";
  for (std::size_t i = 0; i < dtmc.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << format_history(dtmc.nodes[i].history, model)
        << "\"];\n";
  }
  for (std::size_t i = 0; i < dtmc.nodes.size(); ++i) {
    const auto& node = dtmc.nodes[i];
    for (const auto& edge : node.children) {
      out << "  n" << i << " -> n" << edge.child << " [label=\""
          << (node.action >= 0 ? model.actions[node.action] : std::string("-")) << "/"
          << model.observations[edge.z] << " " << edge.weight << "\"];\n";
    }
    if (node.hd_weight > 0.0 || node.depth == static_cast<int>(node.history.steps.size())) {
      if (node.hd_weight > 0.0) {
        out << "  n" << i << " -> hd [label=\"" << node.hd_weight << "\"];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace zasyn
