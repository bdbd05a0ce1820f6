#include "zasyn/pomcp.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "zasyn/simulate.hpp"

namespace zasyn {

namespace {

struct TreeNode {
  double n = 0.0;  // N(h)
  std::vector<ActionId> enabled;
  std::vector<double> n_a;
  std::vector<double> v_a;
  std::vector<StateId> particles;  // B(h)
};

struct Search {
  const Pomdp& absorbing;
  const BoundedUntilSpec& spec;
  const EnabledFn& enabled;
  const PomcpConfig& cfg;
  double sign;  // +1 estimates the max, -1 the min
  std::mt19937_64 rng;
  std::map<History, TreeNode> tree;

  double leaf(const Belief& belief) const {
    return sign * belief.mass_where(absorbing, *spec.phi2);
  }

  std::pair<StateId, ObsId> generate(StateId s, ActionId a) {
    StateId t = sample_index(absorbing.effective_row(s, a), rng);
    ObsId z = sample_index(absorbing.observation_fn[t], rng);
    return {t, z};
  }

  std::vector<ActionId> enabled_or_throw(const History& h, int depth) {
    auto actions = enabled(h);
    if (actions.empty()) {
      throw BlockingError("no enabled action during simulation at depth " + std::to_string(depth),
                          h);
    }
    return actions;
  }

  double rollout(StateId s, const History& h, const Belief& belief, int depth) {
    if (depth > spec.horizon) return 0.0;
    if (depth == spec.horizon) return leaf(belief);
    auto actions = enabled_or_throw(h, depth);
    ActionId a = actions[static_cast<std::size_t>(canonical_unit(rng) * actions.size()) %
                         actions.size()];
    auto [t, z] = generate(s, a);
    auto [post, evidence] = belief_update(belief, a, z, absorbing);
    return rollout(t, h.extended(a, z), post, depth + 1);
  }

  double simulate(StateId s, const History& h, const Belief& belief, int depth) {
    if (depth > spec.horizon) return 0.0;
    if (depth == spec.horizon) return leaf(belief);

    auto it = tree.find(h);
    if (it == tree.end()) {
      TreeNode node;
      node.enabled = enabled_or_throw(h, depth);
      node.n_a.assign(node.enabled.size(), cfg.n_init);
      node.v_a.assign(node.enabled.size(), cfg.v_init);
      node.n = cfg.n_init * static_cast<double>(node.enabled.size());
      tree.emplace(h, std::move(node));
      return rollout(s, h, belief, depth);
    }

    TreeNode& node = it->second;
    int pick = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(node.enabled.size()); ++i) {
      double ucb;
      if (node.n_a[i] <= 0.0) {
        ucb = std::numeric_limits<double>::infinity();
      } else {
        ucb = node.v_a[i] +
              cfg.ucb_c * std::sqrt(std::log(std::max(1.0, node.n)) / node.n_a[i]);
      }
      if (ucb > best) {
        best = ucb;
        pick = i;
      }
    }
    ActionId a = node.enabled[pick];
    auto [t, z] = generate(s, a);
    auto [post, evidence] = belief_update(belief, a, z, absorbing);
    double reward = simulate(t, h.extended(a, z), post, depth + 1);

    // The iterator stays valid: descendants only insert other keys.
    TreeNode& updated = tree.find(h)->second;
    updated.particles.push_back(s);
    updated.n += 1.0;
    updated.n_a[pick] += 1.0;
    updated.v_a[pick] += (reward - updated.v_a[pick]) / updated.n_a[pick];
    return reward;
  }
};

PomcpResult run(const Pomdp& model, const BoundedUntilSpec& spec, const EnabledFn& enabled,
                const PomcpConfig& cfg, double sign, PomcpAudit* audit) {
  if (cfg.n_simulations < 1) throw std::invalid_argument("n_simulations must be at least 1");
  if (cfg.ucb_c < 0.0) throw std::invalid_argument("the exploration constant must be non-negative");
  Pomdp absorbing = make_absorbing(model, *spec.phi1, *spec.phi2);
  Search search{absorbing, spec, enabled, cfg, sign, std::mt19937_64(cfg.seed), {}};

  const Belief root_belief = dirac_belief(model.num_states(), model.initial);
  double mean_return = 0.0;
  for (int i = 0; i < cfg.n_simulations; ++i) {
    ObsId z0 = sample_index(model.observation_fn[model.initial], search.rng);
    double reward = search.simulate(model.initial, History{z0, {}}, root_belief, 0);
    mean_return += (reward - mean_return) / static_cast<double>(i + 1);
    if (cfg.convergence_csv) {
      *cfg.convergence_csv << i + 1 << "," << sign * mean_return << "\n";
    }
  }

  PomcpResult result;
  result.p_hat = sign * mean_return;
  if (result.p_hat == 0.0) result.p_hat = 0.0;  // normalize -0
  for (const auto& [h, node] : search.tree) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(node.enabled.size()); ++i) {
      if (node.v_a[i] > node.v_a[best]) best = i;
    }
    result.greedy[h] = node.enabled[best];
  }
  if (audit) {
    for (const auto& [h, node] : search.tree) {
      audit->particles.emplace_back(h, node.particles);
    }
  }
  return result;
}

}  // namespace

PomcpResult estimate_max(const Pomdp& model, const BoundedUntilSpec& spec,
                         const EnabledFn& enabled, const PomcpConfig& cfg) {
  return run(model, spec, enabled, cfg, +1.0, nullptr);
}

PomcpResult estimate_min(const Pomdp& model, const BoundedUntilSpec& spec,
                         const EnabledFn& enabled, const PomcpConfig& cfg) {
  return run(model, spec, enabled, cfg, -1.0, nullptr);
}

PomcpResult estimate_max_audited(const Pomdp& model, const BoundedUntilSpec& spec,
                                 const EnabledFn& enabled, const PomcpConfig& cfg,
                                 PomcpAudit* audit) {
  return run(model, spec, enabled, cfg, +1.0, audit);
}

}  // namespace zasyn
