#include "zasyn/za_dfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace zasyn {

bool ZaDfa::accepts(const PolicyString& word) const {
  int q = initial;
  if (!accepting[q]) return false;
  for (const Symbol& sym : word) {
    auto next = step(q, sym);
    if (!next || !accepting[*next]) return false;
    q = *next;
  }
  return true;
}

std::optional<int> ZaDfa::route(const History& h) const {
  int q = initial;
  if (!accepting[q]) return std::nullopt;
  if (h.steps.empty()) return q;
  for (const Symbol& sym : h.symbols()) {
    auto next = step(q, sym);
    if (!next || !accepting[*next]) return std::nullopt;
    q = *next;
  }
  return q;
}

ZaDfa ZaDfa::trivial_full(int num_obs, int num_actions) {
  ZaDfa dfa;
  dfa.num_obs = num_obs;
  dfa.num_actions = num_actions;
  dfa.num_states = 1;
  dfa.initial = 0;
  dfa.accepting = {true};
  for (ObsId z = 0; z < num_obs; ++z) {
    for (ActionId a = 0; a < num_actions; ++a) {
      dfa.delta[{0, Symbol{z, a}}] = 0;
    }
  }
  return dfa;
}

ZaDfa ZaDfa::empty_supervisor(int num_obs, int num_actions) {
  ZaDfa dfa;
  dfa.num_obs = num_obs;
  dfa.num_actions = num_actions;
  dfa.num_states = 1;
  dfa.initial = 0;
  dfa.accepting = {true};
  return dfa;
}

ZaDfa from_policy_string(const PolicyString& y, int num_obs, int num_actions) {
  ZaDfa dfa;
  dfa.num_obs = num_obs;
  dfa.num_actions = num_actions;
  dfa.num_states = static_cast<int>(y.size()) + 1;
  dfa.initial = 0;
  dfa.accepting.assign(dfa.num_states, true);
  for (std::size_t i = 0; i < y.size(); ++i) {
    dfa.delta[{static_cast<int>(i), y[i]}] = static_cast<int>(i) + 1;
  }
  return dfa;
}

std::vector<ActionId> enabled_actions(const ZaDfa& dfa, const History& h) {
  std::vector<ActionId> enabled;
  auto q = dfa.route(h);
  if (!q) return enabled;
  auto z = h.last_observation();
  if (!z) return enabled;
  for (ActionId a = 0; a < dfa.num_actions; ++a) {
    auto next = dfa.step(*q, Symbol{*z, a});
    if (next && dfa.accepting[*next]) enabled.push_back(a);
  }
  return enabled;
}

ZaDfa prune_rejecting(const ZaDfa& dfa) {
  // Keep accepting states reachable through accepting states.
  std::vector<int> remap(dfa.num_states, -1);
  ZaDfa out;
  out.num_obs = dfa.num_obs;
  out.num_actions = dfa.num_actions;
  if (!dfa.accepting[dfa.initial]) {
    // Degenerate supervisor with an empty language; keep a lone state so
    // the automaton stays well-formed.
    out.num_states = 1;
    out.initial = 0;
    out.accepting = {false};
    return out;
  }
  std::deque<int> queue{dfa.initial};
  remap[dfa.initial] = 0;
  int next_id = 1;
  std::vector<int> order{dfa.initial};
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (ObsId z = 0; z < dfa.num_obs; ++z) {
      for (ActionId a = 0; a < dfa.num_actions; ++a) {
        auto t = dfa.step(q, Symbol{z, a});
        if (!t || !dfa.accepting[*t] || remap[*t] != -1) continue;
        remap[*t] = next_id++;
        order.push_back(*t);
        queue.push_back(*t);
      }
    }
  }
  out.num_states = next_id;
  out.initial = 0;
  out.accepting.assign(next_id, true);
  for (int q : order) {
    for (const auto& [key, target] : dfa.delta) {
      if (key.first != q) continue;
      if (remap[target] == -1) continue;
      out.delta[{remap[q], key.second}] = remap[target];
    }
  }
  return out;
}

bool language_equivalent_up_to(const ZaDfa& a, const ZaDfa& b, int max_len) {
  if (a.num_obs != b.num_obs || a.num_actions != b.num_actions) return false;
  // Joint BFS over reachable (qa, qb) pairs, tracking acceptance through
  // accepting states only. nullopt marks the rejected sink.
  using Pair = std::pair<std::optional<int>, std::optional<int>>;
  std::map<Pair, int> seen;
  std::deque<std::pair<Pair, int>> queue;
  auto norm = [](const ZaDfa& d, std::optional<int> q, Symbol sym) -> std::optional<int> {
    if (!q) return std::nullopt;
    auto t = d.step(*q, sym);
    if (!t || !d.accepting[*t]) return std::nullopt;
    return t;
  };
  std::optional<int> ia = a.accepting[a.initial] ? std::optional<int>(a.initial) : std::nullopt;
  std::optional<int> ib = b.accepting[b.initial] ? std::optional<int>(b.initial) : std::nullopt;
  if (ia.has_value() != ib.has_value()) return false;
  queue.push_back({{ia, ib}, 0});
  seen[{ia, ib}] = 0;
  while (!queue.empty()) {
    auto [pair, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_len) continue;
    for (ObsId z = 0; z < a.num_obs; ++z) {
      for (ActionId act = 0; act < a.num_actions; ++act) {
        Symbol sym{z, act};
        Pair next{norm(a, pair.first, sym), norm(b, pair.second, sym)};
        if (next.first.has_value() != next.second.has_value()) return false;
        if (!next.first.has_value()) continue;
        auto it = seen.find(next);
        if (it != seen.end() && it->second <= depth + 1) continue;
        seen[next] = depth + 1;
        queue.push_back({next, depth + 1});
      }
    }
  }
  return true;
}

std::string to_dot(const ZaDfa& dfa, const DotOptions& opts) {
  std::ostringstream out;
  out << "digraph za_dfa {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (int q = 0; q < dfa.num_states; ++q) {
    out << "  q" << q << " [shape=" << (dfa.accepting[q] ? "doublecircle" : "circle") << "];\n";
  }
  out << "  __start -> q" << dfa.initial << ";\n";
  // Merge parallel edges; symbol order gives deterministic labels.
  std::map<std::pair<int, int>, std::vector<Symbol>> edges;
  for (const auto& [key, target] : dfa.delta) {
    edges[{key.first, target}].push_back(key.second);
  }
  auto label_of = [&](Symbol sym) -> std::string {
    if (opts.digit_legend && dfa.num_obs * dfa.num_actions <= 9) {
      return std::to_string(symbol_digit(sym, dfa.num_actions));
    }
    std::string z = sym.z < static_cast<int>(opts.observation_names.size())
                        ? opts.observation_names[sym.z]
                        : "z" + std::to_string(sym.z + 1);
    std::string a = sym.a < static_cast<int>(opts.action_names.size())
                        ? opts.action_names[sym.a]
                        : "a" + std::to_string(sym.a + 1);
    return z + "/" + a;
  };
  for (const auto& [edge, symbols] : edges) {
    out << "  q" << edge.first << " -> q" << edge.second << " [label=\"";
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i > 0) out << ",";
      out << label_of(symbols[i]);
    }
    out << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

// Reachable history-action words of the adversary within the horizon, on
// the absorbing dynamics it was computed for.
void collect_adversary_words(const Adversary& adv, const Pomdp& absorbing, const History& h,
                             const Belief& b, int depth, int horizon,
                             std::vector<PolicyString>& words) {
  if (depth >= horizon) return;
  auto it = adv.find(h);
  if (it == adv.end()) return;
  ActionId a = it->second;
  PolicyString word = h.symbols();
  word.push_back({*h.last_observation(), a});
  words.push_back(word);
  for (ObsId z = 0; z < absorbing.num_observations(); ++z) {
    auto [post, evidence] = belief_update(b, a, z, absorbing);
    if (evidence <= 0.0) continue;
    collect_adversary_words(adv, absorbing, h.extended(a, z), post, depth + 1, horizon, words);
  }
}

}  // namespace

std::vector<PolicyString> adversary_words(const Adversary& adv, const Pomdp& model,
                                          const StateFormula& phi1, const StateFormula& phi2,
                                          int horizon) {
  Pomdp absorbing = make_absorbing(model, phi1, phi2);
  std::vector<PolicyString> words;
  for (ObsId z0 = 0; z0 < model.num_observations(); ++z0) {
    if (model.observation_fn[model.initial][z0] <= 0.0) continue;
    History root{z0, {}};
    collect_adversary_words(adv, absorbing, root, dirac_belief(model.num_states(), model.initial),
                            0, horizon, words);
  }
  return words;
}

ZaDfa adversary_to_dfa(const Adversary& adv, const Pomdp& model, const StateFormula& phi1,
                       const StateFormula& phi2, int horizon, bool merge_equivalent) {
  std::vector<PolicyString> words = adversary_words(adv, model, phi1, phi2, horizon);

  // Prefix tree over the collected words; every node accepts.
  ZaDfa dfa;
  dfa.num_obs = model.num_observations();
  dfa.num_actions = model.num_actions();
  dfa.num_states = 1;
  dfa.initial = 0;
  dfa.accepting = {true};
  for (const PolicyString& word : words) {
    int q = 0;
    for (const Symbol& sym : word) {
      auto next = dfa.step(q, sym);
      if (next) {
        q = *next;
        continue;
      }
      dfa.delta[{q, sym}] = dfa.num_states;
      q = dfa.num_states++;
      dfa.accepting.push_back(true);
    }
  }
  if (!merge_equivalent) return dfa;

  // Partition refinement on (acceptance, successor classes).
  std::vector<int> cls(dfa.num_states, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::vector<int>, int> signature_class;
    std::vector<int> next_cls(dfa.num_states);
    for (int q = 0; q < dfa.num_states; ++q) {
      std::vector<int> sig{cls[q]};
      for (ObsId z = 0; z < dfa.num_obs; ++z) {
        for (ActionId a = 0; a < dfa.num_actions; ++a) {
          auto t = dfa.step(q, Symbol{z, a});
          sig.push_back(t ? cls[*t] : -1);
        }
      }
      auto [it, inserted] = signature_class.try_emplace(sig, static_cast<int>(signature_class.size()));
      next_cls[q] = it->second;
    }
    if (next_cls != cls) {
      cls = next_cls;
      changed = true;
    }
  }
  int num_classes = *std::max_element(cls.begin(), cls.end()) + 1;
  ZaDfa merged;
  merged.num_obs = dfa.num_obs;
  merged.num_actions = dfa.num_actions;
  merged.num_states = num_classes;
  merged.initial = cls[dfa.initial];
  merged.accepting.assign(num_classes, true);
  for (const auto& [key, target] : dfa.delta) {
    merged.delta[{cls[key.first], key.second}] = cls[target];
  }
  return merged;
}

}  // namespace zasyn
