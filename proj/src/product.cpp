#include "zasyn/product.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace zasyn {

std::string ProductMdp::state_name(int i, const Pomdp& model) const {
  const ProductState& ps = states[i];
  std::ostringstream out;
  out << model.states[ps.s];
  if (ps.z >= 0) out << model.observations[ps.z];
  out << "q" << ps.q;
  return out.str();
}

int ProductMdp::find_state(const ProductState& ps) const {
  for (int i = 0; i < static_cast<int>(states.size()); ++i) {
    if (states[i] == ps) return i;
  }
  return -1;
}

namespace {

std::vector<ProductMdp::Move> moves_from(const Pomdp& model, const ZaDfa& dfa,
                                         const ProductState& ps,
                                         std::map<ProductState, int>& index,
                                         std::vector<ProductState>& states) {
  std::vector<ProductMdp::Move> result;
  auto intern = [&](const ProductState& t) {
    auto [it, inserted] = index.try_emplace(t, static_cast<int>(states.size()));
    if (inserted) states.push_back(t);
    return it->second;
  };

  const bool at_initial = ps.z < 0;
  std::vector<ObsId> gates;
  if (at_initial) {
    for (ObsId z = 0; z < model.num_observations(); ++z) {
      if (model.observation_fn[model.initial][z] > 0.0) gates.push_back(z);
    }
  } else {
    gates.push_back(ps.z);
  }

  for (ObsId z : gates) {
    for (ActionId a = 0; a < model.num_actions(); ++a) {
      Symbol sym{z, a};
      auto q_next = dfa.step(ps.q, sym);
      if (!q_next || !dfa.accepting[*q_next]) continue;
      ProductMdp::Move move;
      move.sym = sym;
      const auto row = model.effective_row(ps.s, a);
      for (StateId t = 0; t < model.num_states(); ++t) {
        if (row[t] <= 0.0) continue;
        for (ObsId zt = 0; zt < model.num_observations(); ++zt) {
          double p = row[t] * model.observation_fn[t][zt];
          if (p <= 0.0) continue;
          move.successors.emplace_back(intern({t, zt, *q_next}), p);
        }
      }
      result.push_back(std::move(move));
    }
  }
  return result;
}

}  // namespace

ProductMdp product(const Pomdp& model, const ZaDfa& dfa) {
  if (dfa.num_obs != model.num_observations() || dfa.num_actions != model.num_actions()) {
    throw std::invalid_argument("supervisor alphabet does not match the model");
  }
  ProductMdp prod;
  prod.num_obs = model.num_observations();
  prod.num_actions = model.num_actions();

  std::map<ProductState, int> index;
  ProductState init{model.initial, -1, dfa.initial};
  index[init] = 0;
  prod.states.push_back(init);
  prod.initial_index = 0;

  // Breadth-first expansion; moves realized lazily per popped state.
  prod.first_depth.assign(1, 0);
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    const ProductState current = prod.states[i];  // expansion may reallocate
    auto moves = dfa.accepting[current.q] || current.z < 0
                     ? moves_from(model, dfa, current, index, prod.states)
                     : std::vector<ProductMdp::Move>{};
    prod.first_depth.resize(prod.states.size(), -1);
    if (static_cast<int>(prod.moves.size()) <= i) prod.moves.resize(prod.states.size());
    prod.moves[i] = std::move(moves);
    for (const auto& move : prod.moves[i]) {
      for (const auto& [j, p] : move.successors) {
        if (prod.first_depth[j] == -1) {
          prod.first_depth[j] = prod.first_depth[i] + 1;
          queue.push_back(j);
        }
      }
    }
  }
  prod.moves.resize(prod.states.size());
  prod.first_depth.resize(prod.states.size(), -1);
  return prod;
}

namespace {

/// Shortest-then-lexicographic gating string from the initial state to each
/// target, walking moves in symbol order level by level.
std::map<int, PolicyString> shortest_gating_strings(const ProductMdp& prod, int max_len) {
  std::map<int, PolicyString> best;
  std::map<int, PolicyString> frontier{{prod.initial_index, {}}};
  best[prod.initial_index] = {};
  for (int depth = 0; depth < max_len && !frontier.empty(); ++depth) {
    std::map<int, PolicyString> next;
    for (const auto& [i, word] : frontier) {
      for (const auto& move : prod.moves[i]) {
        PolicyString extended = word;
        extended.push_back(move.sym);
        for (const auto& [j, p] : move.successors) {
          if (best.count(j)) continue;  // reached strictly earlier
          auto it = next.find(j);
          if (it == next.end() || extended < it->second) next[j] = extended;
        }
      }
    }
    for (const auto& [j, word] : next) best[j] = word;
    frontier = std::move(next);
  }
  return best;
}

}  // namespace

std::optional<BlockedReport> nonblocking_check(const ProductMdp& prod, int k) {
  std::vector<int> blocked;
  for (int i = 0; i < static_cast<int>(prod.states.size()); ++i) {
    if (prod.first_depth[i] < 0 || prod.first_depth[i] >= k) continue;
    if (prod.moves[i].empty()) blocked.push_back(i);
  }
  if (blocked.empty()) return std::nullopt;

  auto gating = shortest_gating_strings(prod, k);
  BlockedReport report;
  report.blocked_states = blocked;
  ShortLexLess less;
  for (int i : blocked) {
    const PolicyString& word = gating.at(i);
    if (report.state_index < 0 || less(word, report.gating_string) ||
        (word == report.gating_string && i < report.state_index)) {
      report.state_index = i;
      report.gating_string = word;
    }
  }
  return report;
}

std::set<PolicyString> dark_state_pruning(const ProductMdp& prod, int k) {
  const int n = static_cast<int>(prod.states.size());
  auto needs_moves = [&](int i) { return prod.first_depth[i] >= 0 && prod.first_depth[i] < k; };

  // Remove the transitions into dark states; a state turns dark once every
  // remaining branch of every move is gone.
  std::vector<bool> dark(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (dark[i] || !needs_moves(i)) continue;
      bool any_edge = false;
      for (const auto& move : prod.moves[i]) {
        for (const auto& [j, p] : move.successors) {
          if (!dark[j]) {
            any_edge = true;
            break;
          }
        }
        if (any_edge) break;
      }
      if (!any_edge) {
        dark[i] = true;
        changed = true;
      }
    }
  }

  // First-entry traces into the dark set over the original moves.
  std::set<PolicyString> strings;
  struct Frame {
    int state;
    PolicyString word;
  };
  std::deque<Frame> queue{{prod.initial_index, {}}};
  while (!queue.empty()) {
    Frame f = queue.front();
    queue.pop_front();
    if (static_cast<int>(f.word.size()) >= k) continue;
    for (const auto& move : prod.moves[f.state]) {
      PolicyString extended = f.word;
      extended.push_back(move.sym);
      bool enters_dark = false;
      for (const auto& [j, p] : move.successors) {
        if (dark[j]) enters_dark = true;
      }
      // Entering a dark state right at the horizon is harmless: no further
      // action will ever be needed there.
      if (enters_dark && static_cast<int>(extended.size()) < k) strings.insert(extended);
      for (const auto& [j, p] : move.successors) {
        if (!dark[j]) queue.push_back({j, extended});
      }
    }
  }
  return strings;
}

std::string to_dot(const ProductMdp& prod, const Pomdp& model) {
  std::ostringstream out;
  out << "digraph product {\n  rankdir=LR;\n";
  for (int i = 0; i < static_cast<int>(prod.states.size()); ++i) {
    out << "  n" << i << " [label=\"" << prod.state_name(i, model) << "\"];\n";
  }
  for (int i = 0; i < static_cast<int>(prod.states.size()); ++i) {
    for (const auto& move : prod.moves[i]) {
      for (const auto& [j, p] : move.successors) {
        out << "  n" << i << " -> n" << j << " [label=\""
            << model.observations[move.sym.z] << "/" << model.actions[move.sym.a] << " " << p
            << "\"];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace zasyn
