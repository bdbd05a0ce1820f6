#include "zasyn/learner.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace zasyn {

ObservationTable::ObservationTable(int nz, int na) : num_obs(nz), num_actions(na) {
  access.push_back({});    // epsilon
  suffixes.push_back({});  // epsilon
}

bool ObservationTable::contains_access(const PolicyString& y) const {
  return std::find(access.begin(), access.end(), y) != access.end();
}

std::vector<bool> ObservationTable::row(const PolicyString& y, const MembershipFn& member) const {
  std::vector<bool> bits;
  bits.reserve(suffixes.size());
  for (const PolicyString& e : suffixes) {
    PolicyString word = y;
    word.insert(word.end(), e.begin(), e.end());
    bits.push_back(member(word));
  }
  return bits;
}

std::vector<PolicyString> ObservationTable::row_labels() const {
  std::vector<PolicyString> labels = access;
  for (const PolicyString& y : access) {
    for (int i = 0; i < alphabet_size(); ++i) {
      PolicyString extended = y;
      extended.push_back(symbol_at(i));
      if (!contains_access(extended)) labels.push_back(extended);
    }
  }
  return labels;
}

std::optional<PolicyString> find_unclosed(const ObservationTable& t, const MembershipFn& member) {
  std::vector<std::vector<bool>> y_rows;
  y_rows.reserve(t.access.size());
  for (const PolicyString& y : t.access) y_rows.push_back(t.row(y, member));

  for (const PolicyString& y : t.access) {
    for (int i = 0; i < t.alphabet_size(); ++i) {
      PolicyString extended = y;
      extended.push_back(t.symbol_at(i));
      if (t.contains_access(extended)) continue;
      auto row = t.row(extended, member);
      if (std::find(y_rows.begin(), y_rows.end(), row) == y_rows.end()) return extended;
    }
  }
  return std::nullopt;
}

std::optional<PolicyString> find_inconsistent(const ObservationTable& t,
                                              const MembershipFn& member) {
  std::vector<std::vector<bool>> y_rows;
  y_rows.reserve(t.access.size());
  for (const PolicyString& y : t.access) y_rows.push_back(t.row(y, member));

  for (std::size_t i = 0; i < t.access.size(); ++i) {
    for (std::size_t j = i + 1; j < t.access.size(); ++j) {
      if (y_rows[i] != y_rows[j]) continue;
      for (const PolicyString& e : t.suffixes) {
        for (int s = 0; s < t.alphabet_size(); ++s) {
          Symbol alpha = t.symbol_at(s);
          PolicyString wi = t.access[i];
          wi.push_back(alpha);
          wi.insert(wi.end(), e.begin(), e.end());
          PolicyString wj = t.access[j];
          wj.push_back(alpha);
          wj.insert(wj.end(), e.begin(), e.end());
          if (member(wi) != member(wj)) {
            PolicyString suffix{alpha};
            suffix.insert(suffix.end(), e.begin(), e.end());
            return suffix;
          }
        }
      }
    }
  }
  return std::nullopt;
}

ExtendStats extend(ObservationTable& t, const MembershipFn& member) {
  ExtendStats stats;
  for (;;) {
    if (auto witness = find_unclosed(t, member)) {
      t.access.push_back(*witness);
      ++stats.closure_fixes;
      continue;
    }
    if (auto suffix = find_inconsistent(t, member)) {
      t.suffixes.push_back(*suffix);
      ++stats.consistency_fixes;
      continue;
    }
    return stats;
  }
}

ZaDfa make_acceptor(const ObservationTable& t, const MembershipFn& member) {
  if (find_unclosed(t, member)) throw std::logic_error("observation table is not closed");
  if (find_inconsistent(t, member)) throw std::logic_error("observation table is not consistent");

  std::map<std::vector<bool>, int> state_of_row;
  std::vector<const PolicyString*> representative;
  for (const PolicyString& y : t.access) {
    auto row = t.row(y, member);
    auto [it, inserted] = state_of_row.try_emplace(row, static_cast<int>(state_of_row.size()));
    if (inserted) representative.push_back(&y);
  }

  ZaDfa dfa;
  dfa.num_obs = t.num_obs;
  dfa.num_actions = t.num_actions;
  dfa.num_states = static_cast<int>(state_of_row.size());
  dfa.initial = state_of_row.at(t.row(t.access.front(), member));
  dfa.accepting.assign(dfa.num_states, false);
  for (const auto& [row, q] : state_of_row) {
    dfa.accepting[q] = row.front();  // the epsilon column
  }
  for (int q = 0; q < dfa.num_states; ++q) {
    const PolicyString& rep = *representative[q];
    for (int i = 0; i < t.alphabet_size(); ++i) {
      PolicyString extended = rep;
      extended.push_back(t.symbol_at(i));
      auto it = state_of_row.find(t.row(extended, member));
      if (it == state_of_row.end()) throw std::logic_error("closedness violated in acceptor");
      dfa.delta[{q, t.symbol_at(i)}] = it->second;
    }
  }
  return dfa;
}

ExtendStats add_counterexample(ObservationTable& t, const PolicyString& y,
                               const MembershipFn& member) {
  for (std::size_t len = 1; len <= y.size(); ++len) {
    PolicyString prefix(y.begin(), y.begin() + static_cast<long>(len));
    if (!t.contains_access(prefix)) t.access.push_back(prefix);
  }
  return extend(t, member);
}

std::string to_text(const ObservationTable& t, const MembershipFn& member) {
  std::ostringstream out;
  auto fmt = [&](const PolicyString& y) {
    return format_policy_string(y, t.num_actions, t.num_obs);
  };
  out << "G";
  for (const PolicyString& e : t.suffixes) out << "\t" << fmt(e);
  out << "\n";
  auto labels = t.row_labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i == t.access.size()) out << "----\n";
    out << fmt(labels[i]);
    for (bool bit : t.row(labels[i], member)) out << "\t" << (bit ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

std::vector<std::pair<PolicyString, std::vector<bool>>> table_bits(const ObservationTable& t,
                                                                   const MembershipFn& member) {
  std::vector<std::pair<PolicyString, std::vector<bool>>> bits;
  for (const PolicyString& label : t.row_labels()) {
    bits.emplace_back(label, t.row(label, member));
  }
  return bits;
}

}  // namespace zasyn
