#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zasyn/types.hpp"
#include "zasyn/za_dfa.hpp"

namespace zasyn {

/// Truth of "this word can stand in the supervisor's language"; total on
/// all words. Callers cache it (one model check per query).
using MembershipFn = std::function<bool(const PolicyString&)>;

/// Classic observation table (Y, E, G). Y is prefix-closed, E suffix-closed,
/// both in insertion order with epsilon first; bits are pulled through the
/// membership function on demand.
struct ObservationTable {
  int num_obs = 0;
  int num_actions = 0;
  std::vector<PolicyString> access;    // Y
  std::vector<PolicyString> suffixes;  // E

  ObservationTable() = default;
  ObservationTable(int nz, int na);

  int alphabet_size() const { return num_obs * num_actions; }
  Symbol symbol_at(int index) const {
    return {index / num_actions, index % num_actions};
  }

  bool contains_access(const PolicyString& y) const;
  std::vector<bool> row(const PolicyString& y, const MembershipFn& member) const;

  /// Row labels in display order: Y, then Y*Sigma without the Y members.
  std::vector<PolicyString> row_labels() const;
};

/// Closure witness y1*alpha whose row matches no Y row, scanning Y in
/// insertion order and symbols ascending; nullopt when closed.
std::optional<PolicyString> find_unclosed(const ObservationTable& t, const MembershipFn& member);

/// Consistency witness alpha*e for the first equal-row pair of Y that
/// disagrees on some extension, scanning pairs in insertion order, then
/// suffixes in insertion order, then symbols ascending; nullopt when
/// consistent.
std::optional<PolicyString> find_inconsistent(const ObservationTable& t,
                                              const MembershipFn& member);

struct ExtendStats {
  int closure_fixes = 0;
  int consistency_fixes = 0;
};

/// Alternates closure and consistency fixes until both hold.
ExtendStats extend(ObservationTable& t, const MembershipFn& member);

/// Acceptor of a closed and consistent table: states are the distinct row
/// functions of Y, accepting iff the epsilon column is 1. Throws
/// std::logic_error otherwise.
ZaDfa make_acceptor(const ObservationTable& t, const MembershipFn& member);

/// Adds y and all its prefixes to Y, then re-extends.
ExtendStats add_counterexample(ObservationTable& t, const PolicyString& y,
                               const MembershipFn& member);

/// Text grid of the table (rows by labels, one column per suffix).
std::string to_text(const ObservationTable& t, const MembershipFn& member);

/// Full bit matrix keyed by row label, for monotone-falsification audits.
std::vector<std::pair<PolicyString, std::vector<bool>>> table_bits(const ObservationTable& t,
                                                                   const MembershipFn& member);

}  // namespace zasyn
