#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zasyn {

using StateId = int;
using ActionId = int;
using ObsId = int;

inline constexpr double kProbTolerance = 1e-9;

/// One supervisor-alphabet symbol: an observation paired with the action
/// taken after seeing it. Ordering is observation-major, action-minor.
struct Symbol {
  ObsId z = 0;
  ActionId a = 0;

  auto operator<=>(const Symbol&) const = default;
};

/// A word over the (observation, action) alphabet. Encodes a history
/// together with the action chosen after each observation.
using PolicyString = std::vector<Symbol>;

/// Length-then-lexicographic order, used for every "shortest string" rule.
struct ShortLexLess {
  bool operator()(const PolicyString& x, const PolicyString& y) const {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  }
};

inline bool is_prefix_of(const PolicyString& pre, const PolicyString& full) {
  if (pre.size() > full.size()) return false;
  return std::equal(pre.begin(), pre.end(), full.begin());
}

/// Single-digit coding of a symbol (1-based, observation-major), available
/// whenever the alphabet has at most nine symbols.
inline int symbol_digit(const Symbol& sym, int num_actions) {
  return sym.z * num_actions + sym.a + 1;
}

std::string format_symbol(const Symbol& sym, int num_actions, int num_obs);
std::string format_policy_string(const PolicyString& y, int num_actions, int num_obs);

/// Parses either the digit coding ("124") or explicit "z:a,z:a" pairs with
/// 1-based indices. Throws std::invalid_argument on malformed input.
PolicyString parse_policy_string(const std::string& text, int num_actions, int num_obs);

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace zasyn
