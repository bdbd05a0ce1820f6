#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "zasyn/exact.hpp"
#include "zasyn/learner.hpp"
#include "zasyn/model.hpp"
#include "zasyn/pomcp.hpp"
#include "zasyn/product.hpp"

namespace zasyn {

/// Negative-counterexample stores; both only ever grow.
struct CexSets {
  std::set<PolicyString> blocking;   // C_B
  std::set<PolicyString> violation;  // C_S

  bool bans(const PolicyString& y) const;  // some prefix of y is stored
};

/// Cached membership semantics: a word is in the language iff no prefix is
/// banned and the k-truncated policy value satisfies the threshold.
class MembershipOracle {
 public:
  MembershipOracle(const Pomdp& model, const BoundedUntilSpec& spec, const CexSets& cex);

  bool query(const PolicyString& y);
  MembershipFn as_fn();

  /// Re-forces cached entries whose prefix entered the cex sets to false.
  /// Asserts the falsification is monotone (no 0 -> 1 flip ever happens).
  void invalidate_banned();

  int query_count() const { return queries_; }

 private:
  const Pomdp& model_;
  const BoundedUntilSpec& spec_;
  const CexSets& cex_;
  std::map<PolicyString, bool> cache_;  // keyed by the k-truncated word
  int queries_ = 0;
};

enum class PreprocessKind { Continue, TriviallyAll, Unrealizable };

struct Preprocess {
  PreprocessKind kind = PreprocessKind::Continue;
  double p_min = 0.0;
  double p_max = 0.0;
  Adversary sigma_min;
  Adversary sigma_max;
  ZaDfa shortcut;  // trivial_full / empty_supervisor on the early exits
};

Preprocess preprocess(const Pomdp& model, const BoundedUntilSpec& spec);

struct PositiveCex {
  PolicyString word;
};
struct TableCex {
  PolicyString word;
};
struct NegativeCex {
  PolicyString word;
  double evidence = 0.0;  // strongest-evidence mass, when it came from OracleS
};

using OraclePVerdict = std::optional<PositiveCex>;
std::optional<PositiveCex> oracle_p(const ZaDfa& dfa, const Adversary& sigma_min,
                                    const Pomdp& model, const BoundedUntilSpec& spec);

struct OracleBResult {
  enum class Kind { Pass, Table, Negative } kind = Kind::Pass;
  PolicyString word;
  std::set<PolicyString> new_blocking;  // C_b, on the Negative branch
};

/// Non-blocking conjecture check on the absorbing product (where the
/// histories are the ones membership values and the minimizing adversary
/// reason about).
OracleBResult oracle_b(const Pomdp& model, const ZaDfa& dfa, const BoundedUntilSpec& spec,
                       const ObservationTable& table, const CexSets& cex);

struct OracleSResult {
  bool pass = false;
  double p_c = 0.0;
  std::optional<NegativeCex> cex;
  Adversary witness;
};

OracleSResult oracle_s(const Pomdp& model, const ZaDfa& dfa, const BoundedUntilSpec& spec,
                       const Adversary& sigma_min);

enum class Engine { Exact, Pomcp };

struct SynthesisConfig {
  Engine engine = Engine::Exact;
  PomcpConfig pomcp;
  /// Estimates within this margin of the threshold defer to the exact
  /// checker.
  double pomcp_margin = 0.05;
  std::optional<std::uint64_t> iteration_budget;  // default 2 * |Sigma|^k
  std::ostream* trace_stream = nullptr;           // JSON lines, one per iteration
};

enum class Outcome { Supervisor, TriviallyAll, Unrealizable, BudgetExhausted };

struct IterationRecord {
  int iteration = 0;
  int acceptor_states = 0;
  int acceptor_accepting = 0;
  std::string oracle;           // "p" | "b" | "s" | "pass"
  std::string counterexample;   // digit/z-a coding; empty on the final pass
  double oracle_s_value = -1.0; // p_c when OracleS ran
  double evidence = -1.0;
  std::vector<std::string> c_b;
  std::vector<std::string> c_s;
};

struct SynthesisResult {
  Outcome outcome = Outcome::Unrealizable;
  ZaDfa supervisor;       // pruned of rejecting sinks on Supervisor outcomes
  double p_final = 0.0;
  int iterations = 0;     // conjectures asked, the final passing one included
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<IterationRecord> trace;
  CexSets cex;
};

/// Full learning loop: preprocessing, then per iteration
/// extend -> acceptor -> OracleP -> OracleB -> OracleS, refining on
/// negative counterexamples, until the triple pass or the budget trips.
SynthesisResult synthesize(const Pomdp& model, const BoundedUntilSpec& spec,
                           const SynthesisConfig& cfg = {});

}  // namespace zasyn
