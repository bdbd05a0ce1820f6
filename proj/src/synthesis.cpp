#include "zasyn/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>

#include "zasyn/json_io.hpp"
#include "zasyn/simulate.hpp"

#include <nlohmann/json.hpp>

namespace zasyn {

namespace {

bool log_enabled() {
  static const bool on = [] {
    const char* v = std::getenv("ZASYN_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
  }();
  return on;
}

PolicyString truncated(const PolicyString& y, int k) {
  if (static_cast<int>(y.size()) <= k) return y;
  return PolicyString(y.begin(), y.begin() + k);
}

}  // namespace

bool CexSets::bans(const PolicyString& y) const {
  for (std::size_t len = 1; len <= y.size(); ++len) {
    PolicyString prefix(y.begin(), y.begin() + static_cast<long>(len));
    if (blocking.count(prefix) || violation.count(prefix)) return true;
  }
  return false;
}

MembershipOracle::MembershipOracle(const Pomdp& model, const BoundedUntilSpec& spec,
                                   const CexSets& cex)
    : model_(model), spec_(spec), cex_(cex) {}

bool MembershipOracle::query(const PolicyString& y) {
  PolicyString key = truncated(y, spec_.horizon);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  ++queries_;
  bool result;
  if (cex_.bans(key)) {
    result = false;
  } else {
    result = spec_.accepts(policy_string_value(model_, spec_, key));
  }
  cache_.emplace(std::move(key), result);
  return result;
}

MembershipFn MembershipOracle::as_fn() {
  return [this](const PolicyString& y) { return query(y); };
}

void MembershipOracle::invalidate_banned() {
  for (auto& [key, value] : cache_) {
    if (value && cex_.bans(key)) value = false;
    // Bans only accumulate, so a cached false can never turn true again;
    // there is nothing to re-enable here by construction.
  }
}

Preprocess preprocess(const Pomdp& model, const BoundedUntilSpec& spec) {
  auto max_result = optimal_value(model, spec, OptMode::Max, all_actions_enabled(model));
  auto min_result = optimal_value(model, spec, OptMode::Min, all_actions_enabled(model));
  Preprocess out;
  out.p_max = max_result.value;
  // A supervisor has to serve every initial-observation branch, so the
  // realizability value is the minimizing adversary's worst branch: only
  // when that still meets the bound does every word of sigma_min pass the
  // membership test the learner relies on.
  out.p_min = min_result.value;
  for (const auto& [z0, v] : min_result.branch_values) out.p_min = std::max(out.p_min, v);
  out.sigma_max = std::move(max_result.adversary);
  out.sigma_min = std::move(min_result.adversary);
  if (spec.accepts(out.p_max)) {
    out.kind = PreprocessKind::TriviallyAll;
    out.shortcut = ZaDfa::trivial_full(model.num_observations(), model.num_actions());
  } else if (!spec.accepts(out.p_min)) {
    out.kind = PreprocessKind::Unrealizable;
    out.shortcut = ZaDfa::empty_supervisor(model.num_observations(), model.num_actions());
  } else {
    out.kind = PreprocessKind::Continue;
  }
  return out;
}

std::optional<PositiveCex> oracle_p(const ZaDfa& dfa, const Adversary& sigma_min,
                                    const Pomdp& model, const BoundedUntilSpec& spec) {
  auto words = adversary_words(sigma_min, model, *spec.phi1, *spec.phi2, spec.horizon);
  std::optional<PolicyString> best;
  ShortLexLess less;
  for (const PolicyString& word : words) {
    if (dfa.accepts(word)) continue;
    if (!best || less(word, *best)) best = word;
  }
  if (!best) return std::nullopt;
  return PositiveCex{*best};
}

OracleBResult oracle_b(const Pomdp& model, const ZaDfa& dfa, const BoundedUntilSpec& spec,
                       const ObservationTable& table, const CexSets& cex) {
  const int k = spec.horizon;
  ProductMdp prod = product(make_absorbing(model, *spec.phi1, *spec.phi2), dfa);
  auto report = nonblocking_check(prod, k);
  OracleBResult result;
  if (!report) {
    result.kind = OracleBResult::Kind::Pass;
    return result;
  }
  if (!table.contains_access(report->gating_string)) {
    // The learner conjectured before ever asking about this row; force the
    // row into the table instead of banning anything.
    result.kind = OracleBResult::Kind::Table;
    result.word = report->gating_string;
    return result;
  }
  result.kind = OracleBResult::Kind::Negative;
  result.new_blocking = dark_state_pruning(prod, k);
  ShortLexLess less;
  std::optional<PolicyString> best;
  auto consider = [&](const PolicyString& w) {
    if (!best || less(w, *best)) best = w;
  };
  for (const auto& w : cex.blocking) consider(w);
  for (const auto& w : result.new_blocking) consider(w);
  if (!best) {
    // A blocked state at depth < k always contributes its own first-entry
    // trace, so an empty candidate set means the caller's invariants broke.
    throw std::logic_error("dark-state pruning produced no gating strings");
  }
  result.word = *best;
  return result;
}

OracleSResult oracle_s(const Pomdp& model, const ZaDfa& dfa, const BoundedUntilSpec& spec,
                       const Adversary& sigma_min) {
  OracleSResult result;
  auto check = check_supervisor(model, dfa, spec);
  result.p_c = check.p_c;
  result.witness = check.witness;
  if (check.satisfied) {
    result.pass = true;
    return result;
  }
  auto derived = build_derived_dtmc(model, spec, check.witness);
  auto evidence = strongest_evidence(
      derived, [&](const PolicyString& w) { return fully_consistent_with(sigma_min, w); });
  if (!evidence) {
    // Every violating path agrees with sigma_min everywhere, yet sigma_min
    // satisfies the spec per preprocessing; this cannot happen.
    throw std::logic_error("strongest-evidence search exhausted all violating paths");
  }
  result.cex = NegativeCex{evidence->word, evidence->mass};
  return result;
}

namespace {

struct BitAudit {
  // (row label, suffix) -> bit; suffixes only grow, so keys are stable.
  std::map<std::pair<PolicyString, PolicyString>, bool> bits;

  void absorb(const ObservationTable& table, const MembershipFn& member) {
    for (const auto& label : table.row_labels()) {
      auto row = table.row(label, member);
      for (std::size_t e = 0; e < table.suffixes.size(); ++e) {
        auto key = std::make_pair(label, table.suffixes[e]);
        auto it = bits.find(key);
        if (it != bits.end() && !it->second && row[e]) {
          throw std::logic_error("monotone falsification violated: a table entry flipped 0 -> 1");
        }
        bits[key] = row[e];
      }
    }
  }
};

std::string fmt_word(const PolicyString& y, const Pomdp& model) {
  return format_policy_string(y, model.num_actions(), model.num_observations());
}

std::vector<std::string> fmt_set(const std::set<PolicyString>& words, const Pomdp& model) {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(fmt_word(w, model));
  std::sort(out.begin(), out.end());
  return out;
}

void emit_trace(std::ostream* stream, const IterationRecord& rec) {
  if (!stream) return;
  *stream << iteration_record_to_json(rec).dump() << "\n";
}

}  // namespace

SynthesisResult synthesize(const Pomdp& model, const BoundedUntilSpec& spec,
                           const SynthesisConfig& cfg) {
  {
    auto violations = validate(model);
    if (!violations.empty()) {
      throw std::invalid_argument("model fails validation: " + violations.front());
    }
  }

  SynthesisResult result;
  auto pre = preprocess(model, spec);
  result.p_min = pre.p_min;
  result.p_max = pre.p_max;
  if (pre.kind == PreprocessKind::TriviallyAll) {
    result.outcome = Outcome::TriviallyAll;
    result.supervisor = pre.shortcut;
    result.p_final = pre.p_max;
    result.iterations = 0;
    return result;
  }
  if (pre.kind == PreprocessKind::Unrealizable) {
    result.outcome = Outcome::Unrealizable;
    result.supervisor = pre.shortcut;
    result.p_final = pre.p_min;
    result.iterations = 0;
    return result;
  }

  const int sigma = model.num_observations() * model.num_actions();
  std::uint64_t budget;
  if (cfg.iteration_budget) {
    budget = *cfg.iteration_budget;
  } else {
    double b = 2.0 * std::pow(static_cast<double>(sigma), spec.horizon);
    budget = b > 1e7 ? static_cast<std::uint64_t>(1e7) : static_cast<std::uint64_t>(b);
  }

  MembershipOracle membership(model, spec, result.cex);
  MembershipFn member = membership.as_fn();
  ObservationTable table(model.num_observations(), model.num_actions());
  BitAudit audit;

  for (std::uint64_t iter = 1; iter <= budget; ++iter) {
    extend(table, member);
    audit.absorb(table, member);
    ZaDfa dfa = make_acceptor(table, member);

    IterationRecord rec;
    rec.iteration = static_cast<int>(iter);
    rec.acceptor_states = dfa.num_states;
    rec.acceptor_accepting =
        static_cast<int>(std::count(dfa.accepting.begin(), dfa.accepting.end(), true));
    rec.c_b = fmt_set(result.cex.blocking, model);
    rec.c_s = fmt_set(result.cex.violation, model);

    if (auto positive = oracle_p(dfa, pre.sigma_min, model, spec)) {
      rec.oracle = "p";
      rec.counterexample = fmt_word(positive->word, model);
      if (log_enabled()) {
        std::cerr << "[zasyn] iteration " << iter << ": positive counterexample "
                  << rec.counterexample << "\n";
      }
      result.trace.push_back(rec);
      emit_trace(cfg.trace_stream, rec);
      add_counterexample(table, positive->word, member);
      continue;
    }

    auto blocking = oracle_b(model, dfa, spec, table, result.cex);
    if (blocking.kind == OracleBResult::Kind::Table) {
      rec.oracle = "b-table";
      rec.counterexample = fmt_word(blocking.word, model);
      result.trace.push_back(rec);
      emit_trace(cfg.trace_stream, rec);
      add_counterexample(table, blocking.word, member);
      continue;
    }
    if (blocking.kind == OracleBResult::Kind::Negative) {
      result.cex.blocking.insert(blocking.new_blocking.begin(), blocking.new_blocking.end());
      membership.invalidate_banned();
      rec.oracle = "b";
      rec.counterexample = fmt_word(blocking.word, model);
      rec.c_b = fmt_set(result.cex.blocking, model);
      if (log_enabled()) {
        std::cerr << "[zasyn] iteration " << iter << ": blocking counterexample "
                  << rec.counterexample << "\n";
      }
      result.trace.push_back(rec);
      emit_trace(cfg.trace_stream, rec);
      add_counterexample(table, blocking.word, member);
      continue;
    }

    // OracleS. The Monte-Carlo engine substitutes the estimated value when
    // it is clearly away from the threshold: clear violations extract the
    // counterexample from the greedy search tree, clear passes are still
    // confirmed exactly (the loop's exit condition stays exact), and
    // near-threshold estimates defer to the exact checker entirely.
    OracleSResult verdict;
    bool resolved = false;
    if (cfg.engine == Engine::Pomcp) {
      PomcpConfig pomcp_cfg = cfg.pomcp;
      pomcp_cfg.seed = cfg.pomcp.seed + iter;  // fresh but reproducible per iteration
      auto estimate = estimate_max(model, spec, supervisor_enabled(dfa), pomcp_cfg);
      if (std::abs(estimate.p_hat - spec.p) > cfg.pomcp_margin && !spec.accepts(estimate.p_hat)) {
        try {
          auto derived = build_derived_dtmc(model, spec, estimate.greedy);
          auto evidence = strongest_evidence(derived, [&](const PolicyString& w) {
            return fully_consistent_with(pre.sigma_min, w);
          });
          if (evidence) {
            verdict.pass = false;
            verdict.p_c = estimate.p_hat;
            verdict.witness = estimate.greedy;
            verdict.cex = NegativeCex{evidence->word, evidence->mass};
            resolved = true;
          }
        } catch (const std::invalid_argument&) {
          // Greedy tree not total on the reachable histories; use the exact
          // witness below.
        }
      }
    }
    if (!resolved) {
      verdict = oracle_s(model, dfa, spec, pre.sigma_min);
    }
    rec.oracle_s_value = verdict.p_c;
    if (verdict.pass) {
      // Soundness audit: independent non-blocking and threshold re-check.
      auto prod = product(make_absorbing(model, *spec.phi1, *spec.phi2), dfa);
      if (nonblocking_check(prod, spec.horizon)) {
        throw std::logic_error("supervisor outcome failed the non-blocking audit");
      }
      if (!spec.accepts(verdict.p_c)) {
        throw std::logic_error("supervisor outcome failed the threshold audit");
      }
      if (oracle_p(dfa, pre.sigma_min, model, spec)) {
        throw std::logic_error("supervisor outcome lost a sigma_min word");
      }
      rec.oracle = "pass";
      result.trace.push_back(rec);
      emit_trace(cfg.trace_stream, rec);
      result.outcome = Outcome::Supervisor;
      result.supervisor = prune_rejecting(dfa);
      result.p_final = verdict.p_c;
      result.iterations = static_cast<int>(iter);
      return result;
    }

    result.cex.violation.insert(verdict.cex->word);
    membership.invalidate_banned();
    rec.oracle = "s";
    rec.counterexample = fmt_word(verdict.cex->word, model);
    rec.evidence = verdict.cex->evidence;
    rec.c_s = fmt_set(result.cex.violation, model);
    if (log_enabled()) {
      std::cerr << "[zasyn] iteration " << iter << ": violation counterexample "
                << rec.counterexample << " (evidence " << rec.evidence << ", p_c " << verdict.p_c
                << ")\n";
    }
    result.trace.push_back(rec);
    emit_trace(cfg.trace_stream, rec);
    add_counterexample(table, verdict.cex->word, member);
  }

  result.outcome = Outcome::BudgetExhausted;
  result.supervisor = ZaDfa::empty_supervisor(model.num_observations(), model.num_actions());
  result.iterations = static_cast<int>(budget);
  return result;
}

}  // namespace zasyn
