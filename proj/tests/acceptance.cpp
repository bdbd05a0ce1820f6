// Acceptance suite: one line per criterion, nonzero exit when any fails.
//
// Criterion 3 is expected to stay red on the iteration-count clause: the
// learning loop needs eight conjectures on the bundled example, not six.
// Banning 121 makes the table cell (row 12, suffix column ending in 1)
// query the banned word through horizon truncation while the sibling cell
// for row 15 queries the still-acceptable 151, so those two rows provably
// split and the loop must also eliminate 151 and 153 (each an acceptable
// single policy whose per-branch joint mass is 0.1179) before the final
// automaton, identical to the published one, passes every oracle. The
// suite asserts the count as specified and reports the measured transcript
// instead of weakening the check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "zasyn/json_io.hpp"
#include "zasyn/pomcp.hpp"
#include "zasyn/simulate.hpp"
#include "zasyn/synthesis.hpp"

using namespace zasyn;
using namespace zasyn::testing;

namespace {

int failures = 0;

struct Clause {
  std::string text;
  bool ok;
};

void report(int criterion, const std::vector<Clause>& clauses) {
  bool ok = true;
  for (const auto& c : clauses) ok = ok && c.ok;
  std::printf("criterion %d: %s\n", criterion, ok ? "PASS" : "FAIL");
  for (const auto& c : clauses) {
    std::printf("  [%s] %s\n", c.ok ? "ok" : "FAIL", c.text.c_str());
  }
  if (!ok) ++failures;
}

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

std::string fmt(const PolicyString& w) { return format_policy_string(w, 3, 2); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --- criterion 1: membership-table reproduction -----------------------------

struct TableSnapshot {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> bits;
};

TableSnapshot snapshot(const ObservationTable& table, const MembershipFn& member) {
  TableSnapshot snap;
  for (const auto& label : table.row_labels()) {
    snap.labels.push_back(fmt(label));
    std::vector<int> row;
    for (bool b : table.row(label, member)) row.push_back(b ? 1 : 0);
    snap.bits.push_back(row);
  }
  return snap;
}

void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  Pomdp m = sec6_model();
  auto spec = sec6_spec();
  CexSets cex;
  MembershipOracle oracle(m, spec, cex);
  auto member = oracle.as_fn();

  ObservationTable table(2, 3);
  extend(table, member);
  auto first = snapshot(table, member);

  const std::vector<std::string> first_labels = {"eps", "2", "1",  "3",  "4",  "5",  "6",
                                                 "21",  "22", "23", "24", "25", "26"};
  const std::vector<int> first_bits = {1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  bool first_ok = first.labels == first_labels;
  for (std::size_t i = 0; first_ok && i < first_bits.size(); ++i) {
    first_ok = first.bits[i] == std::vector<int>{first_bits[i]};
  }

  // Second iteration: incorporate the positive counterexample 13.
  auto pre = preprocess(m, spec);
  auto dfa1 = make_acceptor(table, member);
  auto p_cex = oracle_p(dfa1, pre.sigma_min, m, spec);
  bool cex_ok = p_cex.has_value() && fmt(p_cex->word) == "13";
  if (p_cex) add_counterexample(table, p_cex->word, member);
  auto second = snapshot(table, member);

  const std::vector<std::string> second_labels = {
      "eps", "2",   "1",   "13",  "11",  "3",   "4",   "5",   "6",   "21",  "22",
      "23",  "24",  "25",  "26",  "12",  "14",  "15",  "16",  "131", "132", "133",
      "134", "135", "136", "111", "112", "113", "114", "115", "116"};
  const std::vector<std::vector<int>> second_bits = {
      {1, 0, 1}, {0, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 0}, {0, 0, 0}, {1, 1, 0}, {0, 0, 0},
      {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1},
      {1, 0, 0}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1},
      {1, 1, 1}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  bool second_ok = second.labels == second_labels && table.suffixes.size() == 3;
  for (std::size_t i = 0; second_ok && i < second_bits.size(); ++i) {
    second_ok = second.bits[i] == second_bits[i];
  }
  double elapsed = seconds_since(start);

  report(1, {{"first closed/consistent table: 13 rows, boolean-exact", first_ok},
             {"positive counterexample of the first conjecture is 13", cex_ok},
             {"second-iteration table: 31 rows x 3 suffix columns, boolean-exact "
              "(distinguishing suffixes differ in name only)",
              second_ok},
             {"runtime " + std::to_string(elapsed) + " s < 5 s", elapsed < 5.0}});
}

// --- criteria 2 and 3: the full run ------------------------------------------

void criteria_2_and_3() {
  Pomdp m = sec6_model();
  auto spec = sec6_spec();
  auto result = synthesize(m, spec);

  const IterationRecord* it3 = nullptr;
  const IterationRecord* it4 = nullptr;
  for (const auto& rec : result.trace) {
    if (rec.iteration == 3) it3 = &rec;
    if (rec.iteration == 4) it4 = &rec;
  }
  bool ev3 = it3 && it3->oracle == "s" && it3->counterexample == "124" &&
             close(it3->evidence, 0.2916);
  bool ev4 = it4 && it4->oracle == "s" && it4->counterexample == "121" &&
             close(it4->evidence, 0.1179);
  report(2, {{"iteration-3 strongest evidence is 124 with mass 0.2916 (1e-9)", ev3},
             {"iteration-4 strongest evidence is 121 with mass 0.1179 (1e-9)", ev4}});

  bool outcome_ok = result.outcome == Outcome::Supervisor;
  bool lang_ok = language_equivalent_up_to(result.supervisor, sec6_f5(), 3);
  bool value_ok = close(result.p_final, 0.271) && result.p_final <= 0.28;
  bool iterations_ok = result.iterations == 6;
  std::ostringstream transcript;
  for (const auto& rec : result.trace) {
    if (!rec.counterexample.empty()) transcript << " " << rec.counterexample;
  }
  report(3, {{"outcome is a supervisor", outcome_ok},
             {"language-equivalent to the published final automaton on words of length <= 3",
              lang_ok},
             {"exact checked value 0.271 (1e-9) <= 0.28", value_ok},
             {"terminates in exactly 6 iterations; measured " +
                  std::to_string(result.iterations) + " (counterexamples:" + transcript.str() +
                  ") - the two extra good-policy eliminations 151 and 153 are forced by the "
                  "published table data itself, see the note at the top of this file",
              iterations_ok}});
}

// --- criterion 4: documented non-reproducibility ------------------------------

void criterion_4() {
  Pomdp m = sec6_model();
  auto spec = sec6_spec();
  auto pre = preprocess(m, spec);
  double brute_min = brute_optimal(m, spec, OptMode::Min);
  double brute_max = brute_optimal(m, spec, OptMode::Max);

  bool min_ok = close(pre.p_min, 0.1) && close(pre.p_min, brute_min);
  bool max_ok = close(pre.p_max, 0.999) && close(pre.p_max, brute_max);
  bool straddle = spec.accepts(pre.p_min) && !spec.accepts(pre.p_max);

  auto wit4 = check_supervisor(m, sec6_f4(), spec);
  bool wit_ok = close(wit4.p_c, 0.4006);

  report(4, {{"exact-oracle p_min = 0.1 (enumeration-confirmed), not the published 0", min_ok},
             {"exact-oracle p_max = 0.999 (enumeration-confirmed), not the published 0.96",
              max_ok},
             {"p_min <= 0.28 < p_max straddles the threshold as the workflow requires", straddle},
             {"iteration-4 witness value 0.4006 (1e-9), not the published 0.3882", wit_ok}});
  std::printf("  note: published p_min 0 vs exact %.10g (delta %.10g)\n", pre.p_min,
              pre.p_min - 0.0);
  std::printf("  note: published p_max 0.96 vs exact %.10g (delta %.10g)\n", pre.p_max,
              pre.p_max - 0.96);
  std::printf("  note: published iteration-4 witness 0.3882 vs exact %.10g (delta %.10g)\n",
              wit4.p_c, wit4.p_c - 0.3882);
}

// --- criterion 5: oracle equivalence on random instances ----------------------

void criterion_5() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260811);
  int instances = 0;
  bool optima_ok = true;
  bool policies_ok = true;
  while (instances < 200) {
    Pomdp m = random_pomdp(rng);
    BoundedUntilSpec spec = random_spec(rng);
    if (!validate(m).empty()) continue;
    ++instances;

    auto mx = optimal_value(m, spec, OptMode::Max, all_actions_enabled(m));
    auto mn = optimal_value(m, spec, OptMode::Min, all_actions_enabled(m));
    if (!close(mx.value, brute_optimal(m, spec, OptMode::Max))) optima_ok = false;
    if (!close(mn.value, brute_optimal(m, spec, OptMode::Min))) optima_ok = false;

    for (int trial = 0; trial < 4; ++trial) {
      PolicyString y;
      int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(spec.horizon));
      for (int i = 0; i < len; ++i) {
        y.push_back({static_cast<ObsId>(rng() % m.num_observations()),
                     static_cast<ActionId>(rng() % m.num_actions())});
      }
      if (!close(policy_string_value(m, spec, y), brute_policy_value(m, spec, y))) {
        policies_ok = false;
      }
    }
  }
  double elapsed = seconds_since(start);
  report(5, {{"optimal_value equals pure-adversary enumeration on 200 instances (1e-9)",
              optima_ok},
             {"policy_string_value equals direct path enumeration (1e-9)", policies_ok},
             {"runtime " + std::to_string(elapsed) + " s < 60 s", elapsed < 60.0}});
}

// --- criterion 6: monte-carlo convergence -------------------------------------

void criterion_6() {
  auto start = std::chrono::steady_clock::now();
  Pomdp m = sec6_model();
  auto spec = sec6_spec();
  auto enabled = supervisor_enabled(sec6_f5());
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PomcpConfig cfg;
    cfg.n_simulations = 200000;
    cfg.ucb_c = 1.0;
    cfg.seed = seed;
    auto est = estimate_max(m, spec, enabled, cfg);
    if (std::abs(est.p_hat - 0.271) <= 0.02) ++within;
  }
  double elapsed = seconds_since(start);
  report(6, {{"estimate within 0.02 of 0.271 for " + std::to_string(within) +
                  "/20 seeds (need 18)",
              within >= 18},
             {"runtime " + std::to_string(elapsed) + " s < 60 s", elapsed < 60.0}});
}

// --- criterion 7: property suites ---------------------------------------------

bool prefix_closed(const ZaDfa& dfa, int max_len) {
  bool ok = true;
  std::function<void(PolicyString&, bool)> walk = [&](PolicyString& w, bool parent) {
    bool accepted = dfa.accepts(w);
    if (accepted && !parent) ok = false;
    if (static_cast<int>(w.size()) == max_len || !ok) return;
    for (int z = 0; z < dfa.num_obs; ++z) {
      for (int a = 0; a < dfa.num_actions; ++a) {
        w.push_back({z, a});
        walk(w, accepted);
        w.pop_back();
      }
    }
  };
  PolicyString w;
  walk(w, true);
  return ok;
}

void criterion_7() {
  Pomdp m = sec6_model();
  auto spec = sec6_spec();

  // Replay the learning loop by hand, auditing every conjectured acceptor.
  bool closed_ok = true;
  bool monotone_ok = true;
  bool growth_ok = true;
  {
    auto pre = preprocess(m, spec);
    CexSets cex;
    MembershipOracle oracle(m, spec, cex);
    auto member = oracle.as_fn();
    ObservationTable table(2, 3);
    std::map<std::pair<std::string, std::string>, int> seen_bits;
    std::size_t last_cb = 0, last_cs = 0;
    for (int iter = 1; iter <= 64; ++iter) {
      extend(table, member);
      // Monotone falsification across the whole run.
      for (const auto& label : table.row_labels()) {
        auto row = table.row(label, member);
        for (std::size_t e = 0; e < table.suffixes.size(); ++e) {
          auto key = std::make_pair(fmt(label), fmt(table.suffixes[e]));
          auto it = seen_bits.find(key);
          if (it != seen_bits.end() && it->second == 0 && row[e]) monotone_ok = false;
          seen_bits[key] = row[e] ? 1 : 0;
        }
      }
      ZaDfa dfa = make_acceptor(table, member);
      if (!prefix_closed(dfa, 3)) closed_ok = false;
      if (cex.blocking.size() < last_cb || cex.violation.size() < last_cs) growth_ok = false;
      last_cb = cex.blocking.size();
      last_cs = cex.violation.size();

      if (auto p = oracle_p(dfa, pre.sigma_min, m, spec)) {
        add_counterexample(table, p->word, member);
        continue;
      }
      auto b = oracle_b(m, dfa, spec, table, cex);
      if (b.kind == OracleBResult::Kind::Table) {
        add_counterexample(table, b.word, member);
        continue;
      }
      if (b.kind == OracleBResult::Kind::Negative) {
        cex.blocking.insert(b.new_blocking.begin(), b.new_blocking.end());
        oracle.invalidate_banned();
        add_counterexample(table, b.word, member);
        continue;
      }
      auto s = oracle_s(m, dfa, spec, pre.sigma_min);
      if (s.pass) break;
      cex.violation.insert(s.cex->word);
      oracle.invalidate_banned();
      add_counterexample(table, s.cex->word, member);
    }
  }

  // Product sub-stochasticity on random supervised instances.
  bool substochastic_ok = true;
  bool belief_ok = true;
  bool replay_ok = true;
  bool soundness_ok = true;
  {
    std::mt19937_64 rng(777);
    int solved = 0;
    int attempts = 0;
    while (solved < 12 && attempts < 400) {
      ++attempts;
      Pomdp rm = random_pomdp(rng);
      BoundedUntilSpec rspec = random_spec(rng);
      if (!validate(rm).empty()) continue;
      auto result = synthesize(rm, rspec);
      if (result.outcome != Outcome::Supervisor) continue;
      ++solved;
      auto prod = product(rm, result.supervisor);
      for (std::size_t i = 0; i < prod.states.size(); ++i) {
        for (const auto& move : prod.moves[i]) {
          double sum = 0.0;
          for (const auto& [j, p] : move.successors) sum += p;
          if (sum > 1.0 + 1e-9) substochastic_ok = false;
        }
      }
      auto abs_prod = product(make_absorbing(rm, *rspec.phi1, *rspec.phi2), result.supervisor);
      if (nonblocking_check(abs_prod, rspec.horizon)) soundness_ok = false;
      auto chk = check_supervisor(rm, result.supervisor, rspec);
      if (!chk.satisfied || !close(chk.p_c, result.p_final)) soundness_ok = false;
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Trace t = simulate(rm, result.supervisor, rspec.horizon, seed);
        PolicyString word;
        for (std::size_t i = 0; i < t.actions.size(); ++i) {
          word.push_back({t.observations[i], t.actions[i]});
        }
        if (!result.supervisor.accepts(word)) replay_ok = false;
      }
    }
    if (solved < 12) soundness_ok = false;

    // Belief normalization and evidence telescoping.
    for (int i = 0; i < 40; ++i) {
      Pomdp rm = random_pomdp(rng);
      Belief b = dirac_belief(rm.num_states(), rm.initial);
      History h{0, {}};
      double prod_ev = 1.0;
      for (int step = 0; step < 3; ++step) {
        ActionId a = static_cast<ActionId>(rng() % rm.num_actions());
        ObsId z = static_cast<ObsId>(rng() % rm.num_observations());
        auto [post, ev] = belief_update(b, a, z, rm);
        if (ev <= 0.0) break;
        double total = 0.0;
        for (double v : post.p) total += v;
        if (std::abs(total - 1.0) > 1e-9) belief_ok = false;
        prod_ev *= ev;
        h.steps.emplace_back(a, z);
        b = post;
        if (!close(prod_ev, brute_history_probability(rm, h))) belief_ok = false;
      }
    }
  }

  report(7, {{"prefix-closed effective language for every conjectured acceptor", closed_ok},
             {"monotone falsification: no table bit ever flips 0 -> 1", monotone_ok},
             {"C_B and C_S grow monotonically", growth_ok},
             {"product rows are sub-stochastic", substochastic_ok},
             {"beliefs stay normalized and evidences telescope (1e-9)", belief_ok},
             {"simulated traces replay inside their supervisor", replay_ok},
             {"supervisor outcomes pass the independent soundness re-check", soundness_ok}});
}

// --- criterion 8: termination budget -------------------------------------------

void criterion_8() {
  bool fixture_ok = false;
  {
    Pomdp m = sec6_model();
    auto spec = sec6_spec();
    auto result = synthesize(m, spec);
    double budget = 2.0 * std::pow(6.0, spec.horizon);
    fixture_ok = result.outcome == Outcome::Supervisor && result.iterations <= budget;
  }

  std::mt19937_64 rng(88);
  int solvable = 0;
  int attempts = 0;
  bool random_ok = true;
  while (solvable < 50 && attempts < 2000) {
    ++attempts;
    Pomdp m = random_pomdp(rng);
    BoundedUntilSpec spec = random_spec(rng);
    if (!validate(m).empty()) continue;
    if (preprocess(m, spec).kind != PreprocessKind::Continue) continue;
    ++solvable;
    auto result = synthesize(m, spec);
    double budget = 2.0 * std::pow(m.num_observations() * m.num_actions(), spec.horizon);
    if (result.iterations > budget) random_ok = false;
    if (result.outcome != Outcome::Supervisor) random_ok = false;
  }
  report(8, {{"bundled example finishes within twice |Sigma|^k iterations", fixture_ok},
             {"50 random learnable instances finish within the budget and return supervisors "
              "(" + std::to_string(solvable) + " found)",
              random_ok && solvable == 50}});
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criteria_2_and_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
