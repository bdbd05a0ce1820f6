// Command-line front end: validate models, synthesize supervisors, check
// supervisors or single policies, run regulated simulations, and render
// automata to DOT.
//
// Exit codes: 0 success; 1 validation failures; 2 file or parse errors;
// 3 unrealizable instance; 4 iteration budget exhausted; 5 blocking
// supervisor.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zasyn/json_io.hpp"
#include "zasyn/pomcp.hpp"
#include "zasyn/simulate.hpp"
#include "zasyn/synthesis.hpp"

using nlohmann::json;
using namespace zasyn;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUnrealizable = 3;
constexpr int kExitBudget = 4;
constexpr int kExitBlocking = 5;

struct SpecArgs {
  std::string text;
  std::string file;

  BoundedUntilSpec resolve() const {
    std::string source = text;
    if (!file.empty()) source = read_text_file(file);
    if (source.empty()) throw IoError("no specification given (use --spec or --spec-file)");
    return check_synthesizable(*parse_formula(source));
  }
};

void add_spec_options(CLI::App* cmd, SpecArgs& args) {
  auto* spec = cmd->add_option("--spec", args.text, "specification formula text");
  auto* file = cmd->add_option("--spec-file", args.file, "file containing the formula");
  spec->excludes(file);
}

DotOptions dot_options_for(const std::vector<std::string>& obs,
                           const std::vector<std::string>& actions, bool legend) {
  DotOptions opts;
  opts.observation_names = obs;
  opts.action_names = actions;
  opts.digit_legend = legend;
  return opts;
}

int cmd_validate(const std::string& model_path) {
  Pomdp model = load_model(model_path);
  auto violations = validate(model);
  for (const auto& v : violations) std::cout << v << "\n";
  if (violations.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  return kExitValidation;
}

int cmd_synthesize(const std::string& model_path, const SpecArgs& spec_args,
                   const std::string& out_dir, const std::string& engine_name, int sims,
                   double ucb_c, std::uint64_t seed, const std::string& trace_path,
                   std::uint64_t budget_override) {
  Pomdp model = load_model(model_path);
  {
    auto violations = validate(model);
    if (!violations.empty()) {
      std::cerr << "model fails validation: " << violations.front() << "\n";
      return kExitValidation;
    }
  }
  BoundedUntilSpec spec = spec_args.resolve();

  SynthesisConfig cfg;
  if (engine_name == "pomcp") cfg.engine = Engine::Pomcp;
  cfg.pomcp.n_simulations = sims;
  cfg.pomcp.ucb_c = ucb_c;
  cfg.pomcp.seed = seed;
  if (budget_override > 0) cfg.iteration_budget = budget_override;
  std::filesystem::create_directories(out_dir);
  std::ofstream trace_file;
  if (!trace_path.empty()) {
    auto parent = std::filesystem::path(trace_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    trace_file.open(trace_path);
    if (!trace_file) throw IoError("cannot write trace file: " + trace_path);
    cfg.trace_stream = &trace_file;
  }

  auto result = synthesize(model, spec, cfg);

  json supervisor = dfa_to_json(result.supervisor, model.observations, model.actions);
  write_text_file(out_dir + "/supervisor.json", supervisor.dump(2) + "\n");
  write_text_file(out_dir + "/supervisor.dot",
                  to_dot(result.supervisor,
                         dot_options_for(model.observations, model.actions, true)));
  json summary = result_summary_to_json(result);
  write_text_file(out_dir + "/result.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";

  if (result.outcome == Outcome::Unrealizable) return kExitUnrealizable;
  if (result.outcome == Outcome::BudgetExhausted) return kExitBudget;
  return 0;
}

int cmd_check(const std::string& model_path, const SpecArgs& spec_args,
              const std::string& supervisor_path, const std::string& policy_text,
              const std::string& engine_name, int sims, double ucb_c, std::uint64_t seed) {
  Pomdp model = load_model(model_path);
  BoundedUntilSpec spec = spec_args.resolve();
  json report;

  if (!policy_text.empty()) {
    PolicyString policy =
        parse_policy_string(policy_text, model.num_actions(), model.num_observations());
    double value = policy_string_value(model, spec, policy);
    report["policy"] = policy_text;
    report["value"] = value;
    report["satisfied"] = spec.accepts(value);
    // Per-step absorption masses, the branch evidence behind the value.
    json branches = json::array();
    {
      PolicyString word = policy;
      if (static_cast<int>(word.size()) > spec.horizon) word.resize(spec.horizon);
      std::vector<double> mass(model.num_states(), 0.0);
      mass[model.initial] = 1.0;
      for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0) {
          for (StateId s = 0; s < model.num_states(); ++s) {
            mass[s] *= model.observation_fn[s][word[i].z];
          }
        }
        std::vector<double> next(model.num_states(), 0.0);
        for (StateId s = 0; s < model.num_states(); ++s) {
          if (mass[s] <= 0.0) continue;
          const auto row = model.effective_row(s, word[i].a);
          for (StateId t = 0; t < model.num_states(); ++t) next[t] += mass[s] * row[t];
        }
        double absorbed = 0.0;
        for (StateId t = 0; t < model.num_states(); ++t) {
          if (next[t] <= 0.0) continue;
          if (model.satisfies(t, *spec.phi2)) {
            absorbed += next[t];
            next[t] = 0.0;
          } else if (!model.satisfies(t, *spec.phi1)) {
            next[t] = 0.0;
          }
        }
        branches.push_back({{"step", i + 1}, {"absorbed", absorbed}});
        mass = std::move(next);
      }
    }
    report["absorption"] = branches;
    std::cout << report.dump(2) << "\n";
    return 0;
  }

  if (supervisor_path.empty()) throw IoError("check needs --supervisor or --policy");
  ZaDfa dfa = load_supervisor(supervisor_path, model);
  try {
    if (engine_name == "pomcp") {
      PomcpConfig pcfg;
      pcfg.n_simulations = sims;
      pcfg.ucb_c = ucb_c;
      pcfg.seed = seed;
      auto est = estimate_max(model, spec, supervisor_enabled(dfa), pcfg);
      report["p_max_obs"] = est.p_hat;
      report["satisfied"] = spec.accepts(est.p_hat);
      report["engine"] = "pomcp";
      report["witness_dot"] = to_dot(
          adversary_to_dfa(est.greedy, model, *spec.phi1, *spec.phi2, spec.horizon, true),
          dot_options_for(model.observations, model.actions, false));
    } else {
      auto chk = check_supervisor(model, dfa, spec);
      report["p_max_obs"] = chk.p_c;
      report["satisfied"] = chk.satisfied;
      report["engine"] = "exact";
      report["witness_dot"] = to_dot(
          adversary_to_dfa(chk.witness, model, *spec.phi1, *spec.phi2, spec.horizon, true),
          dot_options_for(model.observations, model.actions, false));
    }
  } catch (const BlockingError& e) {
    std::cerr << "blocking supervisor: " << e.what() << "\n";
    return kExitBlocking;
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& supervisor_path, int k,
                 std::uint64_t seed, int runs, const SpecArgs& spec_args, bool have_spec) {
  Pomdp model = load_model(model_path);
  ZaDfa dfa = load_supervisor(supervisor_path, model);
  std::optional<BoundedUntilSpec> spec;
  if (have_spec) spec = spec_args.resolve();

  int satisfied_count = 0;
  try {
    for (int run = 0; run < runs; ++run) {
      Trace trace = simulate(model, dfa, k, seed + static_cast<std::uint64_t>(run));
      json line;
      line["run"] = run;
      json states = json::array(), observations = json::array(), actions = json::array();
      for (StateId s : trace.states) states.push_back(model.states[s]);
      for (ObsId z : trace.observations) observations.push_back(model.observations[z]);
      for (ActionId a : trace.actions) actions.push_back(model.actions[a]);
      line["states"] = states;
      line["observations"] = observations;
      line["actions"] = actions;
      if (spec) {
        bool sat = false;
        for (std::size_t i = 0; i < trace.states.size(); ++i) {
          if (model.satisfies(trace.states[i], *spec->phi2)) {
            sat = true;
            break;
          }
          if (!model.satisfies(trace.states[i], *spec->phi1)) break;
        }
        line["satisfied"] = sat;
        if (sat) ++satisfied_count;
      }
      std::cout << line.dump() << "\n";
    }
  } catch (const BlockingError& e) {
    std::cerr << "blocking supervisor: " << e.what() << "\n";
    return kExitBlocking;
  }
  json summary;
  summary["runs"] = runs;
  if (spec && runs > 0) {
    summary["frequency"] = static_cast<double>(satisfied_count) / runs;
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_export_dot(const std::string& in_path, const std::string& out_path, bool legend) {
  std::vector<std::string> obs_names, action_names;
  ZaDfa dfa = load_supervisor_standalone(in_path, &obs_names, &action_names);
  std::string dot = to_dot(dfa, dot_options_for(obs_names, action_names, legend));
  if (out_path.empty() || out_path == "-") {
    std::cout << dot;
  } else {
    write_text_file(out_path, dot);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"za-DFA supervisor synthesis for finite-horizon POMDP specifications"};
  app.require_subcommand(1);

  std::string model_path, out_dir = "out", supervisor_path, policy_text, trace_path;
  std::string in_path, out_path;
  std::string engine = "exact";
  SpecArgs spec_args;
  int sims = 100000, runs = 1, horizon = 1;
  double ucb_c = 1.0;
  std::uint64_t seed = 0, budget_override = 0;
  bool legend = false;

  auto* validate_cmd = app.add_subcommand("validate", "check a model file's well-formedness");
  validate_cmd->add_option("--model", model_path)->required();

  auto* synth_cmd = app.add_subcommand("synthesize", "learn a non-blocking supervisor");
  synth_cmd->add_option("--model", model_path)->required();
  add_spec_options(synth_cmd, spec_args);
  synth_cmd->add_option("--out", out_dir, "output directory");
  synth_cmd->add_option("--engine", engine)->check(CLI::IsMember({"exact", "pomcp"}));
  synth_cmd->add_option("--sims", sims, "simulations per estimate");
  synth_cmd->add_option("--ucb-c", ucb_c, "exploration constant");
  synth_cmd->add_option("--seed", seed);
  synth_cmd->add_option("--trace", trace_path, "iteration trace file (JSON lines)");
  synth_cmd->add_option("--iteration-budget", budget_override,
                        "override the conjecture budget (0 keeps the default)")
      ->group("");  // hidden; exists to exercise the budget-exhaustion path

  auto* check_cmd = app.add_subcommand("check", "check a supervisor or a single policy");
  check_cmd->add_option("--model", model_path)->required();
  add_spec_options(check_cmd, spec_args);
  check_cmd->add_option("--supervisor", supervisor_path);
  check_cmd->add_option("--policy", policy_text,
                        "digit coding or z:a pairs for a single policy word");
  check_cmd->add_option("--engine", engine)->check(CLI::IsMember({"exact", "pomcp"}));
  check_cmd->add_option("--sims", sims);
  check_cmd->add_option("--ucb-c", ucb_c);
  check_cmd->add_option("--seed", seed);

  auto* sim_cmd = app.add_subcommand("simulate", "run regulated episodes");
  sim_cmd->add_option("--model", model_path)->required();
  sim_cmd->add_option("--supervisor", supervisor_path)->required();
  sim_cmd->add_option("--k", horizon, "episode length")->required();
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--runs", runs);
  add_spec_options(sim_cmd, spec_args);

  auto* dot_cmd = app.add_subcommand("export-dot", "render a supervisor file to DOT");
  dot_cmd->add_option("--in", in_path)->required();
  dot_cmd->add_option("--out", out_path, "output file, or - for stdout");
  dot_cmd->add_flag("--legend", legend, "label edges with the digit coding");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return cmd_validate(model_path);
    if (synth_cmd->parsed()) {
      return cmd_synthesize(model_path, spec_args, out_dir, engine, sims, ucb_c, seed,
                            trace_path, budget_override);
    }
    if (check_cmd->parsed()) {
      return cmd_check(model_path, spec_args, supervisor_path, policy_text, engine, sims, ucb_c,
                       seed);
    }
    if (sim_cmd->parsed()) {
      bool have_spec = !spec_args.text.empty() || !spec_args.file.empty();
      return cmd_simulate(model_path, supervisor_path, horizon, seed, runs, spec_args, have_spec);
    }
    if (dot_cmd->parsed()) return cmd_export_dot(in_path, out_path, legend);
  } catch (const ParseError& e) {
    std::cerr << "specification error: " << e.what() << "\n";
    return kExitIo;
  } catch (const UnsupportedFragment& e) {
    std::cerr << "unsupported specification: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const BlockingError& e) {
    std::cerr << "blocking supervisor: " << e.what() << "\n";
    return kExitBlocking;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
