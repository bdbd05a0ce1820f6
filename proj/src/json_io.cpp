#include "zasyn/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace zasyn {

using nlohmann::json;

namespace {

int index_of(const std::vector<std::string>& names, const std::string& id,
             const std::string& what) {
  auto it = std::find(names.begin(), names.end(), id);
  if (it == names.end()) throw IoError("unknown " + what + " id: \"" + id + "\"");
  return static_cast<int>(it - names.begin());
}

std::vector<std::string> string_list(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw IoError("model file needs an array field \"" + key + "\"");
  }
  std::vector<std::string> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  if (out.empty()) throw IoError("field \"" + key + "\" must not be empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = i + 1; k < out.size(); ++k) {
      if (out[i] == out[k]) throw IoError("duplicate id \"" + out[i] + "\" in \"" + key + "\"");
    }
  }
  return out;
}

}  // namespace

Pomdp model_from_json(const json& j) {
  Pomdp model;
  model.states = string_list(j, "states");
  model.actions = string_list(j, "actions");
  model.observations = string_list(j, "observations");
  model.initial = index_of(model.states, j.at("initial").get<std::string>(), "state");

  const int n = model.num_states();
  model.transition.assign(n, std::vector<std::optional<std::vector<double>>>(
                                 model.num_actions(), std::nullopt));
  if (j.contains("transitions")) {
    for (const auto& [state_id, by_action] : j.at("transitions").items()) {
      int s = index_of(model.states, state_id, "state");
      for (const auto& [action_id, row] : by_action.items()) {
        int a = index_of(model.actions, action_id, "action");
        std::vector<double> dense(n, 0.0);
        for (const auto& [target_id, prob] : row.items()) {
          dense[index_of(model.states, target_id, "state")] = prob.get<double>();
        }
        model.transition[s][a] = std::move(dense);
      }
    }
  }

  model.observation_fn.assign(n, std::vector<double>(model.num_observations(), 0.0));
  if (!j.contains("observation_fn")) throw IoError("model file needs \"observation_fn\"");
  for (const auto& [state_id, row] : j.at("observation_fn").items()) {
    int s = index_of(model.states, state_id, "state");
    for (const auto& [obs_id, prob] : row.items()) {
      model.observation_fn[s][index_of(model.observations, obs_id, "observation")] =
          prob.get<double>();
    }
  }

  model.labels.assign(n, {});
  if (j.contains("labels")) {
    for (const auto& [state_id, aps] : j.at("labels").items()) {
      int s = index_of(model.states, state_id, "state");
      for (const auto& ap : aps) model.labels[s].insert(ap.get<std::string>());
    }
  }
  if (j.contains("atomic_propositions")) {
    for (const auto& ap : j.at("atomic_propositions")) {
      model.atomic_props.insert(ap.get<std::string>());
    }
  } else {
    for (const auto& labels : model.labels) model.atomic_props.insert(labels.begin(), labels.end());
  }
  return model;
}

Pomdp load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  json j = json::parse(in);  // throws with byte position on malformed input
  return model_from_json(j);
}

json dfa_to_json(const ZaDfa& dfa, const std::vector<std::string>& obs_names,
                 const std::vector<std::string>& action_names) {
  json j;
  std::vector<std::string> states;
  for (int q = 0; q < dfa.num_states; ++q) states.push_back("q" + std::to_string(q));
  j["states"] = states;
  j["initial"] = states[dfa.initial];
  json accepting = json::array();
  for (int q = 0; q < dfa.num_states; ++q) {
    if (dfa.accepting[q]) accepting.push_back(states[q]);
  }
  j["accepting"] = accepting;
  j["observations"] = obs_names;
  j["actions"] = action_names;
  json transitions = json::array();
  for (const auto& [key, target] : dfa.delta) {
    transitions.push_back({{"from", states[key.first]},
                           {"z", obs_names[key.second.z]},
                           {"a", action_names[key.second.a]},
                           {"to", states[target]}});
  }
  j["transitions"] = transitions;
  return j;
}

ZaDfa dfa_from_json(const json& j, std::vector<std::string>* obs_names,
                    std::vector<std::string>* action_names) {
  auto states = string_list(j, "states");
  auto observations = string_list(j, "observations");
  auto actions = string_list(j, "actions");
  ZaDfa dfa;
  dfa.num_obs = static_cast<int>(observations.size());
  dfa.num_actions = static_cast<int>(actions.size());
  dfa.num_states = static_cast<int>(states.size());
  dfa.initial = index_of(states, j.at("initial").get<std::string>(), "automaton state");
  dfa.accepting.assign(dfa.num_states, false);
  for (const auto& q : j.at("accepting")) {
    dfa.accepting[index_of(states, q.get<std::string>(), "automaton state")] = true;
  }
  for (const auto& t : j.at("transitions")) {
    int from = index_of(states, t.at("from").get<std::string>(), "automaton state");
    int to = index_of(states, t.at("to").get<std::string>(), "automaton state");
    Symbol sym{index_of(observations, t.at("z").get<std::string>(), "observation"),
               index_of(actions, t.at("a").get<std::string>(), "action")};
    auto [it, inserted] = dfa.delta.try_emplace({from, sym}, to);
    if (!inserted && it->second != to) {
      throw IoError("nondeterministic transition on " + t.dump());
    }
  }
  if (obs_names) *obs_names = observations;
  if (action_names) *action_names = actions;
  return dfa;
}

ZaDfa load_supervisor(const std::string& path, const Pomdp& model) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open supervisor file: " + path);
  json j = json::parse(in);
  std::vector<std::string> obs_names, action_names;
  ZaDfa dfa = dfa_from_json(j, &obs_names, &action_names);
  if (obs_names != model.observations || action_names != model.actions) {
    throw IoError("supervisor alphabet does not match the model's observations/actions");
  }
  return dfa;
}

ZaDfa load_supervisor_standalone(const std::string& path, std::vector<std::string>* obs_names,
                                 std::vector<std::string>* action_names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open supervisor file: " + path);
  json j = json::parse(in);
  return dfa_from_json(j, obs_names, action_names);
}

json iteration_record_to_json(const IterationRecord& rec) {
  json j;
  j["iteration"] = rec.iteration;
  j["acceptor"] = {{"states", rec.acceptor_states}, {"accepting", rec.acceptor_accepting}};
  j["oracle"] = rec.oracle;
  if (!rec.counterexample.empty()) j["counterexample"] = rec.counterexample;
  if (rec.oracle_s_value >= 0.0) j["p_c"] = rec.oracle_s_value;
  if (rec.evidence >= 0.0) j["evidence"] = rec.evidence;
  j["c_b"] = rec.c_b;
  j["c_s"] = rec.c_s;
  return j;
}

json result_summary_to_json(const SynthesisResult& result) {
  json j;
  switch (result.outcome) {
    case Outcome::Supervisor: j["outcome"] = "supervisor"; break;
    case Outcome::TriviallyAll: j["outcome"] = "trivially-all"; break;
    case Outcome::Unrealizable: j["outcome"] = "unrealizable"; break;
    case Outcome::BudgetExhausted: j["outcome"] = "budget-exhausted"; break;
  }
  j["p_final"] = result.p_final;
  j["iterations"] = result.iterations;
  j["p_min"] = result.p_min;
  j["p_max"] = result.p_max;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
}

}  // namespace zasyn
