#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "zasyn/model.hpp"
#include "zasyn/synthesis.hpp"
#include "zasyn/za_dfa.hpp"

namespace zasyn {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Pomdp model_from_json(const nlohmann::json& j);
Pomdp load_model(const std::string& path);

/// Supervisor files carry their own observation/action name lists so they
/// can be rendered without the model.
nlohmann::json dfa_to_json(const ZaDfa& dfa, const std::vector<std::string>& obs_names,
                           const std::vector<std::string>& action_names);
ZaDfa dfa_from_json(const nlohmann::json& j, std::vector<std::string>* obs_names = nullptr,
                    std::vector<std::string>* action_names = nullptr);
ZaDfa load_supervisor(const std::string& path, const Pomdp& model);
ZaDfa load_supervisor_standalone(const std::string& path, std::vector<std::string>* obs_names,
                                 std::vector<std::string>* action_names);

nlohmann::json iteration_record_to_json(const IterationRecord& rec);
nlohmann::json result_summary_to_json(const SynthesisResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace zasyn
