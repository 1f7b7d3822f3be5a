#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "qmdp/mdp.hpp"

namespace qmdp {

/// {"S":int,"A":int,"gamma":float,"r":[[float]],"p":[[[float]]]}, p indexed [s][a][s'].
nlohmann::json mdp_to_json(const Mdp& mdp);

/// Parses and validates an MDP document. Errors name the JSON path of the
/// offending entry, e.g. "/p/1/0/2".
Mdp mdp_from_json(const nlohmann::json& doc);

Mdp load_mdp(const std::string& path);
void save_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace qmdp
