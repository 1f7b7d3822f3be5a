#include "qmdp/mdp_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw PreconditionError(std::string("MDP JSON: missing key /") + key);
  }
  return doc.at(key);
}

std::size_t require_count(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw PreconditionError(std::string("MDP JSON: /") + key + " must be a positive integer");
  }
  return v.get<std::size_t>();
}

void require_array(const json& v, std::size_t size, const std::string& path) {
  if (!v.is_array() || v.size() != size) {
    std::ostringstream msg;
    msg << "MDP JSON: " << path << " must be an array of length " << size;
    throw PreconditionError(msg.str());
  }
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) {
    throw PreconditionError("MDP JSON: " + path + " must be a number");
  }
  return v.get<double>();
}

}  // namespace

json mdp_to_json(const Mdp& mdp) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  json r = json::array();
  json p = json::array();
  for (std::size_t s = 0; s < S; ++s) {
    json r_row = json::array();
    json p_block = json::array();
    for (std::size_t a = 0; a < A; ++a) {
      r_row.push_back(mdp.reward(s, a));
      const auto row = mdp.transition(s, a);
      p_block.push_back(json(std::vector<double>(row.begin(), row.end())));
    }
    r.push_back(std::move(r_row));
    p.push_back(std::move(p_block));
  }
  return json{{"S", S}, {"A", A}, {"gamma", mdp.discount()}, {"r", std::move(r)}, {"p", std::move(p)}};
}

Mdp mdp_from_json(const json& doc) {
  const std::size_t S = require_count(doc, "S");
  const std::size_t A = require_count(doc, "A");
  const double gamma = require_number(require(doc, "gamma"), "/gamma");
  const json& r = require(doc, "r");
  const json& p = require(doc, "p");

  std::vector<double> rewards;
  std::vector<double> transitions;
  rewards.reserve(S * A);
  transitions.reserve(S * A * S);
  require_array(r, S, "/r");
  require_array(p, S, "/p");
  for (std::size_t s = 0; s < S; ++s) {
    const std::string rs = "/r/" + std::to_string(s);
    const std::string ps = "/p/" + std::to_string(s);
    require_array(r[s], A, rs);
    require_array(p[s], A, ps);
    for (std::size_t a = 0; a < A; ++a) {
      const std::string ra = rs + "/" + std::to_string(a);
      const std::string pa = ps + "/" + std::to_string(a);
      const double reward = require_number(r[s][a], ra);
      if (!(reward >= 0.0 && reward <= 1.0)) {
        throw PreconditionError("MDP JSON: " + ra + " reward must lie in [0, 1]");
      }
      rewards.push_back(reward);
      require_array(p[s][a], S, pa);
      double total = 0.0;
      for (std::size_t next = 0; next < S; ++next) {
        const std::string pn = pa + "/" + std::to_string(next);
        const double prob = require_number(p[s][a][next], pn);
        if (!(prob >= 0.0 && prob <= 1.0)) {
          throw PreconditionError("MDP JSON: " + pn + " probability must lie in [0, 1]");
        }
        total += prob;
        transitions.push_back(prob);
      }
      if (std::abs(total - 1.0) > Mdp::kRowSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "MDP JSON: " << pa << " sums to " << total << ", expected 1";
        throw PreconditionError(msg.str());
      }
    }
  }
  return Mdp(S, A, gamma, std::move(rewards), std::move(transitions));
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw PreconditionError("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

Mdp load_mdp(const std::string& path) {
  try {
    return mdp_from_json(load_json(path));
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

void save_json(const json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw PreconditionError("cannot write " + path);
  }
  out << doc.dump(2) << '\n';
}

}  // namespace qmdp
