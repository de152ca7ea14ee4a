#pragma once

// JSON model files:
//
//   {"kappa": 2,
//    "name": "...", "description": "...",
//    "seasons": [{"type": "poisson", "lambda": 1.0, "shift": 0},
//                {"type": "table", "probs": [0.04, 0.32, 0.64]}]}

#include "seasonal_ruin/model.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace seasonal_ruin {

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ValidationError(path + "." + it.key() + ": unknown field");
  }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key + ": missing");
  return *it;
}

inline long integer_field(const nlohmann::json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15) return static_cast<long>(d);
  }
  throw ValidationError(path + ": expected an integer");
}

inline double number_field(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path + ": expected a number");
  return v.get<double>();
}

inline DiscreteDist parse_season(const nlohmann::json& s, const std::string& path) {
  if (!s.is_object()) throw ValidationError(path + ": expected an object");
  const auto& type = require(s, "type", path);
  if (!type.is_string()) throw ValidationError(path + ".type: expected a string");
  const auto kind = type.get<std::string>();
  try {
    if (kind == "poisson") {
      reject_unknown(s, {"type", "lambda", "shift"}, path);
      double lambda = number_field(require(s, "lambda", path), path + ".lambda");
      long shift = 0;
      if (s.contains("shift")) shift = integer_field(s["shift"], path + ".shift");
      return DiscreteDist::poisson(lambda, shift);
    }
    if (kind == "table") {
      reject_unknown(s, {"type", "probs"}, path);
      const auto& probs = require(s, "probs", path);
      if (!probs.is_array()) throw ValidationError(path + ".probs: expected an array");
      std::vector<double> p;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        p.push_back(number_field(probs[i], path + ".probs[" + std::to_string(i) + "]"));
      }
      return DiscreteDist::table(std::move(p));
    }
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ValidationError(path + ": " + msg);
  }
  throw ValidationError(path + ".type: unknown distribution type '" + kind + "'");
}

}  // namespace detail

inline RiskModel parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  const std::string root = "$";
  if (!doc.is_object()) throw ValidationError(root + ": expected an object");
  detail::reject_unknown(doc, {"kappa", "seasons", "name", "description"}, root);
  RiskModel model;
  model.kappa = detail::integer_field(detail::require(doc, "kappa", root), root + ".kappa");
  if (model.kappa < 1) throw ValidationError(root + ".kappa: must be a positive integer");
  const auto& seasons = detail::require(doc, "seasons", root);
  if (!seasons.is_array()) throw ValidationError(root + ".seasons: expected an array");
  if (seasons.empty()) throw ValidationError(root + ".seasons: at least one season is required");
  for (std::size_t k = 0; k < seasons.size(); ++k) {
    model.seasons.push_back(detail::parse_season(seasons[k], root + ".seasons[" + std::to_string(k) + "]"));
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ValidationError(root + ".name: expected a string");
    model.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) throw ValidationError(root + ".description: expected a string");
    model.description = doc["description"].get<std::string>();
  }
  model.validate();
  return model;
}

inline RiskModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

inline nlohmann::json model_to_json(const RiskModel& model) {
  nlohmann::json doc;
  if (!model.name.empty()) doc["name"] = model.name;
  if (!model.description.empty()) doc["description"] = model.description;
  doc["kappa"] = model.kappa;
  doc["seasons"] = nlohmann::json::array();
  for (const auto& d : model.seasons) {
    if (d.is_poisson()) {
      doc["seasons"].push_back({{"type", "poisson"}, {"lambda", d.lambda()}, {"shift", d.shift()}});
    } else {
      doc["seasons"].push_back({{"type", "table"}, {"probs", d.probs()}});
    }
  }
  return doc;
}

inline std::string emit_model(const RiskModel& model) { return model_to_json(model).dump(2); }

}  // namespace seasonal_ruin
