#include "exchg/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "exchg/exchange.hpp"

namespace exchg {

namespace {

void reject_unknown_fields(const nlohmann::json& obj,
                           std::initializer_list<std::string_view> allowed,
                           const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (std::string_view a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string("instance: unknown field \"") +
                                  key + "\" in " + where);
    }
  }
}

double require_number(const nlohmann::json& obj, const char* key,
                      const char* where) {
  if (!obj.contains(key)) {
    throw std::invalid_argument(std::string("instance: missing field \"") +
                                key + "\" in " + where);
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw std::invalid_argument(std::string("instance: field \"") + key +
                                "\" in " + where + " must be a number");
  }
  return v.get<double>();
}

}  // namespace

nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json doc;
  doc["d"] = inst.segment_length;
  auto agents = nlohmann::ordered_json::array();
  for (int i = 0; i < inst.size(); ++i) {
    nlohmann::ordered_json agent;
    agent["x"] = inst.positions[static_cast<std::size_t>(i)];
    agent["type"] =
        preference_token(inst.types[static_cast<std::size_t>(i)]);
    agents.push_back(std::move(agent));
  }
  doc["agents"] = std::move(agents);
  return doc;
}

Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw std::invalid_argument("instance: top-level value must be an object");
  }
  reject_unknown_fields(doc, {"d", "agents"}, "the top-level object");

  Instance inst;
  inst.segment_length = require_number(doc, "d", "the top-level object");

  if (!doc.contains("agents") || !doc.at("agents").is_array()) {
    throw std::invalid_argument("instance: \"agents\" must be an array");
  }
  for (const auto& agent : doc.at("agents")) {
    if (!agent.is_object()) {
      throw std::invalid_argument("instance: each agent must be an object");
    }
    reject_unknown_fields(agent, {"x", "type"}, "an agent object");
    inst.positions.push_back(require_number(agent, "x", "an agent object"));
    if (!agent.contains("type") || !agent.at("type").is_string()) {
      throw std::invalid_argument(
          "instance: agent field \"type\" must be a string");
    }
    const auto token = agent.at("type").get<std::string>();
    const auto parsed = parse_preference(token);
    if (!parsed) {
      throw std::invalid_argument("instance: unknown type token \"" + token +
                                  "\" (expected \"L\" or \"H\")");
    }
    inst.types.push_back(*parsed);
  }

  inst.validate();
  return inst;
}

std::string render_instance(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

Instance parse_instance(std::string_view text) {
  return instance_from_json(nlohmann::json::parse(text));
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open instance file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << render_instance(inst);
  if (!out) {
    throw std::runtime_error("failed writing instance file: " + path);
  }
}

nlohmann::ordered_json trace_to_json(const ExchangeTrace& trace) {
  auto steps = nlohmann::ordered_json::array();
  for (const auto& step : trace.steps) {
    nlohmann::ordered_json event;
    event["cycle"] = step.cycle;
    event["welfare_after"] = step.welfare_after;
    steps.push_back(std::move(event));
  }
  return steps;
}

}  // namespace exchg
