#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "exchg/core.hpp"

namespace exchg {

struct ExchangeTrace;

// Canonical instance document:
//   {"d": 8.0, "agents": [{"x": 0.0, "type": "L"}, ...]}
// Field names and type tokens are exact; unknown fields are rejected.
// Positions round-trip bit exact (shortest round-trip double rendering).
nlohmann::ordered_json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);

std::string render_instance(const Instance& inst);
Instance parse_instance(std::string_view text);

// File helpers. Missing or unreadable files raise std::runtime_error;
// malformed JSON raises nlohmann::json::parse_error; schema or validation
// problems raise std::invalid_argument.
Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& inst, const std::string& path);

// [{"cycle": [agent indices], "welfare_after": w}, ...]
nlohmann::ordered_json trace_to_json(const ExchangeTrace& trace);

}  // namespace exchg
