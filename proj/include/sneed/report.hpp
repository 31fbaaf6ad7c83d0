#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sneed/errors.hpp"
#include "sneed/rational.hpp"
#include "sneed/rotation.hpp"

namespace sneed {

/// One eavesdropper comparison that came back equal. kind is
/// "plaintext-match" (a transmitted symbol equals a message verbatim;
/// a violation on any protected channel) or "cross-ciphertext-match"
/// (a symbol equals another channel's ciphertext).
struct LeakageFinding {
  uint64_t cycle = 0;
  unsigned channel = 0;   // 1-based
  unsigned slot = 0;      // round slot within the cycle, 1-based
  std::string kind;
  unsigned matched_index = 0;  // plaintext index, or foreign channel
  bool violation = false;
};

struct CycleRecord {
  uint64_t cycle = 0;
  std::vector<unsigned> attacked;  // 1-based channels, sorted
  unsigned detections = 0;
  unsigned recoveries = 0;
  unsigned failures = 0;
};

struct SimulationReport {
  int schema_version = 1;

  // configuration echo
  std::string scheme;     // rotation | binary | vandermonde | generator
  unsigned n = 0;
  unsigned t = 0;
  unsigned k = 0;         // data channels per block (n-1 for rotation)
  unsigned field_m = 0;   // 0 when no block code is involved
  std::string adversary;  // none | passive | modify | fabricate
  std::string placement;  // random | exhaustive
  std::string digest;
  std::string label;
  uint64_t cycles = 0;
  uint64_t seed = 0;
  uint64_t message_len = 0;

  // aggregate metrics
  uint64_t channel_uses = 0;
  uint64_t data_symbols = 0;
  uint64_t messages_sent = 0;
  uint64_t messages_delivered = 0;
  uint64_t messages_recovered = 0;
  uint64_t messages_failed = 0;
  uint64_t detections = 0;
  uint64_t fabrications_rejected = 0;
  uint64_t leakage_checks = 0;

  std::vector<CycleRecord> cycle_log;
  std::vector<Event> events;
  std::vector<LeakageFinding> leakage;
};

/// Exact data-symbols per channel-use; never floating point.
inline Ratio measure_capacity(const SimulationReport& report) {
  if (report.channel_uses == 0)
    throw ConfigError("capacity undefined before any channel use");
  return Ratio(static_cast<std::int64_t>(report.data_symbols),
               static_cast<std::int64_t>(report.channel_uses));
}

inline nlohmann::ordered_json report_to_json(const SimulationReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = r.schema_version;

  nlohmann::ordered_json config;
  config["scheme"] = r.scheme;
  config["n"] = r.n;
  config["t"] = r.t;
  config["k"] = r.k;
  config["field_m"] = r.field_m;
  config["adversary"] = r.adversary;
  config["placement"] = r.placement;
  config["digest"] = r.digest;
  config["label"] = r.label;
  config["cycles"] = r.cycles;
  config["seed"] = r.seed;
  config["message_len"] = r.message_len;
  j["config"] = std::move(config);

  const Ratio capacity = measure_capacity(r);
  nlohmann::ordered_json metrics;
  metrics["channel_uses"] = r.channel_uses;
  metrics["data_symbols"] = r.data_symbols;
  metrics["messages_sent"] = r.messages_sent;
  metrics["messages_delivered"] = r.messages_delivered;
  metrics["messages_recovered"] = r.messages_recovered;
  metrics["messages_failed"] = r.messages_failed;
  metrics["detections"] = r.detections;
  metrics["fabrications_rejected"] = r.fabrications_rejected;
  metrics["capacity"] = {{"num", capacity.num}, {"den", capacity.den}};
  metrics["leakage_checks"] = r.leakage_checks;
  metrics["leakage_findings"] = r.leakage.size();
  j["metrics"] = std::move(metrics);

  nlohmann::ordered_json cycle_log = nlohmann::ordered_json::array();
  for (const auto& c : r.cycle_log) {
    nlohmann::ordered_json row;
    row["cycle"] = c.cycle;
    row["attacked"] = c.attacked;
    row["detections"] = c.detections;
    row["recoveries"] = c.recoveries;
    row["failures"] = c.failures;
    cycle_log.push_back(std::move(row));
  }
  j["cycle_log"] = std::move(cycle_log);

  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto& e : r.events) {
    nlohmann::ordered_json row;
    row["cycle"] = e.cycle;
    row["round"] = e.round;
    row["channel"] = e.channel;
    row["kind"] = event_kind_name(e.kind);
    row["source_rounds"] = e.source_rounds;
    events.push_back(std::move(row));
  }
  j["events"] = std::move(events);

  nlohmann::ordered_json leakage = nlohmann::ordered_json::array();
  for (const auto& f : r.leakage) {
    nlohmann::ordered_json row;
    row["cycle"] = f.cycle;
    row["channel"] = f.channel;
    row["slot"] = f.slot;
    row["kind"] = f.kind;
    row["matched_index"] = f.matched_index;
    row["violation"] = f.violation;
    leakage.push_back(std::move(row));
  }
  j["leakage"] = std::move(leakage);

  j["seed"] = r.seed;
  return j;
}

inline std::string report_to_string(const SimulationReport& r) {
  return report_to_json(r).dump(2) + "\n";
}

// ---- JSON-Schema subset validation ---------------------------------------
// Supports: type (object/array/string/integer/number/boolean), required,
// properties, items, enum. Enough to pin the report shape; anything the
// schema does not mention is allowed.

namespace detail {

inline bool schema_type_matches(const nlohmann::json& value,
                                const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  return false;
}

inline void schema_check(const nlohmann::json& value,
                         const nlohmann::json& schema, const std::string& path,
                         std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!schema_type_matches(value, type)) {
      errors.push_back(path + ": expected " + type);
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& allowed : schema["enum"])
      if (value == allowed) found = true;
    if (!found) errors.push_back(path + ": value not in enum");
  }
  if (schema.contains("required"))
    for (const auto& key : schema["required"])
      if (!value.contains(key.get<std::string>()))
        errors.push_back(path + ": missing required key '" +
                         key.get<std::string>() + "'");
  if (schema.contains("properties") && value.is_object())
    for (const auto& [key, sub] : schema["properties"].items())
      if (value.contains(key))
        schema_check(value[key], sub, path + "/" + key, errors);
  if (schema.contains("items") && value.is_array())
    for (std::size_t i = 0; i < value.size(); ++i)
      schema_check(value[i], schema["items"],
                   path + "/" + std::to_string(i), errors);
}

}  // namespace detail

inline std::vector<std::string> validate_against_schema(
    const nlohmann::json& value, const nlohmann::json& schema) {
  std::vector<std::string> errors;
  detail::schema_check(value, schema, "$", errors);
  return errors;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace sneed
