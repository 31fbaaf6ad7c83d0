#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sneed/netsim.hpp"
#include "sneed/rational.hpp"
#include "sneed/report.hpp"

using nlohmann::ordered_json;
using sneed::Ratio;
using sneed::SimConfig;
using sneed::SimulationReport;

#ifndef SNEED_SOURCE_DIR
#define SNEED_SOURCE_DIR "."
#endif

namespace {

SimulationReport sample_report() {
  SimConfig config;
  config.scheme = sneed::SchemeKind::Rotation;
  config.n = 3;
  config.t = 1;
  config.adversary = sneed::AdversaryKind::ActiveModify;
  config.cycles = 4;
  config.seed = 8;
  return sneed::run_simulation(config);
}

std::vector<std::string> keys_of(const ordered_json& j) {
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  return keys;
}

}  // namespace

TEST_CASE("report serialization keeps a frozen key order") {
  const auto j = sneed::report_to_json(sample_report());
  REQUIRE(keys_of(j) ==
          std::vector<std::string>{"schema_version", "config", "metrics",
                                   "cycle_log", "events", "leakage", "seed"});
  REQUIRE(keys_of(j["config"]) ==
          std::vector<std::string>{"scheme", "n", "t", "k", "field_m",
                                   "adversary", "placement", "digest", "label",
                                   "cycles", "seed", "message_len"});
  REQUIRE(keys_of(j["metrics"]) ==
          std::vector<std::string>{
              "channel_uses", "data_symbols", "messages_sent",
              "messages_delivered", "messages_recovered", "messages_failed",
              "detections", "fabrications_rejected", "capacity",
              "leakage_checks", "leakage_findings"});
  // Serialized text ends in exactly one newline.
  const auto text = sneed::report_to_string(sample_report());
  REQUIRE(text.back() == '\n');
  REQUIRE(text[text.size() - 2] != '\n');
}

TEST_CASE("capacity is carried as an exact reduced fraction") {
  SimulationReport report;
  report.channel_uses = 6;
  report.data_symbols = 4;
  REQUIRE(sneed::measure_capacity(report) == Ratio(2, 3));

  report.scheme = "rotation";
  const auto j = sneed::report_to_json(report);
  REQUIRE(j["metrics"]["capacity"]["num"] == 2);
  REQUIRE(j["metrics"]["capacity"]["den"] == 3);
  REQUIRE(j["metrics"]["capacity"]["num"].is_number_integer());

  SimulationReport unused;
  CHECK_THROWS_AS(sneed::measure_capacity(unused), sneed::ConfigError);
  CHECK_THROWS_AS(sneed::report_to_json(unused), sneed::ConfigError);
}

TEST_CASE("ratios reduce on construction and compare exactly") {
  CHECK(Ratio(4, 6) == Ratio(2, 3));
  CHECK(Ratio(3, 4) != Ratio(6, 9));
  CHECK(Ratio(0, 5).den == 1);
  CHECK(Ratio(7, 7).str() == "1/1");
  CHECK(Ratio(3, 4).str() == "3/4");
  CHECK_THROWS_AS(Ratio(1, 0), sneed::DivisionByZeroError);
  CHECK_THROWS_AS(Ratio(-1, 2), sneed::SneedError);
}

TEST_CASE("reports satisfy the checked-in schema") {
  const auto schema = sneed::load_json_file(
      std::string(SNEED_SOURCE_DIR) + "/schemas/report.schema.json");
  const auto j = sneed::report_to_json(sample_report());
  const auto errors = sneed::validate_against_schema(j, schema);
  for (const auto& e : errors) UNSCOPED_INFO(e);
  REQUIRE(errors.empty());
}

TEST_CASE("schema validation reports typed paths") {
  const auto schema = nlohmann::json::parse(R"({
    "type": "object",
    "required": ["schema_version", "config"],
    "properties": {
      "schema_version": {"type": "integer"},
      "config": {
        "type": "object",
        "required": ["scheme"],
        "properties": {"scheme": {"type": "string",
                                  "enum": ["rotation", "binary"]}}
      },
      "rows": {"type": "array", "items": {"type": "integer"}}
    }
  })");

  nlohmann::json good{{"schema_version", 1},
                      {"config", {{"scheme", "rotation"}}},
                      {"rows", {1, 2, 3}}};
  REQUIRE(sneed::validate_against_schema(good, schema).empty());

  nlohmann::json missing{{"schema_version", 1}};
  auto errors = sneed::validate_against_schema(missing, schema);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "$: missing required key 'config'");

  nlohmann::json wrong_type = good;
  wrong_type["schema_version"] = "one";
  errors = sneed::validate_against_schema(wrong_type, schema);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "$/schema_version: expected integer");

  nlohmann::json off_enum = good;
  off_enum["config"]["scheme"] = "bogus";
  errors = sneed::validate_against_schema(off_enum, schema);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "$/config/scheme: value not in enum");

  nlohmann::json bad_row = good;
  bad_row["rows"][1] = "x";
  errors = sneed::validate_against_schema(bad_row, schema);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0] == "$/rows/1: expected integer");
}

TEST_CASE("json files round-trip through disk") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "sneed_report_test.json").string();
  const auto report = sample_report();
  {
    std::ofstream out(path);
    out << sneed::report_to_string(report);
  }
  const auto loaded = sneed::load_json_file(path);
  CHECK(loaded["config"]["scheme"] == "rotation");
  CHECK(loaded["config"]["n"] == 3);
  CHECK(loaded["metrics"]["capacity"]["num"] == 2);
  CHECK(loaded["metrics"]["capacity"]["den"] == 3);
  CHECK(loaded["cycle_log"].size() == 4);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(sneed::load_json_file(path), sneed::IoError);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(sneed::load_json_file(path), sneed::ConfigError);
  std::filesystem::remove(path);
}
