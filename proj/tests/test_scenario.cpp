// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <string>

#include "cardsim/errors.hpp"
#include "cardsim/scenario.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cardsim;
using nlohmann::json;

namespace {

const std::string kScenarioDir = CARDSIM_SOURCE_DIR "/scenarios";

json minimal() {
  return json::parse(R"({
    "server": {"max_freq_hz": 2e9, "flops_per_cycle": 2, "core_count": 1024,
               "power_coeff": 1e-25},
    "devices": [
      {"gpu_freq_hz": 1e9, "flops_per_cycle": 2, "core_count": 256},
      {"gpu_freq_hz": 0.5e9, "flops_per_cycle": 2, "core_count": 128,
       "channel": {"distance_m": 20, "state": "good"}}
    ],
    "profile": {"num_layers": 4, "flops_per_layer": 1000000000,
                "flops_head": 500000000, "smashed_bits_per_layer": 1000000,
                "adapter_bits_per_layer": 10000}
  })");
}

std::string error_of(const json& doc, bool strict = true) {
  try {
    parse_scenario(doc.dump(), "", LoadOptions{strict});
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("builtin fleet constants") {
  const Scenario s = builtin_reference_scenario();
  REQUIRE(s.devices.size() == 5);
  CHECK(s.devices[2].spec.core_count == 1792.0);
  CHECK(s.devices[0].spec.gpu_freq_hz == 1.3e9);
  CHECK(s.devices[4].spec.gpu_freq_hz == 0.5e9);
  CHECK(s.devices[4].spec.core_count == 512.0);
  for (const auto& d : s.devices) CHECK(d.spec.flops_per_cycle == 2.0);
  CHECK(s.server.max_freq_hz == 2.46e9);
  CHECK(s.server.core_count == 3072.0);
  CHECK(s.server.flops_per_cycle == 2.0);
  CHECK(s.server.power_coeff == 1e-25);
  CHECK(s.compression_ratio == 0.1);
  CHECK(s.local_epochs == 5);
  CHECK(s.weight == 0.2);
  CHECK(s.profile == default_llama_profile());
  CHECK(s.devices[0].channel.pathloss_exponent == 4.0);
  CHECK(builtin_reference_scenario(ChannelState::kPoor).devices[3].channel.pathloss_exponent ==
        6.0);
  CHECK(builtin_reference_scenario(ChannelState::kGood).devices[3].channel.pathloss_exponent ==
        2.0);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("shipped reference fleet equals the builtin scenario") {
  const Scenario s = load_scenario(kScenarioDir + "/reference_fleet.json");
  CHECK(s == builtin_reference_scenario());
}

TEST_CASE("shipped example scenarios load") {
  for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path().string()));
  }
}

TEST_CASE("defaults and channel overrides") {
  const Scenario s = parse_scenario(minimal().dump(), "");
  CHECK(s.rounds == 100);
  CHECK(s.seed == 42);
  CHECK(s.policies.size() == 3);
  CHECK(s.devices[0].channel == ChannelConfig{});
  CHECK(s.devices[1].channel.distance_m == 20.0);
  CHECK(s.devices[1].channel.pathloss_exponent == 2.0);
  CHECK(s.devices[1].channel.bandwidth_hz == ChannelConfig{}.bandwidth_hz);
  CHECK_FALSE(s.model.has_value());
  CHECK(s.profile.grad_bits(0) == 1'000'000);

  auto doc = minimal();
  doc["channel"] = {{"bandwidth_hz", 5e6}, {"fading", "none"}};
  const Scenario t = parse_scenario(doc.dump(), "");
  CHECK(t.devices[0].channel.bandwidth_hz == 5e6);
  CHECK(t.devices[1].channel.bandwidth_hz == 5e6);
  CHECK(t.devices[1].channel.fading == Fading::kNone);
}

TEST_CASE("errors name the offending field") {
  auto doc = minimal();
  doc["devices"] = json::array();
  CHECK(contains(error_of(doc), "devices"));

  doc = minimal();
  doc["weight"] = 1.5;
  CHECK(contains(error_of(doc), "weight"));

  doc = minimal();
  doc["devices"][1]["core_count"] = -4;
  CHECK(contains(error_of(doc), "devices[1].core_count"));

  doc = minimal();
  doc["devices"][0].erase("gpu_freq_hz");
  CHECK(contains(error_of(doc), "devices[0].gpu_freq_hz"));

  doc = minimal();
  doc["devices"][1]["channel"]["state"] = "stormy";
  CHECK(contains(error_of(doc), "devices[1].channel.state"));

  doc = minimal();
  doc["devices"][1]["channel"]["pathloss_exponent"] = 3.0;
  CHECK(contains(error_of(doc), "devices[1].channel.state"));

  doc = minimal();
  doc["server"]["power_coeff"] = "big";
  CHECK(contains(error_of(doc), "server.power_coeff"));

  doc = minimal();
  doc.erase("server");
  CHECK(contains(error_of(doc), "server"));

  doc = minimal();
  doc["profile"]["num_layers"] = -1;
  CHECK(contains(error_of(doc), "profile.num_layers"));

  doc = minimal();
  doc["policies"] = {"card", "cut:9"};
  CHECK(contains(error_of(doc), "policies"));

  doc = minimal();
  doc["policies"] = {"card", "teleport"};
  CHECK(contains(error_of(doc), "policies[1]"));

  doc = minimal();
  doc["channel"] = {{"mapping_table", json::array({{0, 1.0}, {-1, 2.0}})}};
  CHECK(contains(error_of(doc), "channel.mapping_table"));

  CHECK_THROWS_AS(parse_scenario("{not json", ""), ValidationError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), IoError);
}

TEST_CASE("infeasible fleet is reported") {
  auto doc = minimal();
  doc["devices"][0]["core_count"] = 1e6;
  CHECK_THROWS_AS(parse_scenario(doc.dump(), ""), InfeasibleError);
  CHECK(contains(error_of(doc), "devices[0]"));
}

TEST_CASE("unknown fields: strict rejects, lenient warns") {
  auto doc = minimal();
  doc["devices"][0]["colour"] = "red";
  doc["extra"] = 1;
  CHECK(contains(error_of(doc), "devices[0].colour"));

  std::vector<std::string> warnings;
  const Scenario s = parse_scenario(doc.dump(), "", LoadOptions{false}, &warnings);
  CHECK(s.devices.size() == 2);
  REQUIRE(warnings.size() == 2);
  CHECK(contains(warnings[0] + warnings[1], "devices[0].colour"));
  CHECK(contains(warnings[0] + warnings[1], "extra"));
}

TEST_CASE("save and load round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "cardsim_scenario_test";
  std::filesystem::create_directories(dir);

  Scenario a = builtin_reference_scenario(ChannelState::kPoor);
  a.name = "round trip";
  a.seed = 123456789012345ULL;
  a.weight = 0.37;
  a.policies = {Policy::card(), Policy::fixed_cut(7), Policy::fixed_freq(1.234567e9),
                Policy::fixed(3, 2e9)};
  a.devices[2].channel.distance_m = 12.5;
  a.devices[2].channel.fading = Fading::kNone;
  save_scenario(a, (dir / "a.json").string());
  CHECK(load_scenario((dir / "a.json").string()) == a);

  Scenario b = parse_scenario(minimal().dump(), "");
  b.profile = LlmProfile::custom(7, {10, 20, 30}, 9, {1, 2, 3, 4}, {5, 6, 7, 8}, {0, 1, 2}, 4);
  b.mapping_table = MappingTable({{-3.5, 0.25}, {1.0 / 3.0, 1.1}, {9, 2.5}});
  save_scenario(b, (dir / "b.json").string());
  CHECK(load_scenario((dir / "b.json").string()) == b);
  CHECK(to_json(load_scenario((dir / "b.json").string())) == to_json(b));

  std::filesystem::remove_all(dir);
}

TEST_CASE("mapping table path resolves next to the scenario") {
  const auto dir = std::filesystem::temp_directory_path() / "cardsim_table_test";
  std::filesystem::create_directories(dir / "tables");
  {
    std::ofstream t(dir / "tables" / "t.csv");
    t << "min_snr_db,spectral_efficiency\n0,1\n10,2\n";
  }
  auto doc = minimal();
  doc["channel"] = {{"mapping_table", "tables/t.csv"}};
  {
    std::ofstream f(dir / "s.json");
    f << doc.dump();
  }
  const Scenario s = load_scenario((dir / "s.json").string());
  CHECK(s.mapping_table.rows().size() == 2);

  doc["channel"] = {{"mapping_table", "tables/missing.csv"}};
  {
    std::ofstream f(dir / "s.json");
    f << doc.dump();
  }
  CHECK_THROWS_AS(load_scenario((dir / "s.json").string()), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model-derived profile and sweep setters") {
  auto doc = minimal();
  doc["profile"] = {{"model", {{"num_layers", 16}, {"batch_size", 2}}}};
  Scenario s = parse_scenario(doc.dump(), "");
  REQUIRE(s.model.has_value());
  CHECK(s.profile.num_layers() == 16);
  const auto before = s.profile.smashed_bits(0);
  set_batch_size(s, 4);
  CHECK(s.profile.smashed_bits(0) == 2 * before);
  CHECK_THROWS_AS(set_batch_size(s, 0), ValidationError);

  set_pathloss_exponent(s, 3.0);
  for (const auto& d : s.devices) CHECK(d.channel.pathloss_exponent == 3.0);
  CHECK_THROWS_AS(set_pathloss_exponent(s, 0.0), ValidationError);

  Scenario raw = parse_scenario(minimal().dump(), "");
  CHECK_THROWS_AS(set_batch_size(raw, 8), ValidationError);
}

TEST_CASE("policy names") {
  for (const auto& p : {Policy::card(), Policy::server_only(), Policy::device_only(),
                        Policy::fixed_cut(5), Policy::fixed_freq(1.5e9),
                        Policy::fixed(4, 0.123456789e9)}) {
    CHECK(parse_policy(p.name()) == p);
  }
  CHECK(Policy::fixed(4, 2e9).name() == "cut:4@freq:2e+09");
  CHECK(parse_policy_list("card,server-only, device-only").size() == 3);
  CHECK_THROWS_AS(parse_policy("cut:-1"), ValidationError);
  CHECK_THROWS_AS(parse_policy("freq:abc"), ValidationError);
  CHECK_THROWS_AS(parse_policy_list(""), ValidationError);
}
