// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cardsim/cost_model.hpp"
#include "cardsim/llm_profile.hpp"
#include "cardsim/policy.hpp"
#include "cardsim/wireless_channel.hpp"

namespace cardsim {

struct DeviceEntry {
  DeviceSpec spec;
  ChannelConfig channel;
  bool operator==(const DeviceEntry&) const = default;
};

/// Complete, validated description of one experiment.
struct Scenario {
  std::string name;
  std::vector<DeviceEntry> devices;
  ServerSpec server;
  LlmProfile profile;
  // Set when the profile was derived from an architecture; required for
  // batch-size sweeps.
  std::optional<TransformerShape> model;
  MappingTable mapping_table = MappingTable::default_cqi();
  std::uint32_t local_epochs = 5;
  double compression_ratio = 0.1;
  double weight = 0.2;
  std::uint32_t rounds = 100;
  std::uint64_t seed = 42;
  std::vector<Policy> policies;

  bool operator==(const Scenario&) const = default;

  /// Checks every invariant, including per-device frequency feasibility.
  /// Throws ValidationError / InfeasibleError.
  void validate() const;
  /// Checks fixed cuts and frequencies of `list` against this fleet.
  void validate_policies(const std::vector<Policy>& list) const;

  /// Cost inputs for `device` under `channel`. The returned value borrows
  /// this scenario's profile.
  RoundCostInputs inputs_for(std::uint32_t device,
                             const ChannelRealization& channel) const;
};

/// Five-device fleet with an RTX-4060Ti-class server: server 2.46 GHz x 3072
/// cores; devices (GHz, cores) = (1.3, 2048), (1.0, 2048), (0.7, 1792),
/// (0.7, 1024), (0.5, 512); 2 FLOPs/cycle/core everywhere; power coefficient
/// 1e-25; T = 5, compression 0.1, w = 0.2; default LLaMA profile; 100 rounds,
/// seed 42; policies card, server-only, device-only.
Scenario builtin_reference_scenario(ChannelState state = ChannelState::kNormal);

struct LoadOptions {
  /// Reject unknown fields. When false they are reported as warnings.
  bool strict = true;
};

/// Parses scenario JSON. Relative mapping-table paths resolve against
/// `base_dir`. Errors name the offending field path (e.g. `devices[2].core_count`).
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir,
                        const LoadOptions& options = {},
                        std::vector<std::string>* warnings = nullptr);

Scenario load_scenario(const std::string& path, const LoadOptions& options = {},
                       std::vector<std::string>* warnings = nullptr);

/// Serializes to the same schema parse_scenario reads; the mapping table is
/// written inline.
std::string to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

void set_pathloss_exponent(Scenario& scenario, double exponent);
/// Rebuilds the profile at a new mini-batch size. Requires `model`.
void set_batch_size(Scenario& scenario, std::uint32_t batch_size);

}  // namespace cardsim
