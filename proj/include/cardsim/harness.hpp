// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cardsim/card_optimizer.hpp"
#include "cardsim/policy.hpp"
#include "cardsim/scenario.hpp"

namespace cardsim {

/// Steps of one split fine-tuning round in the order they happen.
enum class Stage {
  kSplit,             // server partitions the adapters at the cut (no cost)
  kAdapterDownload,   // device-side adapters, server -> device
  kDeviceCompute,     // device FP + BP of one local epoch
  kSmashedUplink,     // activations at the cut, device -> server
  kServerCompute,     // server FP + BP of one local epoch
  kGradientDownlink,  // activation gradient, server -> device
  kAdapterUpload,     // trained device-side adapters, device -> server
};

std::string_view to_string(Stage stage);

struct StageEvent {
  Stage stage;
  std::uint32_t epoch;  // 0 for the once-per-round stages
  double start_s;
  double duration_s;
};

struct RoundTrace {
  std::uint32_t device = 0;
  std::uint32_t round = 0;
  Policy policy;
  std::uint32_t cut_layer = 0;
  double server_freq_hz = 0.0;
  bool clamped = false;
  std::vector<StageEvent> events;
  double delay_s = 0.0;
  double energy_j = 0.0;
  double cost_u = 0.0;
  NormBounds bounds;
  ChannelRealization channel;
  std::uint32_t outage_redraws = 0;

  /// Sum of all event durations.
  double stage_sum_s() const;
};

/// Chooses (cut, frequency) for one round according to `policy`.
RoundDecision decide(const RoundCostInputs& in, const Policy& policy);

/// Lays out the timed events of a round at the given decision.
std::vector<StageEvent> round_timeline(const RoundCostInputs& in,
                                       std::uint32_t cut, double f_server);

/// Draws the (device, round) channel and replays the round under `policy`.
RoundTrace simulate_round(const Scenario& scenario, std::uint32_t device,
                          std::uint32_t round, const Policy& policy);

struct SummaryRow {
  std::string policy;
  std::string device;  // device index, or "all" for the fleet mean
  double mean_delay_s = 0.0;
  double mean_energy_j = 0.0;
  double mean_cost_u = 0.0;
};

struct ReductionRow {
  std::string metric;    // delay_reduction | energy_reduction
  std::string baseline;  // policy name
  double value_pct = 0.0;
};

struct ExperimentResult {
  std::vector<Policy> policies;
  /// traces[policy][device][round]
  std::vector<std::vector<std::vector<RoundTrace>>> traces;
  std::vector<SummaryRow> summary;
  /// CARD versus every other policy; empty when CARD is not among policies.
  std::vector<ReductionRow> reductions;

  /// Mean over all devices and rounds.
  double mean_delay(std::size_t policy) const;
  double mean_energy(std::size_t policy) const;
  double mean_cost(std::size_t policy) const;
  /// Percent reduction of CARD against `baseline` for metric "delay" or
  /// "energy". Throws RangeError if not present.
  double reduction_pct(std::string_view metric, std::string_view baseline) const;
};

/// Runs every policy over all devices and rounds. Channel draws depend only
/// on (seed, device, round), so policies see identical channels.
ExperimentResult run_experiment(const Scenario& scenario,
                                const std::vector<Policy>& policies,
                                unsigned threads = 1);

/// rounds.csv, summary.csv and reductions.csv under `dir` (created if
/// missing).
void write_results(const ExperimentResult& result, const std::string& dir);

std::string rounds_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);
std::string reductions_csv(const ExperimentResult& result);

/// One row per candidate cut: cut_layer,cost_u,delay_s,energy_j.
std::string decisions_csv(const std::vector<CutEvaluation>& scan);

}  // namespace cardsim
