// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>

#include "cardsim/llm_profile.hpp"
#include "cardsim/wireless_channel.hpp"

namespace cardsim {

struct DeviceSpec {
  std::string label;
  double gpu_freq_hz = 0.0;
  double flops_per_cycle = 0.0;  // per core
  double core_count = 0.0;

  bool operator==(const DeviceSpec&) const = default;
  void validate() const;
  /// FLOP/s the device sustains.
  double flops_rate() const { return gpu_freq_hz * flops_per_cycle * core_count; }
};

struct ServerSpec {
  std::string label;
  double max_freq_hz = 0.0;
  double flops_per_cycle = 0.0;
  double core_count = 0.0;
  /// GPU power is power_coeff * f^3 (W / (cycle/s)^3).
  double power_coeff = 0.0;

  bool operator==(const ServerSpec&) const = default;
  void validate() const;
  /// FLOPs executed per cycle across all cores.
  double flops_per_hz() const { return flops_per_cycle * core_count; }
};

/// Everything a single (device, round) cost evaluation depends on. The
/// profile is borrowed and must outlive the inputs.
struct RoundCostInputs {
  const LlmProfile& profile;
  DeviceSpec device;
  ServerSpec server;
  ChannelRealization channel;
  std::uint32_t local_epochs = 1;
  double compression_ratio = 1.0;
  double weight = 0.5;

  void validate() const;
};

struct NormBounds {
  double d_min_s = 0.0;
  double d_max_s = 0.0;
  double e_min_j = 0.0;
  double e_max_j = 0.0;

  bool delay_degenerate() const { return !(d_max_s > d_min_s); }
  bool energy_degenerate() const { return !(e_max_j > e_min_j); }
  bool operator==(const NormBounds&) const = default;
};

struct CostBreakdown {
  double device_compute_s = 0.0;  // per local epoch
  double server_compute_s = 0.0;  // per local epoch
  double transmission_s = 0.0;    // whole round
  double total_delay_s = 0.0;
  double server_energy_j = 0.0;
  double normalized_cost = 0.0;
};

/// Lowest server frequency at which the server is at least as fast per FLOP
/// as `device`. Throws InfeasibleError if it exceeds the server maximum.
double f_min_for_device(const DeviceSpec& device, const ServerSpec& server);

/// Per local epoch.
double device_compute_delay(const RoundCostInputs& in, std::uint32_t cut);
/// Per local epoch.
double server_compute_delay(const RoundCostInputs& in, std::uint32_t cut,
                            double f_server);
/// Smashed data and gradients every epoch plus the adapter download and
/// upload once per round. Throws LinkOutage when a zero-rate link must carry
/// a nonzero payload.
double transmission_delay(const RoundCostInputs& in, std::uint32_t cut);
double total_delay(const RoundCostInputs& in, std::uint32_t cut, double f_server);
double server_energy(const RoundCostInputs& in, std::uint32_t cut,
                     double f_server);

/// Normalization bounds for this round: the delay maximum / energy minimum
/// at (cut = I, f = F_min) and the delay minimum / energy maximum at
/// (cut = 0, f = F_max).
NormBounds norm_bounds(const RoundCostInputs& in);

/// Weighted normalized cost. A degenerate bound (max == min) contributes 0.
double cost(const RoundCostInputs& in, const NormBounds& bounds,
            std::uint32_t cut, double f_server);

/// Same as cost(), keeping the intermediate terms.
CostBreakdown breakdown(const RoundCostInputs& in, const NormBounds& bounds,
                        std::uint32_t cut, double f_server);

}  // namespace cardsim
