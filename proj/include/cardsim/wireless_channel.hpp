// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cardsim {

/// Named channel conditions, expressed through the path-loss exponent.
enum class ChannelState { kGood, kNormal, kPoor };

double pathloss_exponent(ChannelState state);
std::string_view to_string(ChannelState state);
/// Accepts "good", "normal", "poor" (case-insensitive).
ChannelState parse_channel_state(std::string_view name);

enum class Fading { kNone, kRayleigh };

/// Link budget of one device <-> access point pair. Each device owns a
/// dedicated band of `bandwidth_hz`.
struct ChannelConfig {
  double bandwidth_hz = 10e6;
  double uplink_tx_power_dbm = 23.0;
  double downlink_tx_power_dbm = 30.0;
  double noise_psd_dbm_hz = -174.0;
  double distance_m = 50.0;
  double pathloss_exponent = 4.0;
  double reference_pathloss_db = 20.0;
  Fading fading = Fading::kRayleigh;

  bool operator==(const ChannelConfig&) const = default;

  /// Throws ValidationError naming the first violated field.
  void validate() const;
};

struct MappingRow {
  double min_snr_db;
  double spectral_efficiency;  // bit/s/Hz
  bool operator==(const MappingRow&) const = default;
};

/// Piecewise-constant SNR -> spectral efficiency map (CQI table). Rows are
/// strictly increasing in both columns; SNR below the first row maps to 0.
class MappingTable {
 public:
  MappingTable() = default;
  explicit MappingTable(std::vector<MappingRow> rows);

  /// 15-level 64QAM CQI efficiencies with thresholds -6 dB .. 22 dB in 2 dB
  /// steps.
  static MappingTable default_cqi();

  /// CSV with header `min_snr_db,spectral_efficiency`.
  static MappingTable from_csv(std::istream& in);
  static MappingTable load_csv(const std::string& path);

  const std::vector<MappingRow>& rows() const { return rows_; }

  /// Efficiency of the highest row whose threshold is <= snr_db.
  double efficiency(double snr_db) const;

  bool operator==(const MappingTable&) const = default;

 private:
  std::vector<MappingRow> rows_;
};

/// SNR of the link under `config` for a transmit power and small-scale power
/// gain. A zero gain yields -infinity.
double snr_db(const ChannelConfig& config, double tx_power_dbm,
              double fading_gain);

double rate_from_snr(const MappingTable& table, double snr_db,
                     double bandwidth_hz);

struct ChannelRealization {
  double snr_up_db = 0.0;
  double snr_down_db = 0.0;
  double rate_up_bps = 0.0;    // device -> server
  double rate_down_bps = 0.0;  // server -> device
  bool operator==(const ChannelRealization&) const = default;
};

/// Deterministic random stream for one (seed, device, round, attempt) cell.
/// Distinct cells get decorrelated 64-bit seeds via splitmix64 mixing.
std::mt19937_64 make_round_stream(std::uint64_t seed, std::uint32_t device,
                                  std::uint32_t round, std::uint32_t attempt = 0);

/// Unit-mean exponential variate (power gain of a Rayleigh amplitude).
/// Uses inverse-CDF sampling on 53 random bits so the sequence is identical
/// across standard library implementations.
double draw_exponential(std::mt19937_64& stream);

/// Draws independent uplink and downlink fading gains from `stream` and
/// evaluates the link budget for both directions.
ChannelRealization draw_round_channel(const ChannelConfig& config,
                                      const MappingTable& table,
                                      std::mt19937_64& stream);

struct RoundChannel {
  ChannelRealization realization;
  std::uint32_t outage_redraws = 0;
};

/// Draws the channel of (device, round), re-drawing the fading with the next
/// attempt index while either direction has zero rate. Throws LinkOutage after
/// `max_redraws` failed attempts.
RoundChannel draw_feasible_round_channel(const ChannelConfig& config,
                                         const MappingTable& table,
                                         std::uint64_t seed,
                                         std::uint32_t device,
                                         std::uint32_t round,
                                         std::uint32_t max_redraws = 10000);

}  // namespace cardsim
