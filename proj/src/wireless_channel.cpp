// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/wireless_channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cardsim/errors.hpp"

namespace cardsim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

double pathloss_exponent(ChannelState state) {
  switch (state) {
    case ChannelState::kGood:
      return 2.0;
    case ChannelState::kNormal:
      return 4.0;
    case ChannelState::kPoor:
      return 6.0;
  }
  return 4.0;
}

std::string_view to_string(ChannelState state) {
  switch (state) {
    case ChannelState::kGood:
      return "good";
    case ChannelState::kNormal:
      return "normal";
    case ChannelState::kPoor:
      return "poor";
  }
  return "normal";
}

ChannelState parse_channel_state(std::string_view name) {
  const std::string n = lower(name);
  if (n == "good") return ChannelState::kGood;
  if (n == "normal") return ChannelState::kNormal;
  if (n == "poor") return ChannelState::kPoor;
  throw ValidationError("unknown channel state '" + std::string(name) +
                        "' (expected good, normal or poor)");
}

void ChannelConfig::validate() const {
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
    throw ValidationError("bandwidth_hz must be > 0");
  }
  if (!(pathloss_exponent > 0.0) || !std::isfinite(pathloss_exponent)) {
    throw ValidationError("pathloss_exponent must be > 0");
  }
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw ValidationError("distance_m must be > 0");
  }
  for (double v : {uplink_tx_power_dbm, downlink_tx_power_dbm,
                   noise_psd_dbm_hz, reference_pathloss_db}) {
    if (!std::isfinite(v)) {
      throw ValidationError("link budget terms must be finite");
    }
  }
}

MappingTable::MappingTable(std::vector<MappingRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw ValidationError("mapping table: at least one row required");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.min_snr_db) || !std::isfinite(r.spectral_efficiency) ||
        !(r.spectral_efficiency > 0.0)) {
      throw ValidationError("mapping table: row " + std::to_string(i) +
                            " must be finite with positive efficiency");
    }
    if (i > 0 && (!(r.min_snr_db > rows_[i - 1].min_snr_db) ||
                  !(r.spectral_efficiency > rows_[i - 1].spectral_efficiency))) {
      throw ValidationError("mapping table: row " + std::to_string(i) +
                            " not strictly increasing");
    }
  }
}

MappingTable MappingTable::default_cqi() {
  // 64QAM CQI table efficiencies (CQI 1..15).
  static constexpr double kEfficiency[15] = {
      0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
      2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};
  std::vector<MappingRow> rows;
  rows.reserve(15);
  for (int i = 0; i < 15; ++i) {
    rows.push_back({-6.0 + 2.0 * i, kEfficiency[i]});
  }
  return MappingTable(std::move(rows));
}

MappingTable MappingTable::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      lower(trim(line)) != "min_snr_db,spectral_efficiency") {
    throw ValidationError(
        "mapping table: expected header 'min_snr_db,spectral_efficiency'");
  }
  std::vector<MappingRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("mapping table: line " + std::to_string(line_no) +
                            ": expected two columns");
    }
    try {
      std::size_t used_a = 0;
      std::size_t used_b = 0;
      const std::string a = trim(line.substr(0, comma));
      const std::string b = trim(line.substr(comma + 1));
      MappingRow row{std::stod(a, &used_a), std::stod(b, &used_b)};
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("");
      rows.push_back(row);
    } catch (const std::logic_error&) {
      throw ValidationError("mapping table: line " + std::to_string(line_no) +
                            ": not a number pair");
    }
  }
  return MappingTable(std::move(rows));
}

MappingTable MappingTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open mapping table '" + path + "'");
  }
  return from_csv(in);
}

double MappingTable::efficiency(double snr) const {
  // First row with threshold > snr; the row before it is the match.
  auto it = std::upper_bound(
      rows_.begin(), rows_.end(), snr,
      [](double v, const MappingRow& r) { return v < r.min_snr_db; });
  if (it == rows_.begin()) return 0.0;
  return std::prev(it)->spectral_efficiency;
}

double snr_db(const ChannelConfig& c, double tx_power_dbm, double fading_gain) {
  if (fading_gain <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  const double pathloss =
      c.reference_pathloss_db + 10.0 * c.pathloss_exponent * std::log10(c.distance_m);
  const double noise = c.noise_psd_dbm_hz + 10.0 * std::log10(c.bandwidth_hz);
  return tx_power_dbm - pathloss - noise + 10.0 * std::log10(fading_gain);
}

double rate_from_snr(const MappingTable& table, double snr, double bandwidth_hz) {
  return table.efficiency(snr) * bandwidth_hz;
}

std::mt19937_64 make_round_stream(std::uint64_t seed, std::uint32_t device,
                                  std::uint32_t round, std::uint32_t attempt) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state ^= (std::uint64_t{device} << 32) | round;
  h ^= splitmix64(state);
  state ^= std::uint64_t{attempt} * 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(state);
  return std::mt19937_64(h);
}

double draw_exponential(std::mt19937_64& stream) {
  const double u = static_cast<double>(stream() >> 11) * 0x1.0p-53;  // [0, 1)
  return -std::log1p(-u);
}

ChannelRealization draw_round_channel(const ChannelConfig& config,
                                      const MappingTable& table,
                                      std::mt19937_64& stream) {
  double gain_up = 1.0;
  double gain_down = 1.0;
  if (config.fading == Fading::kRayleigh) {
    gain_up = draw_exponential(stream);
    gain_down = draw_exponential(stream);
  }
  ChannelRealization r;
  r.snr_up_db = snr_db(config, config.uplink_tx_power_dbm, gain_up);
  r.snr_down_db = snr_db(config, config.downlink_tx_power_dbm, gain_down);
  r.rate_up_bps = rate_from_snr(table, r.snr_up_db, config.bandwidth_hz);
  r.rate_down_bps = rate_from_snr(table, r.snr_down_db, config.bandwidth_hz);
  return r;
}

RoundChannel draw_feasible_round_channel(const ChannelConfig& config,
                                         const MappingTable& table,
                                         std::uint64_t seed,
                                         std::uint32_t device,
                                         std::uint32_t round,
                                         std::uint32_t max_redraws) {
  for (std::uint32_t attempt = 0; attempt <= max_redraws; ++attempt) {
    auto stream = make_round_stream(seed, device, round, attempt);
    RoundChannel out{draw_round_channel(config, table, stream), attempt};
    if (out.realization.rate_up_bps > 0.0 && out.realization.rate_down_bps > 0.0) {
      return out;
    }
    if (config.fading == Fading::kNone) break;
  }
  throw LinkOutage("device " + std::to_string(device) + " round " +
                   std::to_string(round) +
                   ": link in outage (SNR below the lowest table threshold)");
}

}  // namespace cardsim
