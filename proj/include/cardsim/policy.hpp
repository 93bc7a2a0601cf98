// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cardsim {

/// How (cut, frequency) is chosen in a round.
///
/// Fixed-cut policies (including the server-only and device-only baselines)
/// use the same closed-form frequency as CARD at their fixed cut; fixed-
/// frequency policies search the cut at the given frequency.
struct Policy {
  enum class Kind {
    kCard,          // closed-form frequency + exhaustive cut search
    kServerOnly,    // cut 0: only the embedding on the device
    kDeviceOnly,    // cut I: all transformer layers on the device
    kFixedCut,      // cut = `cut`
    kFixedFreq,     // f = `freq_hz`, best cut
    kFixedCutFreq,  // both fixed
  };

  Kind kind = Kind::kCard;
  std::uint32_t cut = 0;
  double freq_hz = 0.0;

  static Policy card() { return {Kind::kCard}; }
  static Policy server_only() { return {Kind::kServerOnly}; }
  static Policy device_only() { return {Kind::kDeviceOnly}; }
  static Policy fixed_cut(std::uint32_t c) { return {Kind::kFixedCut, c}; }
  static Policy fixed_freq(double f) { return {Kind::kFixedFreq, 0, f}; }
  static Policy fixed(std::uint32_t c, double f) {
    return {Kind::kFixedCutFreq, c, f};
  }

  bool operator==(const Policy&) const = default;

  /// Canonical name: card, server-only, device-only, cut:<c>, freq:<hz>,
  /// cut:<c>@freq:<hz>.
  std::string name() const;
};

/// Inverse of Policy::name(). Throws ValidationError.
Policy parse_policy(std::string_view text);

/// Comma-separated list of policy names.
std::vector<Policy> parse_policy_list(std::string_view text);

}  // namespace cardsim
