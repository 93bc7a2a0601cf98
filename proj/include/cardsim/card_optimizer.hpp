// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <vector>

#include "cardsim/cost_model.hpp"
#include "cardsim/scenario.hpp"

namespace cardsim {

/// Optimal (cut, server frequency) for one device in one round.
struct RoundDecision {
  std::uint32_t cut_layer = 0;
  double server_freq_hz = 0.0;
  double cost = 0.0;
  CostBreakdown breakdown;
  NormBounds bounds;
  /// True when the frequency sits on F_min or F_max rather than at the
  /// interior stationary point.
  bool clamped = false;
};

struct FrequencyChoice {
  double freq_hz = 0.0;
  bool clamped = false;
};

/// Minimizer of the cost over f in [F_min, F_max] for any fixed cut.
///
/// With D = a_c + b_c / f and E = k_c f^2 the stationary point of
///   w (D - D_min) / (D_max - D_min) + (1 - w) (E - E_min) / (E_max - E_min)
/// is f^3 = w (E_max - E_min) / (2 xi (1 - w) (D_max - D_min)); b_c / k_c is
/// 1 / xi for every cut, so the result does not depend on the cut. The cost is
/// convex in f, so clamping the stationary point to the interval is exact.
///
/// Limits: w = 1 gives F_max, w = 0 gives F_min. A degenerate delay bound
/// leaves only the (increasing) energy term, giving F_min; a degenerate
/// energy bound leaves only the (decreasing) delay term, giving F_max.
FrequencyChoice optimal_frequency(const RoundCostInputs& in, const NormBounds& bounds);

/// One entry per candidate cut, as evaluated by card_decide.
struct CutEvaluation {
  std::uint32_t cut_layer = 0;
  CostBreakdown breakdown;
};

/// Closed-form frequency followed by an exhaustive scan of the I + 1 cuts.
/// Ties resolve to the smaller cut. If `scan` is non-null it receives every
/// evaluated cut in order.
RoundDecision card_decide(const RoundCostInputs& in,
                          std::vector<CutEvaluation>* scan = nullptr);

/// Best cut at a given frequency (used by fixed-frequency policies).
RoundDecision best_cut_at(const RoundCostInputs& in, const NormBounds& bounds,
                          double f_server);

/// Evaluates a fixed (cut, frequency) pair.
RoundDecision evaluate_choice(const RoundCostInputs& in, const NormBounds& bounds,
                              std::uint32_t cut, double f_server, bool clamped);

struct P1Solution {
  /// decisions[device][round]
  std::vector<std::vector<RoundDecision>> decisions;
  /// outage_redraws[device][round]
  std::vector<std::vector<std::uint32_t>> outage_redraws;
  double total_cost = 0.0;
};

/// Solves every (device, round) subproblem independently and sums the
/// minimal costs. `threads` > 1 evaluates devices concurrently; the result
/// is bit-identical to a sequential run.
P1Solution solve_p1(const Scenario& scenario, unsigned threads = 1);

}  // namespace cardsim
