// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/card_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "cardsim/wireless_channel.hpp"

namespace cardsim {

FrequencyChoice optimal_frequency(const RoundCostInputs& in, const NormBounds& b) {
  const double f_min = f_min_for_device(in.device, in.server);
  const double f_max = in.server.max_freq_hz;
  const double w = in.weight;
  if (w >= 1.0 || b.energy_degenerate()) return {f_max, true};
  if (w <= 0.0 || b.delay_degenerate()) return {f_min, true};

  const double q = std::cbrt(w * (b.e_max_j - b.e_min_j) /
                             (2.0 * in.server.power_coeff * (1.0 - w) *
                              (b.d_max_s - b.d_min_s)));
  if (q < f_min) return {f_min, true};
  if (q > f_max) return {f_max, true};
  return {q, false};
}

RoundDecision evaluate_choice(const RoundCostInputs& in, const NormBounds& bounds,
                              std::uint32_t cut, double f_server, bool clamped) {
  RoundDecision d;
  d.cut_layer = cut;
  d.server_freq_hz = f_server;
  d.breakdown = breakdown(in, bounds, cut, f_server);
  d.cost = d.breakdown.normalized_cost;
  d.bounds = bounds;
  d.clamped = clamped;
  return d;
}

namespace {

RoundDecision scan_cuts(const RoundCostInputs& in, const NormBounds& bounds,
                        double f_server, bool clamped,
                        std::vector<CutEvaluation>* scan) {
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_cut = 0;
  const std::uint32_t I = in.profile.num_layers();
  if (scan) {
    scan->clear();
    scan->reserve(I + 1);
  }
  for (std::uint32_t c = 0; c <= I; ++c) {
    double u;
    if (scan) {
      scan->push_back({c, breakdown(in, bounds, c, f_server)});
      u = scan->back().breakdown.normalized_cost;
    } else {
      u = cost(in, bounds, c, f_server);
    }
    if (u < best) {
      best = u;
      best_cut = c;
    }
  }
  return evaluate_choice(in, bounds, best_cut, f_server, clamped);
}

}  // namespace

RoundDecision card_decide(const RoundCostInputs& in, std::vector<CutEvaluation>* scan) {
  const NormBounds bounds = norm_bounds(in);
  const FrequencyChoice f = optimal_frequency(in, bounds);
  return scan_cuts(in, bounds, f.freq_hz, f.clamped, scan);
}

RoundDecision best_cut_at(const RoundCostInputs& in, const NormBounds& bounds,
                          double f_server) {
  return scan_cuts(in, bounds, f_server, false, nullptr);
}

P1Solution solve_p1(const Scenario& s, unsigned threads) {
  s.validate();
  const std::size_t M = s.devices.size();
  P1Solution out;
  out.decisions.assign(M, {});
  out.outage_redraws.assign(M, {});

  auto solve_device = [&](std::uint32_t m) {
    auto& decisions = out.decisions[m];
    auto& redraws = out.outage_redraws[m];
    decisions.reserve(s.rounds);
    redraws.reserve(s.rounds);
    for (std::uint32_t n = 0; n < s.rounds; ++n) {
      const RoundChannel ch = draw_feasible_round_channel(
          s.devices[m].channel, s.mapping_table, s.seed, m, n);
      decisions.push_back(card_decide(s.inputs_for(m, ch.realization)));
      redraws.push_back(ch.outage_redraws);
    }
  };

  if (threads > 1) {
    std::vector<std::future<void>> jobs;
    for (std::uint32_t m = 0; m < M; ++m) {
      jobs.push_back(std::async(std::launch::async, solve_device, m));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::uint32_t m = 0; m < M; ++m) solve_device(m);
  }

  // Summed in (device, round) order regardless of scheduling.
  for (const auto& row : out.decisions) {
    for (const auto& d : row) out.total_cost += d.cost;
  }
  return out;
}

}  // namespace cardsim
