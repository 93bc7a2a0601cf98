// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/harness.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "cardsim/errors.hpp"
#include "cardsim/numfmt.hpp"

namespace cardsim {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kSplit:
      return "split";
    case Stage::kAdapterDownload:
      return "adapter_download";
    case Stage::kDeviceCompute:
      return "device_compute";
    case Stage::kSmashedUplink:
      return "smashed_uplink";
    case Stage::kServerCompute:
      return "server_compute";
    case Stage::kGradientDownlink:
      return "gradient_downlink";
    case Stage::kAdapterUpload:
      return "adapter_upload";
  }
  return "?";
}

double RoundTrace::stage_sum_s() const {
  double sum = 0.0;
  for (const auto& e : events) sum += e.duration_s;
  return sum;
}

RoundDecision decide(const RoundCostInputs& in, const Policy& p) {
  const std::uint32_t I = in.profile.num_layers();
  if (p.kind == Policy::Kind::kCard) return card_decide(in);

  const NormBounds bounds = norm_bounds(in);
  const double f_min = f_min_for_device(in.device, in.server);
  auto check_freq = [&](double f) {
    if (f < f_min || f > in.server.max_freq_hz) {
      throw ValidationError("policy '" + p.name() + "': frequency outside [" +
                            format_double(f_min) + ", " +
                            format_double(in.server.max_freq_hz) + "] for device '" +
                            in.device.label + "'");
    }
  };
  auto check_cut = [&](std::uint32_t c) {
    if (c > I) throw RangeError("policy '" + p.name() + "': cut exceeds layer count");
  };

  switch (p.kind) {
    case Policy::Kind::kServerOnly:
    case Policy::Kind::kDeviceOnly:
    case Policy::Kind::kFixedCut: {
      const std::uint32_t c = p.kind == Policy::Kind::kServerOnly   ? 0
                              : p.kind == Policy::Kind::kDeviceOnly ? I
                                                                    : p.cut;
      check_cut(c);
      const FrequencyChoice f = optimal_frequency(in, bounds);
      return evaluate_choice(in, bounds, c, f.freq_hz, f.clamped);
    }
    case Policy::Kind::kFixedFreq:
      check_freq(p.freq_hz);
      return best_cut_at(in, bounds, p.freq_hz);
    case Policy::Kind::kFixedCutFreq:
      check_cut(p.cut);
      check_freq(p.freq_hz);
      return evaluate_choice(in, bounds, p.cut, p.freq_hz, false);
    case Policy::Kind::kCard:
      break;
  }
  return card_decide(in);
}

std::vector<StageEvent> round_timeline(const RoundCostInputs& in, std::uint32_t cut,
                                       double f_server) {
  const double phi = in.compression_ratio;
  const double adapters = static_cast<double>(in.profile.adapter_bits(cut));
  const double smashed = phi * static_cast<double>(in.profile.smashed_bits(cut));
  const double grad = phi * static_cast<double>(in.profile.grad_bits(cut));
  auto over = [](double bits, double rate) {
    if (bits == 0.0) return 0.0;
    if (!(rate > 0.0)) throw LinkOutage("zero-rate link with a nonzero payload");
    return bits / rate;
  };

  const double device_s = device_compute_delay(in, cut);
  const double server_s = server_compute_delay(in, cut, f_server);
  const double up_s = over(smashed, in.channel.rate_up_bps);
  const double down_s = over(grad, in.channel.rate_down_bps);

  std::vector<StageEvent> events;
  events.reserve(3 + 4 * std::size_t{in.local_epochs});
  double clock = 0.0;
  auto push = [&](Stage s, std::uint32_t epoch, double duration) {
    events.push_back({s, epoch, clock, duration});
    clock += duration;
  };
  push(Stage::kSplit, 0, 0.0);
  push(Stage::kAdapterDownload, 0, over(adapters, in.channel.rate_down_bps));
  for (std::uint32_t t = 1; t <= in.local_epochs; ++t) {
    push(Stage::kDeviceCompute, t, device_s);
    push(Stage::kSmashedUplink, t, up_s);
    push(Stage::kServerCompute, t, server_s);
    push(Stage::kGradientDownlink, t, down_s);
  }
  push(Stage::kAdapterUpload, 0, over(adapters, in.channel.rate_up_bps));
  return events;
}

namespace {

RoundTrace make_trace(const RoundCostInputs& in, std::uint32_t device,
                      std::uint32_t round, const Policy& policy,
                      const RoundChannel& ch) {
  const RoundDecision d = decide(in, policy);
  RoundTrace t;
  t.device = device;
  t.round = round;
  t.policy = policy;
  t.cut_layer = d.cut_layer;
  t.server_freq_hz = d.server_freq_hz;
  t.clamped = d.clamped;
  t.events = round_timeline(in, d.cut_layer, d.server_freq_hz);
  t.delay_s = d.breakdown.total_delay_s;
  t.energy_j = d.breakdown.server_energy_j;
  t.cost_u = d.cost;
  t.bounds = d.bounds;
  t.channel = ch.realization;
  t.outage_redraws = ch.outage_redraws;
  return t;
}

}  // namespace

RoundTrace simulate_round(const Scenario& s, std::uint32_t device, std::uint32_t round,
                          const Policy& policy) {
  if (device >= s.devices.size()) {
    throw RangeError("device index " + std::to_string(device) + " out of range");
  }
  const RoundChannel ch = draw_feasible_round_channel(s.devices[device].channel,
                                                      s.mapping_table, s.seed, device, round);
  return make_trace(s.inputs_for(device, ch.realization), device, round, policy, ch);
}

double ExperimentResult::mean_delay(std::size_t p) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& dev : traces.at(p)) {
    for (const auto& t : dev) {
      sum += t.delay_s;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double ExperimentResult::mean_energy(std::size_t p) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& dev : traces.at(p)) {
    for (const auto& t : dev) {
      sum += t.energy_j;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double ExperimentResult::mean_cost(std::size_t p) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& dev : traces.at(p)) {
    for (const auto& t : dev) {
      sum += t.cost_u;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double ExperimentResult::reduction_pct(std::string_view metric,
                                       std::string_view baseline) const {
  const std::string wanted = std::string(metric) + "_reduction";
  for (const auto& r : reductions) {
    if ((r.metric == metric || r.metric == wanted) && r.baseline == baseline) {
      return r.value_pct;
    }
  }
  throw RangeError("no reduction '" + std::string(metric) + "' against '" +
                   std::string(baseline) + "'");
}

ExperimentResult run_experiment(const Scenario& s, const std::vector<Policy>& policies,
                                unsigned threads) {
  s.validate();
  if (policies.empty()) throw ValidationError("no policies to run");
  s.validate_policies(policies);
  if (s.rounds == 0) throw ValidationError("rounds: experiment has no rounds");

  const std::size_t M = s.devices.size();
  ExperimentResult r;
  r.policies = policies;
  r.traces.assign(policies.size(),
                  std::vector<std::vector<RoundTrace>>(M, std::vector<RoundTrace>(s.rounds)));

  auto run_device = [&](std::uint32_t m) {
    for (std::uint32_t n = 0; n < s.rounds; ++n) {
      const RoundChannel ch = draw_feasible_round_channel(s.devices[m].channel,
                                                          s.mapping_table, s.seed, m, n);
      const RoundCostInputs in = s.inputs_for(m, ch.realization);
      for (std::size_t p = 0; p < policies.size(); ++p) {
        r.traces[p][m][n] = make_trace(in, m, n, policies[p], ch);
      }
    }
  };
  if (threads > 1) {
    std::vector<std::future<void>> jobs;
    for (std::uint32_t m = 0; m < M; ++m) {
      jobs.push_back(std::async(std::launch::async, run_device, m));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::uint32_t m = 0; m < M; ++m) run_device(m);
  }

  for (std::size_t p = 0; p < policies.size(); ++p) {
    for (std::size_t m = 0; m < M; ++m) {
      SummaryRow row{policies[p].name(), std::to_string(m)};
      for (const auto& t : r.traces[p][m]) {
        row.mean_delay_s += t.delay_s;
        row.mean_energy_j += t.energy_j;
        row.mean_cost_u += t.cost_u;
      }
      const double n = s.rounds;
      row.mean_delay_s /= n;
      row.mean_energy_j /= n;
      row.mean_cost_u /= n;
      r.summary.push_back(row);
    }
    r.summary.push_back({policies[p].name(), "all", r.mean_delay(p), r.mean_energy(p),
                         r.mean_cost(p)});
  }

  std::size_t card = policies.size();
  for (std::size_t p = 0; p < policies.size(); ++p) {
    if (policies[p].kind == Policy::Kind::kCard) {
      card = p;
      break;
    }
  }
  if (card < policies.size()) {
    for (std::size_t p = 0; p < policies.size(); ++p) {
      if (policies[p].kind == Policy::Kind::kCard) continue;
      const double d = r.mean_delay(p);
      const double e = r.mean_energy(p);
      r.reductions.push_back({"delay_reduction", policies[p].name(),
                              d > 0.0 ? 100.0 * (1.0 - r.mean_delay(card) / d) : 0.0});
      r.reductions.push_back({"energy_reduction", policies[p].name(),
                              e > 0.0 ? 100.0 * (1.0 - r.mean_energy(card) / e) : 0.0});
    }
  }
  return r;
}

std::string rounds_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "device,round,policy,cut_layer,server_freq_hz,delay_s,energy_j,cost_u,"
         "snr_up_db,snr_down_db,outage_redraws\n";
  if (r.traces.empty()) return out.str();
  const std::size_t M = r.traces.front().size();
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t N = r.traces.front()[m].size();
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t p = 0; p < r.traces.size(); ++p) {
        const RoundTrace& t = r.traces[p][m][n];
        out << t.device << ',' << t.round << ',' << t.policy.name() << ','
            << t.cut_layer << ',' << format_double(t.server_freq_hz) << ','
            << format_double(t.delay_s) << ',' << format_double(t.energy_j) << ','
            << format_double(t.cost_u) << ',' << format_double(t.channel.snr_up_db)
            << ',' << format_double(t.channel.snr_down_db) << ',' << t.outage_redraws
            << '\n';
      }
    }
  }
  return out.str();
}

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "policy,device,mean_delay_s,mean_energy_j,mean_cost_u\n";
  for (const auto& row : r.summary) {
    out << row.policy << ',' << row.device << ',' << format_double(row.mean_delay_s)
        << ',' << format_double(row.mean_energy_j) << ','
        << format_double(row.mean_cost_u) << '\n';
  }
  return out.str();
}

std::string reductions_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "metric,baseline,value_pct\n";
  for (const auto& row : r.reductions) {
    out << row.metric << ',' << row.baseline << ',' << format_double(row.value_pct)
        << '\n';
  }
  return out.str();
}

std::string decisions_csv(const std::vector<CutEvaluation>& scan) {
  std::ostringstream out;
  out << "cut_layer,cost_u,delay_s,energy_j\n";
  for (const auto& e : scan) {
    out << e.cut_layer << ',' << format_double(e.breakdown.normalized_cost) << ','
        << format_double(e.breakdown.total_delay_s) << ','
        << format_double(e.breakdown.server_energy_j) << '\n';
  }
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_results(const ExperimentResult& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  write_file(base / "rounds.csv", rounds_csv(r));
  write_file(base / "summary.csv", summary_csv(r));
  write_file(base / "reductions.csv", reductions_csv(r));
}

}  // namespace cardsim
