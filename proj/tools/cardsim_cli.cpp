// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

// Command-line front end. Talks to the simulator exclusively through the C
// API in cardsim.h.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cardsim/cardsim.h"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

struct ScenarioDeleter {
  void operator()(cardsim_scenario* s) const { cardsim_scenario_free(s); }
};
struct ResultDeleter {
  void operator()(cardsim_result* r) const { cardsim_result_free(r); }
};
using ScenarioPtr = std::unique_ptr<cardsim_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<cardsim_result, ResultDeleter>;

// Thrown to unwind to main with the right exit code after a C API failure.
struct Failure {
  int exit_code;
};

int exit_code_for(cardsim_status st) {
  switch (st) {
    case CARDSIM_OK:
      return kOk;
    case CARDSIM_E_VALIDATION:
    case CARDSIM_E_INFEASIBLE:
    case CARDSIM_E_INVALID_ARGUMENT:
      return kValidation;
    default:
      return kRuntime;
  }
}

void check(cardsim_status st, const std::string& context) {
  if (st == CARDSIM_OK) return;
  std::cerr << "cardsim: " << context << ": " << cardsim_last_error() << "\n";
  throw Failure{exit_code_for(st)};
}

// Shortest decimal that round-trips.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ScenarioArgs {
  std::string path;
  std::string state = "normal";
  bool lenient = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--scenario", a.path,
                  "Scenario JSON file (default: built-in five-device fleet)");
  cmd->add_option("--state", a.state, "Channel state of the built-in scenario")
      ->check(CLI::IsMember({"good", "normal", "poor"}));
  cmd->add_flag("--lenient", a.lenient, "Warn about unknown JSON fields instead of failing");
}

ScenarioPtr open_scenario(const ScenarioArgs& a) {
  cardsim_scenario* raw = nullptr;
  if (a.path.empty()) {
    check(cardsim_scenario_builtin(a.state.c_str(), &raw), "built-in scenario");
  } else {
    check(cardsim_scenario_load(a.path.c_str(), a.lenient ? 0 : 1, &raw),
          "loading '" + a.path + "'");
  }
  ScenarioPtr s(raw);
  for (size_t i = 0; i < cardsim_scenario_warning_count(s.get()); ++i) {
    std::cerr << "warning: " << cardsim_scenario_warning(s.get(), i) << "\n";
  }
  return s;
}

struct RunArgs {
  ScenarioArgs scenario;
  std::optional<std::uint32_t> rounds;
  std::optional<std::uint64_t> seed;
  std::string policies;
  std::string out = "results";
  unsigned threads = 1;
};

void apply_overrides(cardsim_scenario* s, const RunArgs& a) {
  if (a.rounds) check(cardsim_scenario_set_rounds(s, *a.rounds), "--rounds");
  if (a.seed) check(cardsim_scenario_set_seed(s, *a.seed), "--seed");
  if (!a.policies.empty()) {
    check(cardsim_scenario_set_policies(s, a.policies.c_str()), "--policies");
  }
}

void print_reductions(const cardsim_result* r) {
  double delay = 0.0;
  double energy = 0.0;
  if (cardsim_result_reduction(r, "delay", "device-only", &delay) == CARDSIM_OK) {
    std::cout << "delay reduction vs device-only:  " << fmt(delay) << " %\n";
  }
  if (cardsim_result_reduction(r, "energy", "server-only", &energy) == CARDSIM_OK) {
    std::cout << "energy reduction vs server-only: " << fmt(energy) << " %\n";
  }
}

int cmd_run(const RunArgs& a) {
  ScenarioPtr s = open_scenario(a.scenario);
  apply_overrides(s.get(), a);
  cardsim_result* raw = nullptr;
  check(cardsim_run(s.get(), nullptr, a.threads, &raw), "run");
  ResultPtr r(raw);
  check(cardsim_result_write_csv(r.get(), a.out.c_str()), "writing results");
  std::cout << "wrote " << a.out << "/{rounds,summary,reductions}.csv\n";
  print_reductions(r.get());
  return kOk;
}

struct SweepArgs {
  RunArgs run;
  std::string param;
  std::vector<std::string> values;
};

int cmd_sweep(const SweepArgs& a) {
  ScenarioPtr base = open_scenario(a.run.scenario);
  apply_overrides(base.get(), a.run);
  std::filesystem::create_directories(a.run.out);
  std::ofstream table(std::filesystem::path(a.run.out) / "sweep.csv", std::ios::binary);
  if (!table) {
    std::cerr << "cardsim: cannot write sweep.csv under " << a.run.out << "\n";
    return kRuntime;
  }
  table << "param,value,policy,mean_delay_s,mean_energy_j,mean_cost_u\n";

  for (const auto& text : a.values) {
    cardsim_scenario* raw = nullptr;
    check(cardsim_scenario_clone(base.get(), &raw), "clone");
    ScenarioPtr s(raw);
    try {
      if (a.param == "w") {
        check(cardsim_scenario_set_weight(s.get(), std::stod(text)), "--values");
      } else if (a.param == "alpha") {
        check(cardsim_scenario_set_pathloss_exponent(s.get(), std::stod(text)), "--values");
      } else {
        const long b = std::stol(text);
        if (b <= 0) throw std::invalid_argument(text);
        check(cardsim_scenario_set_batch_size(s.get(), static_cast<std::uint32_t>(b)),
              "--values");
      }
    } catch (const std::logic_error&) {
      std::cerr << "cardsim: --values: '" << text << "' is not a valid " << a.param
                << " value\n";
      return kUsage;
    }

    cardsim_result* rraw = nullptr;
    check(cardsim_run(s.get(), nullptr, a.run.threads, &rraw), "run " + a.param + "=" + text);
    ResultPtr r(rraw);
    const auto dir = (std::filesystem::path(a.run.out) / (a.param + "=" + text)).string();
    check(cardsim_result_write_csv(r.get(), dir.c_str()), "writing results");
    for (size_t i = 0; i < cardsim_result_summary_count(r.get()); ++i) {
      cardsim_summary_row row;
      check(cardsim_result_summary_row(r.get(), i, &row), "summary");
      if (std::string(row.device) != "all") continue;
      table << a.param << ',' << text << ',' << row.policy << ',' << fmt(row.mean_delay_s)
            << ',' << fmt(row.mean_energy_j) << ',' << fmt(row.mean_cost_u) << '\n';
    }
    std::cout << a.param << "=" << text << " -> " << dir << "\n";
  }
  return kOk;
}

int cmd_validate(const ScenarioArgs& a) {
  ScenarioPtr s = open_scenario(a);
  check(cardsim_scenario_validate(s.get()), "validate");
  cardsim_scenario_info info;
  check(cardsim_scenario_info_get(s.get(), &info), "info");
  std::cout << "ok: " << info.num_devices << " devices, " << info.num_layers
            << " layers, " << info.rounds << " rounds, seed " << info.seed << "\n";
  return kOk;
}

struct DecisionArgs {
  RunArgs run;
  std::uint32_t device = 0;
  std::uint32_t round = 0;
  std::string csv;
};

int cmd_show_decision(const DecisionArgs& a) {
  ScenarioPtr s = open_scenario(a.run.scenario);
  apply_overrides(s.get(), a.run);
  cardsim_scenario_info info;
  check(cardsim_scenario_info_get(s.get(), &info), "info");
  std::vector<cardsim_cut_cost> rows(info.num_layers + 1);
  size_t len = 0;
  cardsim_decision d;
  check(cardsim_decide(s.get(), a.device, a.round, &d, rows.data(), rows.size(), &len),
        "decide");
  std::cout << "# device " << a.device << " round " << a.round << "\n"
            << "# snr_up_db " << fmt(d.snr_up_db) << " snr_down_db " << fmt(d.snr_down_db)
            << " outage_redraws " << d.outage_redraws << "\n"
            << "# rate_up_bps " << fmt(d.rate_up_bps) << " rate_down_bps "
            << fmt(d.rate_down_bps) << "\n"
            << "# bounds d_min_s " << fmt(d.d_min_s) << " d_max_s " << fmt(d.d_max_s)
            << " e_min_j " << fmt(d.e_min_j) << " e_max_j " << fmt(d.e_max_j) << "\n"
            << "# decision cut_layer " << d.cut_layer << " server_freq_hz "
            << fmt(d.server_freq_hz) << (d.clamped ? " (clamped)" : "") << " cost_u "
            << fmt(d.cost_u) << "\n";
  std::cout << "cut_layer,cost_u,delay_s,energy_j\n";
  for (size_t i = 0; i < len; ++i) {
    std::cout << rows[i].cut_layer << ',' << fmt(rows[i].cost_u) << ','
              << fmt(rows[i].delay_s) << ',' << fmt(rows[i].energy_j) << '\n';
  }
  if (!a.csv.empty()) {
    check(cardsim_write_decisions_csv(s.get(), a.device, a.round, a.csv.c_str()),
          "writing " + a.csv);
  }
  return kOk;
}

int cmd_export(const ScenarioArgs& a, const std::string& out) {
  ScenarioPtr s = open_scenario(a);
  check(cardsim_scenario_save(s.get(), out.c_str()), "saving '" + out + "'");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split LoRA fine-tuning co-simulator with CARD cut-layer and "
               "server-frequency selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cardsim_version()));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run all policies over every device and round");
  add_scenario_options(run_cmd, run.scenario);
  run_cmd->add_option("--rounds", run.rounds, "Training rounds (overrides scenario)");
  run_cmd->add_option("--seed", run.seed, "Random seed (overrides scenario)");
  run_cmd->add_option("--policies", run.policies,
                      "Comma-separated policies: card, server-only, device-only, "
                      "cut:N, freq:HZ, cut:N@freq:HZ");
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--threads", run.threads, "Worker threads")->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat `run` over values of one parameter");
  add_scenario_options(sweep_cmd, sweep.run.scenario);
  sweep_cmd->add_option("--param", sweep.param, "Parameter to sweep")
      ->required()
      ->check(CLI::IsMember({"w", "alpha", "batch"}));
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--rounds", sweep.run.rounds, "Training rounds");
  sweep_cmd->add_option("--seed", sweep.run.seed, "Random seed");
  sweep_cmd->add_option("--policies", sweep.run.policies, "Comma-separated policies");
  sweep_cmd->add_option("--out", sweep.run.out, "Output directory")->capture_default_str();
  sweep_cmd->add_option("--threads", sweep.run.threads, "Worker threads");

  ScenarioArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Load and validate a scenario");
  add_scenario_options(validate_cmd, validate);

  DecisionArgs decision;
  auto* decision_cmd = app.add_subcommand(
      "show-decision", "Print the per-cut cost scan behind one round's decision");
  add_scenario_options(decision_cmd, decision.run.scenario);
  decision_cmd->add_option("--device", decision.device, "Device index (0-based)");
  decision_cmd->add_option("--round", decision.round, "Round index (0-based)");
  decision_cmd->add_option("--seed", decision.run.seed, "Random seed");
  decision_cmd->add_option("--out", decision.csv, "Also write decisions.csv here");

  ScenarioArgs exported;
  std::string export_path;
  auto* export_cmd =
      app.add_subcommand("export", "Write a scenario (default: built-in) as JSON");
  add_scenario_options(export_cmd, exported);
  export_cmd->add_option("--out", export_path, "Destination file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*validate_cmd) return cmd_validate(validate);
    if (*decision_cmd) return cmd_show_decision(decision);
    if (*export_cmd) return cmd_export(exported, export_path);
  } catch (const Failure& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "cardsim: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
