// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/cardsim.h"

#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "cardsim/card_optimizer.hpp"
#include "cardsim/errors.hpp"
#include "cardsim/harness.hpp"
#include "cardsim/scenario.hpp"

struct cardsim_scenario {
  cardsim::Scenario scenario;
  std::vector<std::string> warnings;
};

struct cardsim_result {
  cardsim::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

cardsim_status fail(cardsim_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

// Maps the core exception hierarchy onto status codes.
template <typename F>
cardsim_status guarded(F&& body) {
  try {
    body();
    return CARDSIM_OK;
  } catch (const cardsim::InfeasibleError& e) {
    return fail(CARDSIM_E_INFEASIBLE, e.what());
  } catch (const cardsim::ValidationError& e) {
    return fail(CARDSIM_E_VALIDATION, e.what());
  } catch (const cardsim::RangeError& e) {
    return fail(CARDSIM_E_INVALID_ARGUMENT, e.what());
  } catch (const cardsim::LinkOutage& e) {
    return fail(CARDSIM_E_OUTAGE, e.what());
  } catch (const cardsim::IoError& e) {
    return fail(CARDSIM_E_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CARDSIM_E_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(CARDSIM_E_RUNTIME, e.what());
  } catch (...) {
    return fail(CARDSIM_E_RUNTIME, "unknown error");
  }
}

cardsim_status null_arg(const char* what) {
  return fail(CARDSIM_E_INVALID_ARGUMENT, std::string(what) + " is NULL");
}

cardsim::RoundCostInputs round_inputs(const cardsim::Scenario& s, uint32_t device,
                                      uint32_t round, cardsim::RoundChannel* ch) {
  if (device >= s.devices.size()) {
    throw cardsim::RangeError("device index " + std::to_string(device) + " out of range");
  }
  *ch = cardsim::draw_feasible_round_channel(s.devices[device].channel, s.mapping_table,
                                             s.seed, device, round);
  return s.inputs_for(device, ch->realization);
}

}  // namespace

extern "C" {

const char* cardsim_version(void) { return "1.0.0"; }

const char* cardsim_last_error(void) { return g_last_error.c_str(); }

cardsim_status cardsim_scenario_builtin(const char* state, cardsim_scenario** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto st = state ? cardsim::parse_channel_state(state)
                          : cardsim::ChannelState::kNormal;
    *out = new cardsim_scenario{cardsim::builtin_reference_scenario(st), {}};
  });
}

cardsim_status cardsim_scenario_load(const char* path, int strict, cardsim_scenario** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<cardsim_scenario>();
    cardsim::LoadOptions opts;
    opts.strict = strict != 0;
    h->scenario = cardsim::load_scenario(path, opts, &h->warnings);
    *out = h.release();
  });
}

cardsim_status cardsim_scenario_clone(const cardsim_scenario* s, cardsim_scenario** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new cardsim_scenario(*s); });
}

void cardsim_scenario_free(cardsim_scenario* s) { delete s; }

cardsim_status cardsim_scenario_save(const cardsim_scenario* s, const char* path) {
  if (!s) return null_arg("scenario");
  if (!path) return null_arg("path");
  return guarded([&] { cardsim::save_scenario(s->scenario, path); });
}

cardsim_status cardsim_scenario_validate(const cardsim_scenario* s) {
  if (!s) return null_arg("scenario");
  return guarded([&] { s->scenario.validate(); });
}

cardsim_status cardsim_scenario_info_get(const cardsim_scenario* s,
                                         cardsim_scenario_info* out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  const auto& sc = s->scenario;
  out->num_devices = static_cast<uint32_t>(sc.devices.size());
  out->num_layers = sc.profile.num_layers();
  out->rounds = sc.rounds;
  out->local_epochs = sc.local_epochs;
  out->seed = sc.seed;
  out->weight = sc.weight;
  out->compression_ratio = sc.compression_ratio;
  return CARDSIM_OK;
}

size_t cardsim_scenario_warning_count(const cardsim_scenario* s) {
  return s ? s->warnings.size() : 0;
}

const char* cardsim_scenario_warning(const cardsim_scenario* s, size_t i) {
  if (!s || i >= s->warnings.size()) return nullptr;
  return s->warnings[i].c_str();
}

cardsim_status cardsim_scenario_set_rounds(cardsim_scenario* s, uint32_t rounds) {
  if (!s) return null_arg("scenario");
  if (rounds < 1) return fail(CARDSIM_E_VALIDATION, "rounds: must be >= 1");
  s->scenario.rounds = rounds;
  return CARDSIM_OK;
}

cardsim_status cardsim_scenario_set_seed(cardsim_scenario* s, uint64_t seed) {
  if (!s) return null_arg("scenario");
  s->scenario.seed = seed;
  return CARDSIM_OK;
}

cardsim_status cardsim_scenario_set_weight(cardsim_scenario* s, double w) {
  if (!s) return null_arg("scenario");
  if (!(w >= 0.0 && w <= 1.0)) return fail(CARDSIM_E_VALIDATION, "weight: must be in [0, 1]");
  s->scenario.weight = w;
  return CARDSIM_OK;
}

cardsim_status cardsim_scenario_set_pathloss_exponent(cardsim_scenario* s, double alpha) {
  if (!s) return null_arg("scenario");
  return guarded([&] { cardsim::set_pathloss_exponent(s->scenario, alpha); });
}

cardsim_status cardsim_scenario_set_batch_size(cardsim_scenario* s, uint32_t batch) {
  if (!s) return null_arg("scenario");
  return guarded([&] { cardsim::set_batch_size(s->scenario, batch); });
}

cardsim_status cardsim_scenario_set_policies(cardsim_scenario* s, const char* policies) {
  if (!s) return null_arg("scenario");
  if (!policies) return null_arg("policies");
  return guarded([&] {
    auto parsed = cardsim::parse_policy_list(policies);
    auto copy = s->scenario;
    copy.policies = std::move(parsed);
    copy.validate();
    s->scenario = std::move(copy);
  });
}

cardsim_status cardsim_decide(const cardsim_scenario* s, uint32_t device, uint32_t round,
                              cardsim_decision* out, cardsim_cut_cost* rows,
                              size_t rows_capacity, size_t* rows_len) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  return guarded([&] {
    s->scenario.validate();
    cardsim::RoundChannel ch;
    const auto in = round_inputs(s->scenario, device, round, &ch);
    std::vector<cardsim::CutEvaluation> scan;
    const auto d = cardsim::card_decide(in, &scan);
    out->cut_layer = d.cut_layer;
    out->server_freq_hz = d.server_freq_hz;
    out->cost_u = d.cost;
    out->delay_s = d.breakdown.total_delay_s;
    out->energy_j = d.breakdown.server_energy_j;
    out->d_min_s = d.bounds.d_min_s;
    out->d_max_s = d.bounds.d_max_s;
    out->e_min_j = d.bounds.e_min_j;
    out->e_max_j = d.bounds.e_max_j;
    out->snr_up_db = ch.realization.snr_up_db;
    out->snr_down_db = ch.realization.snr_down_db;
    out->rate_up_bps = ch.realization.rate_up_bps;
    out->rate_down_bps = ch.realization.rate_down_bps;
    out->outage_redraws = ch.outage_redraws;
    out->clamped = d.clamped ? 1 : 0;
    if (rows_len) *rows_len = scan.size();
    if (rows) {
      for (size_t i = 0; i < scan.size() && i < rows_capacity; ++i) {
        rows[i] = {scan[i].cut_layer, scan[i].breakdown.normalized_cost,
                   scan[i].breakdown.total_delay_s, scan[i].breakdown.server_energy_j};
      }
    }
  });
}

cardsim_status cardsim_write_decisions_csv(const cardsim_scenario* s, uint32_t device,
                                           uint32_t round, const char* path) {
  if (!s) return null_arg("scenario");
  if (!path) return null_arg("path");
  return guarded([&] {
    s->scenario.validate();
    cardsim::RoundChannel ch;
    const auto in = round_inputs(s->scenario, device, round, &ch);
    std::vector<cardsim::CutEvaluation> scan;
    cardsim::card_decide(in, &scan);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw cardsim::IoError(std::string("cannot write '") + path + "'");
    f << cardsim::decisions_csv(scan);
    if (!f) throw cardsim::IoError(std::string("write failed for '") + path + "'");
  });
}

cardsim_status cardsim_run(const cardsim_scenario* s, const char* policies,
                           unsigned threads, cardsim_result** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto list =
        policies ? cardsim::parse_policy_list(policies) : s->scenario.policies;
    auto h = std::make_unique<cardsim_result>();
    h->result = cardsim::run_experiment(s->scenario, list, threads);
    *out = h.release();
  });
}

void cardsim_result_free(cardsim_result* r) { delete r; }

cardsim_status cardsim_result_write_csv(const cardsim_result* r, const char* dir) {
  if (!r) return null_arg("result");
  if (!dir) return null_arg("dir");
  return guarded([&] { cardsim::write_results(r->result, dir); });
}

cardsim_status cardsim_result_reduction(const cardsim_result* r, const char* metric,
                                        const char* baseline, double* pct) {
  if (!r) return null_arg("result");
  if (!metric || !baseline || !pct) return null_arg("metric/baseline/pct");
  return guarded([&] { *pct = r->result.reduction_pct(metric, baseline); });
}

size_t cardsim_result_summary_count(const cardsim_result* r) {
  return r ? r->result.summary.size() : 0;
}

cardsim_status cardsim_result_summary_row(const cardsim_result* r, size_t i,
                                          cardsim_summary_row* out) {
  if (!r) return null_arg("result");
  if (!out) return null_arg("out");
  if (i >= r->result.summary.size()) {
    return fail(CARDSIM_E_INVALID_ARGUMENT, "summary row index out of range");
  }
  const auto& row = r->result.summary[i];
  *out = {row.policy.c_str(), row.device.c_str(), row.mean_delay_s, row.mean_energy_j,
          row.mean_cost_u};
  return CARDSIM_OK;
}

}  // extern "C"
