// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/cost_model.hpp"

#include <cmath>
#include <sstream>

#include "cardsim/errors.hpp"

namespace cardsim {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

// payload / rate with outage detection.
double link_time(double bits, double rate_bps, const char* direction) {
  if (bits == 0.0) return 0.0;
  if (!(rate_bps > 0.0)) {
    throw LinkOutage(std::string(direction) +
                     " rate is 0 with a nonzero payload");
  }
  return bits / rate_bps;
}

double normalized(double value, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return (value - lo) / (hi - lo);
}

}  // namespace

void DeviceSpec::validate() const {
  if (!positive_finite(gpu_freq_hz) || !positive_finite(flops_per_cycle) ||
      !positive_finite(core_count)) {
    throw ValidationError("device '" + label +
                          "': gpu_freq_hz, flops_per_cycle and core_count "
                          "must be > 0");
  }
}

void ServerSpec::validate() const {
  if (!positive_finite(max_freq_hz) || !positive_finite(flops_per_cycle) ||
      !positive_finite(core_count) || !positive_finite(power_coeff)) {
    throw ValidationError(
        "server: max_freq_hz, flops_per_cycle, core_count and power_coeff "
        "must be > 0");
  }
}

void RoundCostInputs::validate() const {
  device.validate();
  server.validate();
  if (local_epochs < 1) throw ValidationError("local_epochs must be >= 1");
  if (!(compression_ratio > 0.0 && compression_ratio <= 1.0)) {
    throw ValidationError("compression_ratio must be in (0, 1]");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw ValidationError("weight must be in [0, 1]");
  }
  if (channel.rate_up_bps < 0.0 || channel.rate_down_bps < 0.0) {
    throw ValidationError("channel rates must be >= 0");
  }
}

double f_min_for_device(const DeviceSpec& device, const ServerSpec& server) {
  if (!(server.flops_per_hz() > 0.0)) {
    throw ValidationError("server: flops_per_cycle * core_count must be > 0");
  }
  const double f_min = device.flops_rate() / server.flops_per_hz();
  if (f_min > server.max_freq_hz) {
    std::ostringstream msg;
    msg << "device '" << device.label << "' needs a server frequency of at least "
        << f_min << " Hz, above the server maximum " << server.max_freq_hz
        << " Hz";
    throw InfeasibleError(msg.str());
  }
  return f_min;
}

double device_compute_delay(const RoundCostInputs& in, std::uint32_t cut) {
  return static_cast<double>(in.profile.device_flops(cut)) / in.device.flops_rate();
}

double server_compute_delay(const RoundCostInputs& in, std::uint32_t cut,
                            double f_server) {
  return static_cast<double>(in.profile.server_flops(cut)) /
         (f_server * in.server.flops_per_hz());
}

double transmission_delay(const RoundCostInputs& in, std::uint32_t cut) {
  const double T = in.local_epochs;
  const double smashed = in.compression_ratio *
                         static_cast<double>(in.profile.smashed_bits(cut));
  const double grad =
      in.compression_ratio * static_cast<double>(in.profile.grad_bits(cut));
  const double adapters = static_cast<double>(in.profile.adapter_bits(cut));
  const double up = link_time(smashed, in.channel.rate_up_bps, "uplink");
  const double down = link_time(grad, in.channel.rate_down_bps, "downlink");
  return T * (up + down) + link_time(adapters, in.channel.rate_up_bps, "uplink") +
         link_time(adapters, in.channel.rate_down_bps, "downlink");
}

double total_delay(const RoundCostInputs& in, std::uint32_t cut, double f_server) {
  const double T = in.local_epochs;
  return T * (device_compute_delay(in, cut) +
              server_compute_delay(in, cut, f_server)) +
         transmission_delay(in, cut);
}

double server_energy(const RoundCostInputs& in, std::uint32_t cut,
                     double f_server) {
  const double T = in.local_epochs;
  return T * in.server.power_coeff * f_server * f_server *
         static_cast<double>(in.profile.server_flops(cut)) /
         in.server.flops_per_hz();
}

NormBounds norm_bounds(const RoundCostInputs& in) {
  const double f_min = f_min_for_device(in.device, in.server);
  const double f_max = in.server.max_freq_hz;
  const std::uint32_t I = in.profile.num_layers();
  NormBounds b;
  b.d_max_s = total_delay(in, I, f_min);
  b.e_min_j = server_energy(in, I, f_min);
  b.d_min_s = total_delay(in, 0, f_max);
  b.e_max_j = server_energy(in, 0, f_max);
  return b;
}

double cost(const RoundCostInputs& in, const NormBounds& bounds,
            std::uint32_t cut, double f_server) {
  const double D = total_delay(in, cut, f_server);
  const double E = server_energy(in, cut, f_server);
  return in.weight * normalized(D, bounds.d_min_s, bounds.d_max_s) +
         (1.0 - in.weight) * normalized(E, bounds.e_min_j, bounds.e_max_j);
}

CostBreakdown breakdown(const RoundCostInputs& in, const NormBounds& bounds,
                        std::uint32_t cut, double f_server) {
  CostBreakdown out;
  out.device_compute_s = device_compute_delay(in, cut);
  out.server_compute_s = server_compute_delay(in, cut, f_server);
  out.transmission_s = transmission_delay(in, cut);
  out.total_delay_s = total_delay(in, cut, f_server);
  out.server_energy_j = server_energy(in, cut, f_server);
  out.normalized_cost = cost(in, bounds, cut, f_server);
  return out;
}

}  // namespace cardsim
