// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <random>

#include "cardsim/cost_model.hpp"
#include "cardsim/errors.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace cardsim;
using cardsim::testing::Case;

namespace {

const DeviceSpec kDevice1{"d1", 1.3e9, 2.0, 2048.0};
const DeviceSpec kDevice5{"d5", 0.5e9, 2.0, 512.0};
const ServerSpec kServer{"srv", 2.46e9, 2.0, 3072.0, 1e-25};

// Two layers: 5.3248e12 on the device side and 6.144e12 on the server side
// at cut 1. Smashed / gradient 1e8 bits, adapters 1e7 bits.
Case worked_example() {
  Case k;
  k.profile = LlmProfile::custom(0, {5'324'800'000'000ULL, 6'144'000'000'000ULL}, 0,
                                 {100'000'000, 100'000'000, 100'000'000},
                                 {100'000'000, 100'000'000, 100'000'000},
                                 {10'000'000, 10'000'000}, 8);
  k.device = kDevice1;
  k.server = kServer;
  k.channel.rate_up_bps = 1e8;
  k.channel.rate_down_bps = 1e8;
  k.local_epochs = 5;
  k.compression_ratio = 0.1;
  k.weight = 0.2;
  return k;
}

Case default_case(const DeviceSpec& device = kDevice1) {
  Case k;
  k.profile = default_llama_profile();
  k.device = device;
  k.server = kServer;
  k.channel.rate_up_bps = 55'547'000.0;
  k.channel.rate_down_bps = 55'547'000.0;
  k.local_epochs = 5;
  k.compression_ratio = 0.1;
  k.weight = 0.2;
  return k;
}

}  // namespace

TEST_CASE("device compute delay") {
  const auto k = worked_example();
  const auto in = k.inputs();
  CHECK(device_compute_delay(in, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(device_compute_delay(in, 0) == 0.0);

  auto fast = worked_example();
  fast.device.gpu_freq_hz *= 2.0;
  CHECK(device_compute_delay(fast.inputs(), 1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("server compute delay") {
  const auto k = worked_example();
  const auto in = k.inputs();
  CHECK(server_compute_delay(in, 1, 2.46e9) ==
        doctest::Approx(0.4065040650406504).epsilon(1e-14));
  CHECK(server_compute_delay(in, 2, 2.46e9) == 0.0);
  for (double f = 0.9e9; f < 2.46e9; f += 0.1e9) {
    CHECK(server_compute_delay(in, 1, 2.46e9) <= server_compute_delay(in, 1, f));
  }
}

TEST_CASE("transmission delay") {
  auto k = worked_example();
  CHECK(transmission_delay(k.inputs(), 1) == doctest::Approx(1.2).epsilon(1e-14));
  // Cut 0 ships no adapters.
  CHECK(transmission_delay(k.inputs(), 0) == doctest::Approx(1.0).epsilon(1e-14));

  // Compression scales only the per-epoch terms.
  k.compression_ratio = 1.0;
  CHECK(transmission_delay(k.inputs(), 1) == doctest::Approx(10.0 + 0.2).epsilon(1e-14));
}

TEST_CASE("zero rate with a payload is an outage") {
  auto k = worked_example();
  k.channel.rate_up_bps = 0.0;
  CHECK_THROWS_AS(transmission_delay(k.inputs(), 1), LinkOutage);

  auto empty = worked_example();
  empty.profile = LlmProfile::custom(0, {1, 1}, 0, {0, 0, 0}, {0, 0, 0}, {0, 0}, 1);
  empty.channel.rate_up_bps = 0.0;
  empty.channel.rate_down_bps = 0.0;
  CHECK(transmission_delay(empty.inputs(), 2) == 0.0);
}

TEST_CASE("total delay composes the parts") {
  const auto k = worked_example();
  CHECK(total_delay(k.inputs(), 1, 2.46e9) ==
        doctest::Approx(8.2325203252032519).epsilon(1e-14));
  CHECK(total_delay(k.inputs(), 1, 2.46e9) ==
        doctest::Approx(testing::ref_delay(k, 1, 2.46e9)).epsilon(1e-14));
}

TEST_CASE("server energy") {
  const auto k = worked_example();
  const auto in = k.inputs();
  // 5 * 1e-25 * 2.46e9^2 * 6.144e12 / 6144
  CHECK(server_energy(in, 1, 2.46e9) == doctest::Approx(3025.8).epsilon(1e-12));
  CHECK(server_energy(in, 2, 2.46e9) == 0.0);
  CHECK(server_energy(in, 1, 2.0e9) / server_energy(in, 1, 1.0e9) ==
        doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("F_min per device") {
  CHECK(f_min_for_device(kDevice1, kServer) ==
        doctest::Approx(1.3e9 * 2 * 2048 / 6144.0).epsilon(1e-14));
  CHECK(f_min_for_device(kDevice1, kServer) == doctest::Approx(0.8667e9).epsilon(1e-4));
  CHECK(f_min_for_device(kDevice5, kServer) == doctest::Approx(0.0833e9).epsilon(1e-3));

  const ServerSpec twin{"twin", 2.0e9, 2.0, 2048.0, 1e-25};
  const DeviceSpec same{"same", 1.5e9, 2.0, 2048.0};
  CHECK(f_min_for_device(same, twin) == 1.5e9);

  const DeviceSpec monster{"monster", 3e9, 4.0, 8192.0};
  CHECK_THROWS_AS(f_min_for_device(monster, kServer), InfeasibleError);
}

TEST_CASE("normalization bounds of the default profile") {
  const auto k = default_case();
  const auto b = norm_bounds(k.inputs());
  CHECK(b.d_min_s < b.d_max_s);
  CHECK(b.e_min_j < b.e_max_j);
  CHECK(b.e_min_j > 0.0);
  const auto r = testing::ref_bounds(k);
  CHECK(b.d_min_s == doctest::Approx(r.d_min).epsilon(1e-13));
  CHECK(b.d_max_s == doctest::Approx(r.d_max).epsilon(1e-13));
  CHECK(b.e_min_j == doctest::Approx(r.e_min).epsilon(1e-13));
  CHECK(b.e_max_j == doctest::Approx(r.e_max).epsilon(1e-13));

  auto headless = k;
  headless.profile = LlmProfile::uniform(32, 0, 1'000'000, 0, 100, 100, 10, 8);
  CHECK(norm_bounds(headless.inputs()).e_min_j == 0.0);
}

TEST_CASE("bounds bracket random feasible points") {
  std::mt19937_64 rng(11);
  for (const auto& dev : {kDevice1, kDevice5}) {
    const auto k = default_case(dev);
    const auto in = k.inputs();
    const auto b = norm_bounds(in);
    const double tol = 1e-12;
    for (int i = 0; i < 1000; ++i) {
      const auto c = static_cast<std::uint32_t>(testing::int_in(rng, 0, 32));
      const double f = testing::uniform(rng, k.f_min(), k.f_max());
      const double D = total_delay(in, c, f);
      const double E = server_energy(in, c, f);
      CHECK(D >= b.d_min_s * (1 - tol));
      CHECK(D <= b.d_max_s * (1 + tol));
      CHECK(E >= b.e_min_j * (1 - tol));
      CHECK(E <= b.e_max_j * (1 + tol));
      const double u = cost(in, b, c, f);
      CHECK(u >= -tol);
      CHECK(u <= 1.0 + tol);
    }
  }
}

TEST_CASE("cost at the corners") {
  auto k = default_case();
  k.weight = 1.0;
  auto b = norm_bounds(k.inputs());
  CHECK(cost(k.inputs(), b, 0, k.f_max()) == 0.0);
  k.weight = 0.0;
  b = norm_bounds(k.inputs());
  CHECK(cost(k.inputs(), b, 32, k.f_min()) == 0.0);
  CHECK(cost(k.inputs(), b, 0, k.f_max()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cost matches the reference model at mid-range points") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto k = testing::random_case(rng);
    const auto in = k.inputs();
    const auto b = norm_bounds(in);
    const auto rb = testing::ref_bounds(k);
    const auto c = static_cast<std::uint32_t>(k.profile.num_layers() / 2);
    const double f = 0.5 * (k.f_min() + k.f_max());
    CHECK(cost(in, b, c, f) == doctest::Approx(testing::ref_cost(k, rb, c, f)).epsilon(1e-9));
    const auto br = breakdown(in, b, c, f);
    CHECK(br.total_delay_s ==
          doctest::Approx(k.local_epochs * (br.device_compute_s + br.server_compute_s) +
                          br.transmission_s)
              .epsilon(1e-14));
  }
}

TEST_CASE("degenerate bounds zero out the matching term") {
  // Device as fast as the server at F_max, no transfers: the delay is the
  // same at every cut.
  Case k;
  k.profile = LlmProfile::uniform(4, 0, 1'000'000, 0, 0, 0, 0, 1);
  k.device = DeviceSpec{"twin", 1e9, 1.0, 1.0};
  k.server = ServerSpec{"twin", 1e9, 1.0, 1.0, 1e-25};
  k.channel.rate_up_bps = 1e6;
  k.channel.rate_down_bps = 1e6;
  k.weight = 0.7;
  const auto b = norm_bounds(k.inputs());
  CHECK(b.delay_degenerate());
  CHECK(b.energy_degenerate() == false);
  const double u = cost(k.inputs(), b, 2, 1e9);
  CHECK(u == doctest::Approx(0.3 * 0.5).epsilon(1e-14));
}

TEST_CASE("delay and energy are monotone in f and c") {
  const auto k = default_case(kDevice5);
  const auto in = k.inputs();
  for (std::uint32_t c = 0; c <= 32; ++c) {
    double prev_d = INFINITY;
    double prev_e = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double f = k.f_min() + i * (k.f_max() - k.f_min()) / 20.0;
      CHECK(total_delay(in, c, f) < prev_d);
      CHECK(server_energy(in, c, f) > prev_e);
      prev_d = total_delay(in, c, f);
      prev_e = server_energy(in, c, f);
      if (c > 0) {
        CHECK(total_delay(in, c, f) >= total_delay(in, c - 1, f));
        CHECK(server_energy(in, c, f) < server_energy(in, c - 1, f));
      }
    }
  }
}

namespace {

// dU/df = -w B / (dD f^2) + 2 (1 - w) C f / dE with D = a + B / f, E = C f^2.
struct Analytic {
  double delay_term;
  double energy_term;
};

Analytic analytic_derivative(const Case& k, const NormBounds& b, std::uint32_t c, double f) {
  const double ks = k.server.flops_per_cycle * k.server.core_count;
  const double srv = testing::ref_server_flops(k.profile, c);
  const double B = k.local_epochs * srv / ks;
  const double C = k.local_epochs * k.server.power_coeff * srv / ks;
  return {-k.weight * B / ((b.d_max_s - b.d_min_s) * f * f),
          2.0 * (1.0 - k.weight) * C * f / (b.e_max_j - b.e_min_j)};
}

}  // namespace

TEST_CASE("finite-difference derivative of U matches the analytic form") {
  const auto base = default_case();
  std::mt19937_64 rng(5);
  for (const auto& dev : {kDevice1, DeviceSpec{"d3", 0.7e9, 2.0, 1792.0}, kDevice5}) {
    for (double rate : {5e6, 2.4e7, 55'547'000.0}) {
      auto k = base;
      k.device = dev;
      k.channel.rate_up_bps = rate;
      k.channel.rate_down_bps = 1.2 * rate;
      for (double w : {0.05, 0.2, 0.5, 0.9}) {
        k.weight = w;
        const auto in = k.inputs();
        const auto b = norm_bounds(in);
        for (int i = 0; i < 20; ++i) {
          const auto c = static_cast<std::uint32_t>(testing::int_in(rng, 0, 32));
          const double f = testing::uniform(rng, k.f_min(), k.f_max());
          const auto a = analytic_derivative(k, b, c, f);
          const double analytic = a.delay_term + a.energy_term;
          const double h = 1e-6 * f;
          const double numeric = (cost(in, b, c, f + h) - cost(in, b, c, f - h)) / (2.0 * h);
          // Relative to the larger of the two opposing terms.
          const double scale = std::max(std::abs(a.delay_term), std::abs(a.energy_term));
          CHECK(std::abs(numeric - analytic) / scale <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("finite-difference derivatives of the f-dependent parts on random cases") {
  // Only the f-dependent components are differenced here.
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    const auto k = testing::random_case(rng);
    const auto in = k.inputs();
    const auto b = norm_bounds(in);
    const auto c = static_cast<std::uint32_t>(testing::int_in(rng, 0, k.profile.num_layers()));
    const double f = testing::uniform(rng, k.f_min(), k.f_max());
    const double h = 1e-6 * f;
    const auto a = analytic_derivative(k, b, c, f);
    const double dd = k.weight * k.local_epochs *
                      (server_compute_delay(in, c, f + h) - server_compute_delay(in, c, f - h)) /
                      (2.0 * h * (b.d_max_s - b.d_min_s));
    const double de = (1.0 - k.weight) *
                      (server_energy(in, c, f + h) - server_energy(in, c, f - h)) /
                      (2.0 * h * (b.e_max_j - b.e_min_j));
    if (a.delay_term == 0.0) {
      CHECK(dd == 0.0);
      CHECK(de == 0.0);
      continue;
    }
    CHECK(std::abs(dd - a.delay_term) / std::abs(a.delay_term) <= 1e-6);
    CHECK(std::abs(de - a.energy_term) / std::abs(a.energy_term) <= 1e-6);
  }
}

TEST_CASE("input validation") {
  auto k = worked_example();
  k.weight = 1.5;
  CHECK_THROWS_AS(k.inputs().validate(), ValidationError);
  k = worked_example();
  k.compression_ratio = 0.0;
  CHECK_THROWS_AS(k.inputs().validate(), ValidationError);
  k = worked_example();
  k.local_epochs = 0;
  CHECK_THROWS_AS(k.inputs().validate(), ValidationError);
  k = worked_example();
  k.device.core_count = -1.0;
  CHECK_THROWS_AS(k.inputs().validate(), ValidationError);
  CHECK_NOTHROW(worked_example().inputs().validate());
}
