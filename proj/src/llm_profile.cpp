// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/llm_profile.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "cardsim/errors.hpp"

namespace cardsim {

std::uint64_t TransformerShape::params_per_layer() const {
  const std::uint64_t head_dim = hidden_dim / num_heads;
  const std::uint64_t kv_dim = head_dim * num_kv_heads;
  const std::uint64_t attention = 2 * hidden_dim * hidden_dim  // q, o
                                  + 2 * hidden_dim * kv_dim;   // k, v
  const std::uint64_t mlp = 3 * hidden_dim * ffn_dim;          // gate, up, down
  const std::uint64_t norms = 2 * hidden_dim;
  return attention + mlp + norms;
}

LlmProfile LlmProfile::uniform(std::uint32_t num_layers, Flops flops_embedding,
                               Flops flops_per_layer, Flops flops_head,
                               Bits smashed_bits_per_layer,
                               Bits grad_bits_per_layer,
                               Bits adapter_bits_per_layer,
                               std::uint32_t lora_rank) {
  return custom(flops_embedding, std::vector<Flops>(num_layers, flops_per_layer),
                flops_head,
                std::vector<Bits>(num_layers + 1, smashed_bits_per_layer),
                std::vector<Bits>(num_layers + 1, grad_bits_per_layer),
                std::vector<Bits>(num_layers, adapter_bits_per_layer), lora_rank);
}

LlmProfile LlmProfile::custom(Flops flops_embedding,
                              std::vector<Flops> layer_flops, Flops flops_head,
                              std::vector<Bits> smashed_bits_at_cut,
                              std::vector<Bits> grad_bits_at_cut,
                              std::vector<Bits> layer_adapter_bits,
                              std::uint32_t lora_rank) {
  const std::size_t layers = layer_flops.size();
  if (layers == 0) {
    throw ValidationError("profile: num_layers must be >= 1");
  }
  if (std::any_of(layer_flops.begin(), layer_flops.end(),
                  [](Flops f) { return f == 0; })) {
    throw ValidationError("profile: per-layer FLOPs must be > 0");
  }
  if (smashed_bits_at_cut.size() != layers + 1 ||
      grad_bits_at_cut.size() != layers + 1) {
    throw ValidationError(
        "profile: smashed/grad sizes need one entry per cut (num_layers + 1)");
  }
  if (layer_adapter_bits.size() != layers) {
    throw ValidationError(
        "profile: adapter sizes need one entry per layer (num_layers)");
  }

  LlmProfile p;
  p.flops_embedding_ = flops_embedding;
  p.flops_head_ = flops_head;
  p.lora_rank_ = lora_rank;
  p.layer_flops_ = std::move(layer_flops);
  p.smashed_ = std::move(smashed_bits_at_cut);
  p.grad_ = std::move(grad_bits_at_cut);
  p.adapter_ = std::move(layer_adapter_bits);
  p.finalize();
  return p;
}

void LlmProfile::finalize() {
  const std::size_t layers = layer_flops_.size();
  flops_prefix_.assign(layers + 1, 0);
  adapter_prefix_.assign(layers + 1, 0);
  for (std::size_t i = 0; i < layers; ++i) {
    flops_prefix_[i + 1] = flops_prefix_[i] + layer_flops_[i];
    adapter_prefix_[i + 1] = adapter_prefix_[i] + adapter_[i];
  }
  total_ = flops_embedding_ + flops_prefix_[layers] + flops_head_;
}

bool LlmProfile::is_uniform() const {
  auto all_same = [](const auto& v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) ==
           v.end();
  };
  return all_same(layer_flops_) && all_same(smashed_) && all_same(grad_) &&
         all_same(adapter_);
}

void LlmProfile::check_cut(std::uint32_t cut) const {
  if (cut > num_layers()) {
    throw RangeError("cut layer " + std::to_string(cut) +
                     " outside [0, " + std::to_string(num_layers()) + "]");
  }
}

Flops LlmProfile::device_flops(std::uint32_t cut) const {
  check_cut(cut);
  return flops_embedding_ + flops_prefix_[cut];
}

Flops LlmProfile::server_flops(std::uint32_t cut) const {
  check_cut(cut);
  return (flops_prefix_[num_layers()] - flops_prefix_[cut]) + flops_head_;
}

Bits LlmProfile::smashed_bits(std::uint32_t cut) const {
  check_cut(cut);
  return smashed_[cut];
}

Bits LlmProfile::grad_bits(std::uint32_t cut) const {
  check_cut(cut);
  return grad_[cut];
}

Bits LlmProfile::adapter_bits(std::uint32_t cut) const {
  check_cut(cut);
  return adapter_prefix_[cut];
}

bool LlmProfile::operator==(const LlmProfile& other) const {
  return flops_embedding_ == other.flops_embedding_ &&
         flops_head_ == other.flops_head_ && lora_rank_ == other.lora_rank_ &&
         layer_flops_ == other.layer_flops_ && smashed_ == other.smashed_ &&
         grad_ == other.grad_ && adapter_ == other.adapter_;
}

LlmProfile make_profile(const TransformerShape& s) {
  if (s.num_layers == 0 || s.hidden_dim == 0 || s.num_heads == 0 ||
      s.batch_size == 0 || s.seq_len == 0) {
    throw ValidationError(
        "model: num_layers, hidden_dim, num_heads, batch_size and seq_len must "
        "be > 0");
  }
  if (s.hidden_dim % s.num_heads != 0 || s.num_kv_heads == 0 ||
      s.num_kv_heads > s.num_heads) {
    throw ValidationError(
        "model: hidden_dim must divide into num_heads and 0 < num_kv_heads <= "
        "num_heads");
  }
  const std::uint64_t tokens = s.tokens_per_batch();
  // Forward pass costs 2 FLOPs per parameter per token; the backward pass
  // through the frozen trunk is taken as twice the forward pass.
  const Flops per_layer = 3 * 2 * s.params_per_layer() * tokens;
  const Flops head = 3 * 2 * s.hidden_dim * s.vocab_size * tokens;
  const Flops embedding = tokens * s.hidden_dim;
  const Bits activation = tokens * s.hidden_dim * s.activation_bits;
  const Bits adapter = std::uint64_t{s.lora_targets_per_layer} * s.lora_rank *
                       (s.hidden_dim + s.hidden_dim) * s.adapter_param_bits;
  return LlmProfile::uniform(s.num_layers, embedding, per_layer, head,
                             activation, activation, adapter, s.lora_rank);
}

TransformerShape default_llama_shape() { return TransformerShape{}; }

LlmProfile default_llama_profile() { return make_profile(default_llama_shape()); }

}  // namespace cardsim
