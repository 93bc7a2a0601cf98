// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <vector>

namespace cardsim {

using Flops = std::uint64_t;
using Bits = std::uint64_t;

/// Architecture and mini-batch shape of a decoder-only transformer. Used to
/// derive an LlmProfile from first principles.
struct TransformerShape {
  std::uint32_t num_layers = 32;
  std::uint64_t hidden_dim = 2048;
  std::uint64_t ffn_dim = 8192;
  std::uint32_t num_heads = 32;
  std::uint32_t num_kv_heads = 8;
  std::uint64_t vocab_size = 128256;
  std::uint32_t batch_size = 4;
  std::uint32_t seq_len = 512;
  std::uint32_t lora_rank = 8;
  // Number of weight matrices per layer that carry a LoRA pair (query and
  // value projections by default).
  std::uint32_t lora_targets_per_layer = 2;
  std::uint32_t activation_bits = 16;
  std::uint32_t adapter_param_bits = 32;

  bool operator==(const TransformerShape&) const = default;

  std::uint64_t tokens_per_batch() const {
    return std::uint64_t{batch_size} * seq_len;
  }
  /// Frozen parameters of one decoder layer (attention with grouped KV heads,
  /// gated MLP, two norms).
  std::uint64_t params_per_layer() const;
};

/// Compute and data-volume geometry of the split model as a function of the
/// cut layer c in [0, num_layers]. Layer i (1-based) runs on the device iff
/// i <= c. The embedding always runs on the device and the output head
/// always runs on the server.
///
/// FLOPs and adapter sizes are stored per layer and transferred tensor sizes
/// per cut. All counts
/// are per local epoch.
class LlmProfile {
 public:
  LlmProfile() = default;

  /// Uniform profile: every layer costs the same and every cut ships the same
  /// activation and gradient tensor.
  static LlmProfile uniform(std::uint32_t num_layers, Flops flops_embedding,
                            Flops flops_per_layer, Flops flops_head,
                            Bits smashed_bits_per_layer,
                            Bits grad_bits_per_layer,
                            Bits adapter_bits_per_layer,
                            std::uint32_t lora_rank);

  /// General profile. `layer_flops` and `layer_adapter_bits` have one entry
  /// per layer; `smashed_bits_at_cut` and `grad_bits_at_cut` have one entry
  /// per cut (num_layers + 1).
  static LlmProfile custom(Flops flops_embedding, std::vector<Flops> layer_flops,
                           Flops flops_head,
                           std::vector<Bits> smashed_bits_at_cut,
                           std::vector<Bits> grad_bits_at_cut,
                           std::vector<Bits> layer_adapter_bits,
                           std::uint32_t lora_rank);

  std::uint32_t num_layers() const {
    return static_cast<std::uint32_t>(layer_flops_.size());
  }
  Flops flops_embedding() const { return flops_embedding_; }
  Flops flops_head() const { return flops_head_; }
  std::uint32_t lora_rank() const { return lora_rank_; }
  const std::vector<Flops>& layer_flops() const { return layer_flops_; }
  const std::vector<Bits>& smashed_bits_at_cut() const { return smashed_; }
  const std::vector<Bits>& grad_bits_at_cut() const { return grad_; }
  const std::vector<Bits>& layer_adapter_bits() const { return adapter_; }

  /// True when all layers share FLOPs and adapter size and all cuts share
  /// tensor sizes.
  bool is_uniform() const;

  Flops total_flops() const { return total_; }

  Flops device_flops(std::uint32_t cut) const;
  Flops server_flops(std::uint32_t cut) const;
  Bits smashed_bits(std::uint32_t cut) const;
  Bits grad_bits(std::uint32_t cut) const;
  /// Size of the adapters of layers 1..cut, i.e. what travels over the air.
  Bits adapter_bits(std::uint32_t cut) const;

  bool operator==(const LlmProfile& other) const;

 private:
  void check_cut(std::uint32_t cut) const;
  void finalize();

  Flops flops_embedding_ = 0;
  Flops flops_head_ = 0;
  std::uint32_t lora_rank_ = 0;
  std::vector<Flops> layer_flops_;
  std::vector<Bits> smashed_;
  std::vector<Bits> grad_;
  std::vector<Bits> adapter_;
  // Prefix sums over layers, size num_layers + 1.
  std::vector<Flops> flops_prefix_;
  std::vector<Bits> adapter_prefix_;
  Flops total_ = 0;
};

/// Builds the profile of `shape`:
///   layer FLOPs   = 3 * 2 * params_per_layer * tokens (forward + ~2x backward)
///   head FLOPs    = 3 * 2 * hidden * vocab * tokens
///   embedding     = tokens * hidden (gather)
///   smashed/grad  = tokens * hidden * activation_bits
///   adapter/layer = targets * rank * (hidden + hidden) * adapter_param_bits
LlmProfile make_profile(const TransformerShape& shape);

/// 32-layer, 2048-wide LLaMA-3.2-1B-style decoder at batch 4, sequence 512,
/// LoRA rank 8.
TransformerShape default_llama_shape();
LlmProfile default_llama_profile();

}  // namespace cardsim
