#pragma once

#include <cstdint>

#include "scamo/core.hpp"

namespace scamo {

/// Forward-pass FLOPs per token, split by operation.
struct FlopsBreakdown {
    std::uint64_t embeddings = 0;
    std::uint64_t attn_qkv = 0;
    std::uint64_t attn_mask = 0;
    std::uint64_t attn_project = 0;
    std::uint64_t ff = 0;
    std::uint64_t logits = 0;
    std::uint64_t total = 0;
};

/// Exact integer accounting for a decoder-only transformer:
///
///   embeddings   = 4 d_model
///   attn_qkv     = 2 n_layers d_model 3 (d_attn n_heads)
///   attn_mask    = 2 n_layers n_ctx (d_attn n_heads)
///   attn_project = 2 n_layers (d_attn n_heads) d_model
///   ff           = 2 n_layers 2 d_model d_ff
///   logits       = 2 d_model n_vocab
///
/// with d_attn = d_model / n_heads and d_ff = ff_ratio d_model.
/// Throws std::overflow_error if any term leaves the uint64 range.
FlopsBreakdown flops_per_token_exact(const ModelConfig& cfg);

/// N = 2 d_model n_layers (2 d_attn n_heads + d_ff); n_ctx and n_vocab are ignored.
std::uint64_t params_non_embedding(const ModelConfig& cfg);

/// N_v = V d.
std::uint64_t params_vocab(std::uint64_t vocab, std::uint64_t d_model);

/// C ~= 6 (N_nv + N_v) D.
double flops_approx(double n_nv, double n_v, double d_tokens);

}  // namespace scamo
