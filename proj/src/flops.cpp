#include "scamo/flops.hpp"

#include <initializer_list>
#include <stdexcept>

namespace scamo {
namespace {

std::uint64_t mul(std::initializer_list<std::uint64_t> factors) {
    std::uint64_t acc = 1;
    for (std::uint64_t f : factors) {
        if (__builtin_mul_overflow(acc, f, &acc)) throw std::overflow_error("FLOPs accounting overflows uint64");
    }
    return acc;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("FLOPs accounting overflows uint64");
    return r;
}

std::uint64_t u(std::int64_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace

FlopsBreakdown flops_per_token_exact(const ModelConfig& cfg) {
    cfg.validate();
    const std::uint64_t layers = u(cfg.n_layers);
    const std::uint64_t d_model = u(cfg.d_model);
    const std::uint64_t attn_width = u(cfg.d_attn()) * u(cfg.n_heads);
    const std::uint64_t d_ff = mul({d_model, u(cfg.ff_ratio)});

    FlopsBreakdown b;
    b.embeddings = mul({4, d_model});
    b.attn_qkv = mul({2, layers, d_model, 3, attn_width});
    b.attn_mask = mul({2, layers, u(cfg.n_ctx), attn_width});
    b.attn_project = mul({2, layers, attn_width, d_model});
    b.ff = mul({2, layers, 2, d_model, d_ff});
    b.logits = mul({2, d_model, u(cfg.n_vocab)});
    b.total = add(add(add(add(add(b.embeddings, b.attn_qkv), b.attn_mask), b.attn_project), b.ff),
                  b.logits);
    return b;
}

std::uint64_t params_non_embedding(const ModelConfig& cfg) {
    cfg.validate();
    const std::uint64_t attn_width = u(cfg.d_attn()) * u(cfg.n_heads);
    const std::uint64_t d_ff = mul({u(cfg.d_model), u(cfg.ff_ratio)});
    return mul({2, u(cfg.d_model), u(cfg.n_layers), add(mul({2, attn_width}), d_ff)});
}

std::uint64_t params_vocab(std::uint64_t vocab, std::uint64_t d_model) {
    if (vocab == 0 || d_model == 0) throw std::invalid_argument("params_vocab: V and d must be >= 1");
    return mul({vocab, d_model});
}

double flops_approx(double n_nv, double n_v, double d_tokens) {
    if (!(n_nv > 0.0) || !(n_v >= 0.0) || !(d_tokens > 0.0)) {
        throw std::invalid_argument("flops_approx: need n_nv > 0, n_v >= 0, d_tokens > 0");
    }
    return 6.0 * (n_nv + n_v) * d_tokens;
}

}  // namespace scamo
