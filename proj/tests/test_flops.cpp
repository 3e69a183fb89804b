#include <doctest.h>

#include <random>

#include "scamo/flops.hpp"

using namespace scamo;

namespace {

ModelConfig cfg(std::int64_t layers, std::int64_t heads, std::int64_t d, std::int64_t ctx, std::int64_t vocab,
                std::int64_t ff = 4) {
    return ModelConfig{layers, heads, d, ctx, vocab, ff};
}

}  // namespace

TEST_SUITE("flops") {

TEST_CASE("44M preset configuration") {
    // Oracle: the reference per-token formula evaluated term by term.
    const auto b = flops_per_token_exact(cfg(8, 8, 512, 1024, 65536));
    CHECK(b.embeddings == 2048);
    CHECK(b.attn_qkv == 12582912);
    CHECK(b.attn_mask == 8388608);
    CHECK(b.attn_project == 4194304);
    CHECK(b.ff == 33554432);
    CHECK(b.logits == 67108864);
    CHECK(b.total == 125831168);
}

TEST_CASE("unit configuration breakdown") {
    const auto b = flops_per_token_exact(cfg(1, 1, 2, 1, 2));
    CHECK(b.embeddings == 8);
    CHECK(b.attn_qkv == 24);
    CHECK(b.attn_mask == 4);
    CHECK(b.attn_project == 8);
    CHECK(b.ff == 64);
    CHECK(b.logits == 8);
    CHECK(b.total == 116);

    const auto doubled = flops_per_token_exact(cfg(1, 1, 2, 2, 2));
    CHECK(doubled.attn_mask == 8);
    CHECK(doubled.total == 120);
}

TEST_CASE("breakdown total is the exact sum") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 500; ++i) {
        const auto heads = 1 + static_cast<std::int64_t>(gen() % 32);
        const auto b = flops_per_token_exact(cfg(1 + gen() % 64, heads, heads * (1 + gen() % 128), 1 + gen() % 4096,
                                                 1 + gen() % 70000, 1 + gen() % 8));
        CHECK(b.total == b.embeddings + b.attn_qkv + b.attn_mask + b.attn_project + b.ff + b.logits);
    }
}

TEST_CASE("total is monotone in every field") {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 300; ++i) {
        const auto heads = 1 + static_cast<std::int64_t>(gen() % 16);
        const auto base = cfg(1 + gen() % 32, heads, heads * (1 + gen() % 64), 1 + gen() % 2048, 1 + gen() % 65536,
                              1 + gen() % 6);
        const auto t = flops_per_token_exact(base).total;
        auto bump = base;
        bump.n_layers += 1;
        CHECK(flops_per_token_exact(bump).total >= t);
        bump = base;
        bump.d_model += bump.n_heads;
        CHECK(flops_per_token_exact(bump).total >= t);
        bump = base;
        bump.n_ctx += 1;
        CHECK(flops_per_token_exact(bump).total >= t);
        bump = base;
        bump.n_vocab += 1;
        CHECK(flops_per_token_exact(bump).total >= t);
        bump = base;
        bump.ff_ratio += 1;
        CHECK(flops_per_token_exact(bump).total >= t);
    }
}

TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS(flops_per_token_exact(cfg(1, 3, 10, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(flops_per_token_exact(cfg(0, 1, 2, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(flops_per_token_exact(cfg(1, 1, 2, 1, 1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(flops_per_token_exact(cfg(1 << 20, 1, 1 << 20, 1, 1 << 20)), std::overflow_error);
}

TEST_CASE("params_non_embedding") {
    CHECK(params_non_embedding(cfg(8, 8, 512, 1, 1)) == 25165824);
    CHECK(params_non_embedding(cfg(1, 1, 1, 1, 1)) == 12);
    CHECK(params_non_embedding(cfg(3, 2, 64, 1, 1)) * 4 == params_non_embedding(cfg(3, 2, 128, 1, 1)));

    std::mt19937_64 gen(5);
    for (int i = 0; i < 200; ++i) {
        const auto heads = 1 + static_cast<std::int64_t>(gen() % 32);
        const auto c = cfg(1 + gen() % 96, heads, heads * (1 + gen() % 200), 1, 1);
        const auto d = static_cast<std::uint64_t>(c.d_model);
        CHECK(params_non_embedding(c) == 12 * static_cast<std::uint64_t>(c.n_layers) * d * d);
    }
}

TEST_CASE("params_vocab") {
    CHECK(params_vocab(65536, 512) == 33554432);
    CHECK(params_vocab(65536, 3200) == 209715200);
    CHECK(params_vocab(1, 1) == 1);
    CHECK_THROWS(params_vocab(0, 3));
}

TEST_CASE("flops_approx") {
    CHECK(flops_approx(1e6, 0, 1e3) == 6e9);
    CHECK(flops_approx(25165824, 33554432, 1e6) == doctest::Approx(3.52321536e14).epsilon(1e-15));
    CHECK(flops_approx(123.0, 45.0, 670.0) * 10 == doctest::Approx(flops_approx(123.0, 45.0, 6700.0)).epsilon(1e-15));
    CHECK_THROWS(flops_approx(0, 1, 1));
    CHECK_THROWS(flops_approx(1, -1, 1));
}

}
