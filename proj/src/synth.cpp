#include "scamo/synth.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "scamo/flops.hpp"
#include "scamo/rng.hpp"

namespace scamo {

void SynthSpec::validate() const {
    if (!(c_grid_log10.min < c_grid_log10.max)) throw std::invalid_argument("synth: grid min must be < max");
    if (c_grid_log10.n_points < 2) throw std::invalid_argument("synth: grid needs >= 2 points");
    if (runs_per_budget < 1) throw std::invalid_argument("synth: runs_per_budget must be >= 1");
    if (!(noise_sigma_log10 >= 0.0) || !std::isfinite(noise_sigma_log10)) {
        throw std::invalid_argument("synth: noise sigma must be finite and >= 0");
    }
    if (n_ctx < 1) throw std::invalid_argument("synth: n_ctx must be >= 1");
}

ModelConfig backsolve_config(double n_nv, std::int64_t n_ctx, std::int64_t n_vocab) {
    constexpr std::int64_t kMaxLayers = 128;
    constexpr std::int64_t kStep = 8;
    constexpr std::int64_t kHeadWidth = 64;
    if (!(n_nv > 0.0) || !std::isfinite(n_nv)) throw std::domain_error("backsolve: n_nv must be > 0");

    ModelConfig best;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::int64_t layers = 1; layers <= kMaxLayers; ++layers) {
        const double d_exact = std::sqrt(n_nv / (12.0 * static_cast<double>(layers)));
        const auto lo = std::max<std::int64_t>(kStep, static_cast<std::int64_t>(std::floor(d_exact / kStep)) * kStep);
        for (std::int64_t d : {lo, lo + kStep}) {
            ModelConfig cfg{layers, d % kHeadWidth == 0 ? d / kHeadWidth : 1, d, n_ctx, n_vocab, 4};
            const double params = static_cast<double>(params_non_embedding(cfg));
            const double err = std::abs(std::log(params / n_nv));
            if (err < best_err) {
                best_err = err;
                best = cfg;
            }
        }
    }
    if (best_err > std::log(1.2)) {
        throw std::domain_error("backsolve: no valid config within 20% of n_nv = " + std::to_string(n_nv));
    }
    return best;
}

namespace {

std::string run_id(int budget, int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%03d-r%02d", budget, k);
    return buf;
}

RunRecord make_record(std::string id, double c, double n_nv, double n_v, double d_tokens, double loss,
                      std::int64_t n_ctx) {
    RunRecord r;
    r.run_id = std::move(id);
    const ModelConfig shape = backsolve_config(n_nv, n_ctx, 1);
    r.n_layers = shape.n_layers;
    r.n_heads = shape.n_heads;
    r.d_model = shape.d_model;
    r.n_ctx = n_ctx;
    r.vocab_size = std::max<std::int64_t>(1, std::llround(n_v / static_cast<double>(shape.d_model)));
    r.tokens_trained = std::max<std::int64_t>(1, std::llround(d_tokens));
    r.flops = c;
    r.normalized_loss = loss;
    r.n_nv = n_nv;
    r.n_v = n_v;
    r.d_tokens = d_tokens;
    return r;
}

}  // namespace

std::vector<RunRecord> synth_runs(const SynthSpec& spec) {
    spec.validate();
    const auto& laws = spec.laws;
    const double sigma = spec.noise_sigma_log10;
    const auto& grid = spec.c_grid_log10;
    std::vector<RunRecord> runs;
    runs.reserve(static_cast<std::size_t>(grid.n_points * spec.runs_per_budget));

    for (int b = 0; b < grid.n_points; ++b) {
        Rng rng(spec.seed + static_cast<std::uint64_t>(b));
        const double log_c = grid.min + (grid.max - grid.min) * b / (grid.n_points - 1);
        const double c = std::pow(10.0, log_c);

        // Draw order is part of the output contract: n_nv, n_v, d, loss, then siblings.
        const double n_nv = laws.nnv_vs_c(c) * std::pow(10.0, sigma * rng.normal());
        const double n_v = laws.nv_vs_c(c) * std::pow(10.0, sigma * rng.normal());
        const double d = laws.d_vs_c(c) * std::pow(10.0, sigma * rng.normal());
        const double loss = laws.loss_vs_c.slope * log_c + laws.loss_vs_c.intercept + sigma * rng.normal();
        runs.push_back(make_record(run_id(b, 0), c, n_nv, n_v, d, loss, spec.n_ctx));

        for (int k = 1; k < spec.runs_per_budget; ++k) {
            // Alternate above/below the optimum in N_nv, trading against tokens.
            const double step = 0.25 * ((k + 1) / 2) * (k % 2 == 1 ? 1.0 : -1.0);
            const double shift = std::pow(10.0, step);
            const double offset = 0.01 + 0.5 * rng.uniform();
            runs.push_back(make_record(run_id(b, k), c, n_nv * shift, n_v * std::sqrt(shift), d / shift,
                                       loss + offset, spec.n_ctx));
        }
    }
    return runs;
}

std::vector<std::vector<double>> synth_latents(const LatentSpec& spec) {
    constexpr double kEdge = 1e-6;
    Rng rng(spec.seed);
    std::vector<std::vector<double>> out;

    if (spec.kind == LatentKind::uniform_code) {
        if (!spec.levels) throw std::invalid_argument("uniform_code latents need FSQ levels");
        const auto& levels = *spec.levels;
        if (spec.dim != 0 && spec.dim != levels.dim()) {
            throw std::invalid_argument("uniform_code: dim must equal the number of FSQ channels");
        }
        out.reserve(spec.n);
        for (std::size_t s = 0; s < spec.n; ++s) {
            std::vector<double> z(levels.dim());
            for (std::size_t i = 0; i < levels.dim(); ++i) {
                const double span = static_cast<double>(levels[i] - 1);
                const auto level = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels[i])));
                // Rounding cell of `level` in sigmoid space; the end cells are half as wide.
                const double lo = std::max(kEdge, (level - 0.5) / span);
                const double hi = std::min(1.0 - kEdge, (level + 0.5) / span);
                z[i] = logit(rng.uniform(lo, hi));
            }
            out.push_back(std::move(z));
        }
        return out;
    }

    if (!spec.n_components || *spec.n_components == 0) {
        throw std::invalid_argument("gaussian_mixture latents need n_components >= 1");
    }
    if (spec.dim == 0) throw std::invalid_argument("gaussian_mixture latents need dim >= 1");
    std::vector<std::vector<double>> means;
    if (spec.means) {
        means = *spec.means;
        if (means.size() != *spec.n_components) throw std::invalid_argument("gaussian_mixture: means/n_components mismatch");
        for (const auto& m : means) {
            if (m.size() != spec.dim) throw std::invalid_argument("gaussian_mixture: mean dimension mismatch");
        }
    } else {
        means.assign(*spec.n_components, std::vector<double>(spec.dim));
        for (auto& m : means) {
            for (double& x : m) x = rng.uniform(-2.0, 2.0);
        }
    }
    out.reserve(spec.n);
    for (std::size_t s = 0; s < spec.n; ++s) {
        const auto& m = means[rng.below(means.size())];
        std::vector<double> z(spec.dim);
        for (std::size_t i = 0; i < spec.dim; ++i) z[i] = m[i] + rng.normal();
        out.push_back(std::move(z));
    }
    return out;
}

}  // namespace scamo
