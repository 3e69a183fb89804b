#include "scamo/vq.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scamo/rng.hpp"

namespace scamo {
namespace {

constexpr double kUsageFloor = 1e-8;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void check_batch(std::span<const Vector> batch, std::size_t dim) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    for (const auto& v : batch) {
        if (v.size() != dim) throw std::invalid_argument("batch vector dimension does not match codebook");
    }
}

}  // namespace

VqCodebook VqCodebook::from_entries(std::vector<Vector> entries, double initial_usage) {
    VqCodebook cb;
    cb.usage_counts.assign(entries.size(), initial_usage);
    cb.ema_sums = entries;
    for (auto& s : cb.ema_sums) {
        for (double& x : s) x *= initial_usage;
    }
    cb.entries = std::move(entries);
    cb.validate();
    return cb;
}

void VqCodebook::validate() const {
    if (entries.empty()) throw std::invalid_argument("empty codebook");
    const std::size_t d = entries.front().size();
    if (d == 0) throw std::invalid_argument("codebook entries must have dimension >= 1");
    if (usage_counts.size() != entries.size() || ema_sums.size() != entries.size()) {
        throw std::invalid_argument("codebook accumulators do not match entry count");
    }
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].size() != d || ema_sums[k].size() != d) {
            throw std::invalid_argument("codebook entries have inconsistent dimension");
        }
        for (double x : entries[k]) {
            if (!std::isfinite(x)) throw std::invalid_argument("codebook entry is not finite");
        }
        if (!(usage_counts[k] >= 0.0)) throw std::invalid_argument("negative codebook usage");
    }
}

void VqTrainParams::validate() const {
    if (!(ema_decay > 0.0 && ema_decay < 1.0)) throw std::invalid_argument("ema_decay must be in (0, 1)");
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(reset_threshold >= 0.0)) throw std::invalid_argument("reset_threshold must be >= 0");
}

VqAssignment vq_quantize(std::span<const double> z, const VqCodebook& cb) {
    if (cb.entries.empty()) throw std::invalid_argument("empty codebook");
    if (z.size() != cb.dim()) throw std::invalid_argument("latent dimension does not match codebook");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cb.entries.size(); ++k) {
        const double d = squared_distance(z, cb.entries[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return {best, cb.entries[best]};
}

double commitment_loss(std::span<const double> z, std::span<const double> z_hat, double alpha) {
    if (z.size() != z_hat.size()) throw std::invalid_argument("commitment_loss: dimension mismatch");
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    return alpha * squared_distance(z, z_hat);
}

VqCodebook vq_ema_update(std::span<const Vector> batch, const VqCodebook& cb, const VqTrainParams& p) {
    p.validate();
    cb.validate();
    check_batch(batch, cb.dim());

    const std::size_t k_count = cb.size();
    const std::size_t dim = cb.dim();
    std::vector<double> n(k_count, 0.0);
    std::vector<Vector> s(k_count, Vector(dim, 0.0));
    for (const auto& z : batch) {
        const std::size_t k = vq_quantize(z, cb).index;
        n[k] += 1.0;
        for (std::size_t i = 0; i < dim; ++i) s[k][i] += z[i];
    }

    VqCodebook out = cb;
    const double decay = p.ema_decay;
    for (std::size_t k = 0; k < k_count; ++k) {
        out.usage_counts[k] = decay * cb.usage_counts[k] + (1.0 - decay) * n[k];
        for (std::size_t i = 0; i < dim; ++i) {
            out.ema_sums[k][i] = decay * cb.ema_sums[k][i] + (1.0 - decay) * s[k][i];
        }
        if (out.usage_counts[k] > 0.0) {
            const double denom = std::max(out.usage_counts[k], kUsageFloor);
            for (std::size_t i = 0; i < dim; ++i) out.entries[k][i] = out.ema_sums[k][i] / denom;
        }
    }
    return out;
}

VqResetResult vq_reset(const VqCodebook& cb, std::span<const Vector> batch, const VqTrainParams& p) {
    p.validate();
    cb.validate();
    check_batch(batch, cb.dim());

    VqResetResult r{cb, 0};
    Rng rng(p.rng_seed);
    for (std::size_t k = 0; k < cb.size(); ++k) {
        if (!(cb.usage_counts[k] < p.reset_threshold)) continue;
        const auto& src = batch[rng.below(batch.size())];
        r.codebook.entries[k] = src;
        r.codebook.ema_sums[k] = src;
        r.codebook.usage_counts[k] = 1.0;
        ++r.n_reset;
    }
    return r;
}

CodeUsageHistogram vq_assignment_histogram(std::span<const Vector> latents, const VqCodebook& cb) {
    CodeUsageHistogram h(cb.size());
    for (const auto& z : latents) h.observe(vq_quantize(z, cb).index);
    return h;
}

}  // namespace scamo
