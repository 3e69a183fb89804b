#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scamo/core.hpp"

namespace scamo {

using Vector = std::vector<double>;

/// Learned codebook with its EMA accumulators.
struct VqCodebook {
    std::vector<Vector> entries;
    std::vector<double> usage_counts;
    std::vector<Vector> ema_sums;

    /// ema_sums start at initial_usage * entry so the state is a fixed point
    /// of the update for data sitting on the entries.
    static VqCodebook from_entries(std::vector<Vector> entries, double initial_usage = 0.0);

    std::size_t size() const { return entries.size(); }
    std::size_t dim() const { return entries.empty() ? 0 : entries.front().size(); }

    void validate() const;
};

struct VqTrainParams {
    double alpha = 0.02;
    double ema_decay = 0.99;
    double reset_threshold = 1.0;
    std::uint64_t rng_seed = 42;

    void validate() const;
};

struct VqAssignment {
    std::size_t index = 0;
    Vector entry;
};

/// Nearest entry by squared Euclidean distance; ties go to the lowest index.
VqAssignment vq_quantize(std::span<const double> z, const VqCodebook& cb);

/// alpha * ||z - z_hat||^2.
double commitment_loss(std::span<const double> z, std::span<const double> z_hat, double alpha);

/// One EMA step over a batch. Returns the updated codebook; `cb` is untouched.
VqCodebook vq_ema_update(std::span<const Vector> batch, const VqCodebook& cb,
                         const VqTrainParams& p);

struct VqResetResult {
    VqCodebook codebook;
    std::size_t n_reset = 0;
};

/// Replaces every code with usage below p.reset_threshold by a batch vector
/// drawn uniformly with a generator seeded from p.rng_seed.
VqResetResult vq_reset(const VqCodebook& cb, std::span<const Vector> batch,
                       const VqTrainParams& p);

/// Histogram of vq_quantize assignments over a set of latents.
CodeUsageHistogram vq_assignment_histogram(std::span<const Vector> latents, const VqCodebook& cb);

}  // namespace scamo
