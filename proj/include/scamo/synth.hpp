#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scamo/core.hpp"
#include "scamo/fsq.hpp"
#include "scamo/scaling.hpp"

namespace scamo {

struct LogGrid {
    double min = 14.0;
    double max = 19.0;
    int n_points = 6;
};

struct SynthSpec {
    ScalingFits laws;
    LogGrid c_grid_log10;
    int runs_per_budget = 4;
    double noise_sigma_log10 = 0.0;
    std::uint64_t seed = 42;
    std::int64_t n_ctx = 1024;

    void validate() const;
};

/// Runs sampled around the law-optimal triplet of every budget on the grid.
///
/// Record 0 of each budget (run_id "c<budget>-r00") is the optimum: its
/// parameters and tokens are the law values times 10^(sigma N(0,1)), its
/// loss the log law plus sigma N(0,1). The remaining siblings move N_nv and
/// D in opposite directions and sit at least 0.01 above the optimum's loss.
/// Every run's flops is the budget itself. Budget i draws from a generator
/// seeded with seed + i.
std::vector<RunRecord> synth_runs(const SynthSpec& spec);

/// Smallest shape (layers, heads, d_model) whose non-embedding parameter
/// count is nearest `n_nv` in log space. d_model is a multiple of 8 with
/// 64-wide heads where possible. Throws std::domain_error when no shape is
/// within 20%.
ModelConfig backsolve_config(double n_nv, std::int64_t n_ctx, std::int64_t n_vocab);

enum class LatentKind { uniform_code, gaussian_mixture };

struct LatentSpec {
    LatentKind kind = LatentKind::uniform_code;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::optional<FsqLevels> levels;              // uniform_code
    std::optional<std::size_t> n_components;      // gaussian_mixture
    std::optional<std::vector<std::vector<double>>> means;  // gaussian_mixture, else random in [-2, 2]^dim
    std::uint64_t seed = 42;
};

/// uniform_code: per channel, a level is drawn uniformly and u is drawn
/// uniformly inside that level's rounding cell (clipped to
/// (1e-6, 1 - 1e-6)); the latent is logit(u). The induced FSQ code
/// distribution is exactly uniform over the codebook.
///
/// gaussian_mixture: unit-variance isotropic Gaussians, component chosen
/// uniformly per sample.
std::vector<std::vector<double>> synth_latents(const LatentSpec& spec);

}  // namespace scamo
