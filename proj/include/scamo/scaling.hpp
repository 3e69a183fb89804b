#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scamo/core.hpp"
#include "scamo/json_text.hpp"

namespace scamo {

/// The minimum-loss run of one isoFLOPs bucket.
struct FrontierPoint {
    double flops_bucket_log10 = 0.0;
    RunRecord run;
    double n_nv = 0.0;
    double n_v = 0.0;
    double d_tokens = 0.0;
    double loss = 0.0;
};

/// y = 10^log10_coef * x^exponent, fit in log10-log10 space.
/// r2 is empty for published laws whose goodness of fit was not reported.
struct PowerLawFit {
    double log10_coef = 0.0;
    double exponent = 0.0;
    std::optional<double> r2;

    double operator()(double x) const;
};

/// loss = slope * log10(C) + intercept.
struct LogLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::optional<double> r2;
};

struct ScalingFits {
    PowerLawFit nv_vs_c;
    PowerLawFit nnv_vs_c;
    PowerLawFit d_vs_c;
    PowerLawFit nv_vs_nnv;
    LogLawFit loss_vs_c;
};

inline constexpr double kDefaultBinWidthLog10 = 0.25;

/// Buckets runs by floor(log10(flops) / bin_width) * bin_width and keeps the
/// minimum-loss run of each bucket. Ties prefer smaller N_nv, then smaller
/// N_v, then the lexicographically smaller run_id. Sorted by bucket.
std::vector<FrontierPoint> pareto_frontier(std::span<const RunRecord> runs,
                                           double bin_width_log10 = kDefaultBinWidthLog10);

/// OLS of log10(y) on log10(x).
PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

/// OLS of loss on log10(C).
LogLawFit fit_log_law(std::span<const double> cs, std::span<const double> losses);

ScalingFits fit_all(std::span<const FrontierPoint> frontier);

ordered_json to_json(const PowerLawFit& fit);
ordered_json to_json(const LogLawFit& fit);
ordered_json to_json(const ScalingFits& fits);
ordered_json to_json(const FrontierPoint& p);

/// Parses the document written by to_json(ScalingFits). Throws
/// std::invalid_argument on missing keys or non-finite values.
ScalingFits scaling_fits_from_json(const nlohmann::json& doc);

}  // namespace scamo
