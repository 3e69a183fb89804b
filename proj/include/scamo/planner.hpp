#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scamo/json_text.hpp"
#include "scamo/scaling.hpp"

namespace scamo {

struct BudgetPlan {
    double flops_budget = 0.0;
    double n_nv = 0.0;
    double n_v = 0.0;
    std::int64_t vocab_size = 1;
    std::int64_t vocab_pow2 = 1;
    double d_tokens = 0.0;
    double predicted_loss = 0.0;
    /// log10(6 (n_nv + n_v) d_tokens / flops_budget), computed on the
    /// reported d_tokens.
    double constraint_residual_log10 = 0.0;
    bool rescaled_d = false;
};

struct PlanOptions {
    /// Divide d_tokens by 10^residual so the FLOPs constraint holds exactly.
    bool rescale_d = false;
};

double predict_loss(double c, const LogLawFit& law);

/// Inverse of predict_loss. Throws std::domain_error("non-invertible law")
/// for a zero slope.
double flops_for_loss(double target, const LogLawFit& law);

/// Power of two nearest to `v` in log2 space, ties rounding up.
std::int64_t nearest_pow2(double v);

BudgetPlan plan_budget(double c, const ScalingFits& fits, std::int64_t d_model,
                       const PlanOptions& options = {});

struct VocabPrediction {
    double n_v = 0.0;
    std::int64_t vocab = 1;
    std::int64_t vocab_pow2 = 1;
};

VocabPrediction vocab_for_model(double n_nv, const PowerLawFit& law, std::int64_t d_model);

struct ScaleFasterReport {
    double nv_vs_nnv_exponent = 0.0;  // a / b
    double d_vs_nnv_exponent = 0.0;   // b / c
    bool scale_nv_faster_than_nnv = false;
    bool scale_nnv_faster_than_d = false;
};

ScaleFasterReport scale_faster_report(const ScalingFits& fits);

/// A configuration someone actually chose for a budget, compared against
/// the raw law output quantity by quantity.
struct ReferenceChoice {
    double flops_budget = 0.0;
    double n_nv = 0.0;
    double vocab = 0.0;
    double d_tokens = 0.0;
};

struct ReferenceDelta {
    std::string quantity;
    double planned_log10 = 0.0;
    double reference_log10 = 0.0;
    double delta_log10 = 0.0;
    bool agrees = false;
};

inline constexpr double kReferenceToleranceLog10 = 0.35;

std::vector<ReferenceDelta> compare_to_reference(const BudgetPlan& plan,
                                                 const ReferenceChoice& ref,
                                                 double tolerance_log10 = kReferenceToleranceLog10);

struct FitsPreset {
    std::string_view name;
    ScalingFits fits;
    std::optional<ReferenceChoice> reference;
};

/// "scamo-paper": the published text-to-motion laws and the configuration
/// chosen for the 1e18 budget (3B non-vocabulary parameters, 2^16 codes,
/// 10^7.5 tokens).
const FitsPreset* find_fits_preset(std::string_view name);
const FitsPreset& paper_preset();

ordered_json to_json(const BudgetPlan& plan);
ordered_json to_json(const VocabPrediction& v);
ordered_json to_json(const ScaleFasterReport& r);
ordered_json to_json(const std::vector<ReferenceDelta>& deltas);

}  // namespace scamo
