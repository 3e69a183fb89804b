#include "scamo/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scamo {
namespace {

bool finite_law(const PowerLawFit& f) { return std::isfinite(f.log10_coef) && std::isfinite(f.exponent); }

std::int64_t round_vocab(double n_v, std::int64_t d_model) {
    const double v = std::round(n_v / static_cast<double>(d_model));
    if (!(v < 9.0e18)) throw std::overflow_error("vocabulary size out of range");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
}

}  // namespace

double predict_loss(double c, const LogLawFit& law) {
    if (!(c > 0.0)) throw std::domain_error("predict_loss: compute must be > 0");
    return law.slope * std::log10(c) + law.intercept;
}

double flops_for_loss(double target, const LogLawFit& law) {
    if (law.slope == 0.0) throw std::domain_error("non-invertible law");
    return std::pow(10.0, (target - law.intercept) / law.slope);
}

std::int64_t nearest_pow2(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("nearest_pow2: value must be > 0");
    const double k = std::floor(std::log2(v) + 0.5);
    if (k < 0.0) return 1;
    if (k > 62.0) throw std::overflow_error("nearest_pow2: out of range");
    return std::int64_t{1} << static_cast<int>(k);
}

BudgetPlan plan_budget(double c, const ScalingFits& fits, std::int64_t d_model, const PlanOptions& options) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error("plan_budget: compute must be > 0");
    if (d_model < 1) throw std::invalid_argument("plan_budget: d_model must be >= 1");
    if (!finite_law(fits.nv_vs_c) || !finite_law(fits.nnv_vs_c) || !finite_law(fits.d_vs_c) ||
        !std::isfinite(fits.loss_vs_c.slope) || !std::isfinite(fits.loss_vs_c.intercept)) {
        throw std::invalid_argument("plan_budget: non-finite law parameters");
    }

    BudgetPlan p;
    p.flops_budget = c;
    p.n_v = fits.nv_vs_c(c);
    p.n_nv = fits.nnv_vs_c(c);
    p.d_tokens = fits.d_vs_c(c);
    p.vocab_size = round_vocab(p.n_v, d_model);
    p.vocab_pow2 = nearest_pow2(static_cast<double>(p.vocab_size));
    p.predicted_loss = predict_loss(c, fits.loss_vs_c);
    p.constraint_residual_log10 = std::log10(6.0 * (p.n_nv + p.n_v) * p.d_tokens / c);
    if (options.rescale_d) {
        p.d_tokens /= std::pow(10.0, p.constraint_residual_log10);
        p.constraint_residual_log10 = std::log10(6.0 * (p.n_nv + p.n_v) * p.d_tokens / c);
        p.rescaled_d = true;
    }
    return p;
}

VocabPrediction vocab_for_model(double n_nv, const PowerLawFit& law, std::int64_t d_model) {
    if (!(n_nv > 0.0)) throw std::domain_error("vocab_for_model: n_nv must be > 0");
    if (d_model < 1) throw std::invalid_argument("vocab_for_model: d_model must be >= 1");
    VocabPrediction v;
    v.n_v = law(n_nv);
    v.vocab = round_vocab(v.n_v, d_model);
    v.vocab_pow2 = nearest_pow2(static_cast<double>(v.vocab));
    return v;
}

ScaleFasterReport scale_faster_report(const ScalingFits& fits) {
    const double a = fits.nv_vs_c.exponent;
    const double b = fits.nnv_vs_c.exponent;
    const double c = fits.d_vs_c.exponent;
    if (a == 0.0 || b == 0.0 || c == 0.0) throw std::domain_error("scale_faster_report: zero exponent");
    ScaleFasterReport r;
    r.nv_vs_nnv_exponent = a / b;
    r.d_vs_nnv_exponent = b / c;
    r.scale_nv_faster_than_nnv = r.nv_vs_nnv_exponent > 1.0;
    r.scale_nnv_faster_than_d = r.d_vs_nnv_exponent > 1.0;
    return r;
}

std::vector<ReferenceDelta> compare_to_reference(const BudgetPlan& plan, const ReferenceChoice& ref,
                                                 double tolerance_log10) {
    auto row = [&](const char* name, double planned, double reference) {
        ReferenceDelta d;
        d.quantity = name;
        d.planned_log10 = std::log10(planned);
        d.reference_log10 = std::log10(reference);
        d.delta_log10 = d.planned_log10 - d.reference_log10;
        d.agrees = std::abs(d.delta_log10) <= tolerance_log10;
        return d;
    };
    return {
        row("n_nv", plan.n_nv, ref.n_nv),
        row("vocab_size", static_cast<double>(plan.vocab_size), ref.vocab),
        row("d_tokens", plan.d_tokens, ref.d_tokens),
    };
}

namespace {

std::vector<FitsPreset> make_presets() {
    ScalingFits paper;
    paper.nv_vs_c = {-5.29, 0.75, std::nullopt};
    paper.nnv_vs_c = {-0.52, 0.57, std::nullopt};
    paper.d_vs_c = {-0.05, 0.43, std::nullopt};
    paper.nv_vs_nnv = {-5.604, 1.467, 0.95};
    paper.loss_vs_c = {-1.062, 13.839, std::nullopt};
    ReferenceChoice chosen{1e18, 3e9, 65536.0, std::pow(10.0, 7.5)};
    return {FitsPreset{"scamo-paper", paper, chosen}};
}

const std::vector<FitsPreset>& presets() {
    static const std::vector<FitsPreset> p = make_presets();
    return p;
}

}  // namespace

const FitsPreset* find_fits_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

const FitsPreset& paper_preset() { return presets().front(); }

ordered_json to_json(const BudgetPlan& plan) {
    ordered_json j;
    j["flops_budget"] = plan.flops_budget;
    j["n_nv"] = plan.n_nv;
    j["n_v"] = plan.n_v;
    j["vocab_size"] = plan.vocab_size;
    j["vocab_pow2"] = plan.vocab_pow2;
    j["d_tokens"] = plan.d_tokens;
    j["predicted_loss"] = plan.predicted_loss;
    j["constraint_residual_log10"] = plan.constraint_residual_log10;
    j["rescaled_d"] = plan.rescaled_d;
    return j;
}

ordered_json to_json(const VocabPrediction& v) {
    ordered_json j;
    j["n_v"] = v.n_v;
    j["vocab"] = v.vocab;
    j["vocab_pow2"] = v.vocab_pow2;
    return j;
}

ordered_json to_json(const ScaleFasterReport& r) {
    ordered_json j;
    j["nv_vs_nnv_exponent"] = r.nv_vs_nnv_exponent;
    j["d_vs_nnv_exponent"] = r.d_vs_nnv_exponent;
    j["verdicts"] = ordered_json::array({r.scale_nv_faster_than_nnv, r.scale_nnv_faster_than_d});
    return j;
}

ordered_json to_json(const std::vector<ReferenceDelta>& deltas) {
    ordered_json rows = ordered_json::array();
    bool all = true;
    for (const auto& d : deltas) {
        ordered_json j;
        j["quantity"] = d.quantity;
        j["planned_log10"] = d.planned_log10;
        j["reference_log10"] = d.reference_log10;
        j["delta_log10"] = d.delta_log10;
        j["agrees"] = d.agrees;
        rows.push_back(std::move(j));
        all = all && d.agrees;
    }
    ordered_json out;
    out["tolerance_log10"] = kReferenceToleranceLog10;
    out["all_agree"] = all;
    out["rows"] = std::move(rows);
    return out;
}

}  // namespace scamo
