#include "scamo/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace scamo {

double PowerLawFit::operator()(double x) const { return std::pow(10.0, log10_coef + exponent * std::log10(x)); }

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

// Two-pass centered OLS of y on x.
LineFit ols(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("degenerate fit: all x values are equal");

    const bool flat = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    if (flat) return {0.0, y.front(), 1.0};

    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    if (ss_tot > 0.0) {
        f.r2 = 1.0 - ss_res / ss_tot;
    } else {
        f.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    }
    return f;
}

void check_pair(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit: xs and ys differ in length");
    if (xs.size() < 2) throw std::invalid_argument("fit: need at least 2 points");
}

std::vector<double> log10_positive(std::span<const double> v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw std::invalid_argument("fit: values must be finite and > 0");
        out[i] = std::log10(v[i]);
    }
    return out;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    check_pair(xs, ys);
    const auto lx = log10_positive(xs);
    const auto ly = log10_positive(ys);
    const auto f = ols(lx, ly);
    return {f.intercept, f.slope, f.r2};
}

LogLawFit fit_log_law(std::span<const double> cs, std::span<const double> losses) {
    check_pair(cs, losses);
    const auto lc = log10_positive(cs);
    for (double l : losses) {
        if (!std::isfinite(l)) throw std::invalid_argument("fit: losses must be finite");
    }
    const auto f = ols(lc, losses);
    return {f.slope, f.intercept, f.r2};
}

std::vector<FrontierPoint> pareto_frontier(std::span<const RunRecord> runs, double bin_width_log10) {
    if (runs.empty()) throw std::invalid_argument("pareto_frontier: no runs");
    if (!(bin_width_log10 > 0.0) || !std::isfinite(bin_width_log10)) {
        throw std::invalid_argument("pareto_frontier: bin width must be > 0");
    }

    std::map<long long, FrontierPoint> best;
    for (const auto& run : runs) {
        if (!run.flops || !(*run.flops > 0.0)) throw std::invalid_argument("pareto_frontier: run without flops: " + run.run_id);
        const long long bucket = static_cast<long long>(std::floor(std::log10(*run.flops) / bin_width_log10));
        FrontierPoint p;
        p.flops_bucket_log10 = static_cast<double>(bucket) * bin_width_log10;
        p.run = run;
        p.n_nv = run.effective_n_nv();
        p.n_v = run.effective_n_v();
        p.d_tokens = run.effective_d_tokens();
        p.loss = run.normalized_loss;

        auto it = best.find(bucket);
        if (it == best.end()) {
            best.emplace(bucket, std::move(p));
            continue;
        }
        const auto& cur = it->second;
        if (std::tie(p.loss, p.n_nv, p.n_v, p.run.run_id) < std::tie(cur.loss, cur.n_nv, cur.n_v, cur.run.run_id)) {
            it->second = std::move(p);
        }
    }

    std::vector<FrontierPoint> out;
    out.reserve(best.size());
    for (auto& [bucket, p] : best) out.push_back(std::move(p));
    return out;
}

ScalingFits fit_all(std::span<const FrontierPoint> frontier) {
    if (frontier.size() < 2) throw std::invalid_argument("fit_all: need at least 2 frontier points");
    std::vector<double> c, nv, nnv, d, loss;
    for (const auto& p : frontier) {
        c.push_back(*p.run.flops);
        nv.push_back(p.n_v);
        nnv.push_back(p.n_nv);
        d.push_back(p.d_tokens);
        loss.push_back(p.loss);
    }
    ScalingFits f;
    f.nv_vs_c = fit_power_law(c, nv);
    f.nnv_vs_c = fit_power_law(c, nnv);
    f.d_vs_c = fit_power_law(c, d);
    f.nv_vs_nnv = fit_power_law(nnv, nv);
    f.loss_vs_c = fit_log_law(c, loss);
    return f;
}

namespace {

ordered_json r2_json(const std::optional<double>& r2) {
    return r2 ? ordered_json(*r2) : ordered_json(nullptr);
}

double finite_number(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) throw std::invalid_argument(std::string("fits: missing number ") + key);
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("fits: non-finite ") + key);
    return v;
}

std::optional<double> optional_r2(const nlohmann::json& obj) {
    auto it = obj.find("r2");
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return finite_number(obj, "r2");
}

const nlohmann::json& member(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_object()) throw std::invalid_argument(std::string("fits: missing object ") + key);
    return *it;
}

PowerLawFit power_from_json(const nlohmann::json& j) {
    return {finite_number(j, "log10_coef"), finite_number(j, "exponent"), optional_r2(j)};
}

}  // namespace

ordered_json to_json(const PowerLawFit& fit) {
    ordered_json j;
    j["log10_coef"] = fit.log10_coef;
    j["exponent"] = fit.exponent;
    j["r2"] = r2_json(fit.r2);
    return j;
}

ordered_json to_json(const LogLawFit& fit) {
    ordered_json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = r2_json(fit.r2);
    return j;
}

ordered_json to_json(const ScalingFits& fits) {
    ordered_json j;
    j["nv_vs_c"] = to_json(fits.nv_vs_c);
    j["nnv_vs_c"] = to_json(fits.nnv_vs_c);
    j["d_vs_c"] = to_json(fits.d_vs_c);
    j["nv_vs_nnv"] = to_json(fits.nv_vs_nnv);
    j["loss_vs_c"] = to_json(fits.loss_vs_c);
    return j;
}

ordered_json to_json(const FrontierPoint& p) {
    ordered_json j;
    j["flops_bucket_log10"] = p.flops_bucket_log10;
    j["run_id"] = p.run.run_id;
    j["flops"] = *p.run.flops;
    j["n_nv"] = p.n_nv;
    j["n_v"] = p.n_v;
    j["d_tokens"] = p.d_tokens;
    j["loss"] = p.loss;
    return j;
}

ScalingFits scaling_fits_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("fits: document is not an object");
    ScalingFits f;
    f.nv_vs_c = power_from_json(member(doc, "nv_vs_c"));
    f.nnv_vs_c = power_from_json(member(doc, "nnv_vs_c"));
    f.d_vs_c = power_from_json(member(doc, "d_vs_c"));
    f.nv_vs_nnv = power_from_json(member(doc, "nv_vs_nnv"));
    const auto& loss = member(doc, "loss_vs_c");
    f.loss_vs_c = {finite_number(loss, "slope"), finite_number(loss, "intercept"), optional_r2(loss)};
    return f;
}

}  // namespace scamo
