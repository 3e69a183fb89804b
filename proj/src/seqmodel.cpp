#include "scamo/seqmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace scamo {

PrefixMask::PrefixMask(std::size_t t_text, std::size_t t_motion)
    : t_text_(t_text), t_motion_(t_motion) {
    if (t_text + t_motion == 0) throw std::invalid_argument("empty sequence");
    const std::size_t n = size();
    allowed_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            bool ok = false;
            if (j < t_text) {
                ok = true;  // everyone sees the prefix
            } else if (i >= t_text) {
                ok = j <= i;  // motion is causal among motion
            }
            allowed_[i * n + j] = ok ? 1 : 0;
        }
    }
}

PrefixMask build_prefix_mask(std::size_t t_text, std::size_t t_motion) {
    return PrefixMask(t_text, t_motion);
}

namespace {

void check_records(std::span<const TokenProbRecord> records) {
    if (records.empty()) throw std::invalid_argument("no token records");
    for (const auto& r : records) {
        if (!std::isfinite(r.model_logp) || !std::isfinite(r.baseline_logp) || r.model_logp > 0.0 ||
            r.baseline_logp > 0.0) {
            throw std::invalid_argument("token log-probabilities must be finite and <= 0");
        }
    }
}

}  // namespace

CeLoss ce_loss(std::span<const TokenProbRecord> records) {
    check_records(records);
    double sum = 0.0;
    for (const auto& r : records) sum -= r.model_logp;
    return {sum, sum / static_cast<double>(records.size())};
}

double normalized_loss(std::span<const TokenProbRecord> records) {
    check_records(records);
    double sum = 0.0;
    for (const auto& r : records) sum += r.baseline_logp - r.model_logp;
    return sum / static_cast<double>(records.size());
}

double baseline_ce_mean(std::span<const TokenProbRecord> records) {
    check_records(records);
    double sum = 0.0;
    for (const auto& r : records) sum -= r.baseline_logp;
    return sum / static_cast<double>(records.size());
}

std::vector<double> unigram_baseline(std::span<const std::uint64_t> token_counts, double smoothing_lambda) {
    if (token_counts.empty()) throw std::invalid_argument("empty vocabulary");
    if (!(smoothing_lambda >= 0.0) || !std::isfinite(smoothing_lambda)) {
        throw std::invalid_argument("smoothing_lambda must be finite and >= 0");
    }
    double total = 0.0;
    for (auto c : token_counts) total += static_cast<double>(c);
    const double denom = total + smoothing_lambda * static_cast<double>(token_counts.size());
    if (!(denom > 0.0)) throw std::invalid_argument("all-zero counts need smoothing_lambda > 0");
    std::vector<double> logp(token_counts.size());
    for (std::size_t k = 0; k < logp.size(); ++k) {
        logp[k] = std::log((static_cast<double>(token_counts[k]) + smoothing_lambda) / denom);
    }
    return logp;
}

}  // namespace scamo
