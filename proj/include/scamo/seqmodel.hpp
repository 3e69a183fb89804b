#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace scamo {

/// Attention pattern for a text prefix followed by motion tokens.
/// Text attends text bidirectionally, motion attends all text plus earlier
/// motion, text never attends motion.
class PrefixMask {
public:
    PrefixMask(std::size_t t_text, std::size_t t_motion);

    std::size_t t_text() const { return t_text_; }
    std::size_t t_motion() const { return t_motion_; }
    std::size_t size() const { return t_text_ + t_motion_; }

    bool allowed(std::size_t i, std::size_t j) const { return allowed_[i * size() + j] != 0; }

private:
    std::size_t t_text_;
    std::size_t t_motion_;
    std::vector<std::uint8_t> allowed_;  // row-major, size() x size()
};

/// Throws std::invalid_argument("empty sequence") when both counts are zero.
PrefixMask build_prefix_mask(std::size_t t_text, std::size_t t_motion);

struct TokenProbRecord {
    double model_logp = 0.0;     // ln p(m_t | m_<t, S, V)
    double baseline_logp = 0.0;  // ln p(m_t | S, V)
};

struct CeLoss {
    double sum_nats = 0.0;
    double mean_nats = 0.0;
};

CeLoss ce_loss(std::span<const TokenProbRecord> records);

/// -(1/T) sum_t (model_logp - baseline_logp).
double normalized_loss(std::span<const TokenProbRecord> records);

/// -(1/T) sum_t baseline_logp.
double baseline_ce_mean(std::span<const TokenProbRecord> records);

/// Add-lambda smoothed unigram log-probabilities:
/// ln((count_k + lambda) / (sum counts + lambda V)).
std::vector<double> unigram_baseline(std::span<const std::uint64_t> token_counts,
                                     double smoothing_lambda);

}  // namespace scamo
