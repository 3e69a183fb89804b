#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scamo {

/// Transformer shape used by the FLOPs and parameter accounting.
struct ModelConfig {
    std::int64_t n_layers = 0;
    std::int64_t n_heads = 0;
    std::int64_t d_model = 0;
    std::int64_t n_ctx = 0;
    std::int64_t n_vocab = 0;
    std::int64_t ff_ratio = 4;

    /// Throws std::invalid_argument when a field is non-positive or
    /// d_model is not a multiple of n_heads.
    void validate() const;

    std::int64_t d_attn() const { return d_model / n_heads; }
    std::int64_t d_ff() const { return d_model * ff_ratio; }
};

/// One training run as logged by a sweep.
///
/// `n_nv`, `n_v` and `d_tokens` are optional exact overrides of the
/// quantities otherwise derived from the shape fields. Producers that know
/// the realized parameter counts (or synthetic generators that must hit a
/// law exactly) set them; everyone else leaves them empty.
struct RunRecord {
    std::string run_id;
    std::int64_t n_layers = 0;
    std::int64_t n_heads = 0;
    std::int64_t d_model = 0;
    std::int64_t n_ctx = 0;
    std::int64_t vocab_size = 0;
    std::int64_t tokens_trained = 0;
    std::optional<double> flops;
    double normalized_loss = 0.0;

    std::optional<double> n_nv;
    std::optional<double> n_v;
    std::optional<double> d_tokens;

    ModelConfig model_config() const;

    /// Non-vocabulary parameters: the override if present, else the
    /// accounting formula applied to the shape.
    double effective_n_nv() const;
    /// Vocabulary parameters: the override if present, else vocab_size * d_model.
    double effective_n_v() const;
    double effective_d_tokens() const;

    void validate() const;
};

/// Per-code selection counts over an evaluation set.
class CodeUsageHistogram {
public:
    explicit CodeUsageHistogram(std::size_t codebook_size);
    explicit CodeUsageHistogram(std::vector<std::uint64_t> counts);

    void observe(std::size_t code, std::uint64_t n = 1);

    std::span<const std::uint64_t> counts() const { return counts_; }
    std::uint64_t total() const { return total_; }
    std::size_t size() const { return counts_.size(); }

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

struct CodebookMetrics {
    double utilization = 0.0;
    double shannon_entropy_nats = 0.0;
    double exp_entropy = 1.0;
};

/// Utilization (fraction of codes seen at least once), Shannon entropy of
/// the empirical code distribution in nats, and its exponential.
CodebookMetrics codebook_metrics(const CodeUsageHistogram& h);

struct RunLogIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

class RunLogError : public std::runtime_error {
public:
    explicit RunLogError(std::vector<RunLogIssue> issues);
    const std::vector<RunLogIssue>& issues() const { return issues_; }

private:
    std::vector<RunLogIssue> issues_;
};

/// Strict JSONL ingestion. Blank lines are skipped; any invalid line makes
/// the whole call throw RunLogError listing every bad line. Missing `flops`
/// is filled with 6 * (N_nv + N_v) * D.
std::vector<RunRecord> load_runs(std::istream& in);

/// Writes records in the canonical key order, one JSON object per line.
void write_runs(std::ostream& out, std::span<const RunRecord> runs);

}  // namespace scamo
