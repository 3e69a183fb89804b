#include "scamo/core.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "scamo/flops.hpp"
#include "scamo/json_text.hpp"

namespace scamo {

void ModelConfig::validate() const {
    if (n_layers < 1 || n_heads < 1 || d_model < 1 || n_ctx < 1 || n_vocab < 1) {
        throw std::invalid_argument("model config fields must be positive");
    }
    if (ff_ratio < 1) throw std::invalid_argument("ff_ratio must be >= 1");
    if (d_model % n_heads != 0) throw std::invalid_argument("d_model not divisible by n_heads");
}

ModelConfig RunRecord::model_config() const {
    return ModelConfig{n_layers, n_heads, d_model, n_ctx, vocab_size, 4};
}

double RunRecord::effective_n_nv() const {
    if (n_nv) return *n_nv;
    return static_cast<double>(params_non_embedding(model_config()));
}

double RunRecord::effective_n_v() const {
    if (n_v) return *n_v;
    return static_cast<double>(params_vocab(static_cast<std::uint64_t>(vocab_size),
                                            static_cast<std::uint64_t>(d_model)));
}

double RunRecord::effective_d_tokens() const {
    if (d_tokens) return *d_tokens;
    return static_cast<double>(tokens_trained);
}

void RunRecord::validate() const {
    model_config().validate();
    if (tokens_trained < 1) throw std::invalid_argument("tokens_trained must be >= 1");
    if (flops && !(std::isfinite(*flops) && *flops > 0.0)) throw std::invalid_argument("flops must be > 0");
    if (!std::isfinite(normalized_loss)) throw std::invalid_argument("normalized_loss must be finite");
    for (const auto* opt : {&n_nv, &n_v, &d_tokens}) {
        if (*opt && !(std::isfinite(**opt) && **opt > 0.0)) {
            throw std::invalid_argument("parameter/token overrides must be finite and > 0");
        }
    }
}

CodeUsageHistogram::CodeUsageHistogram(std::size_t codebook_size) : counts_(codebook_size, 0) {
    if (codebook_size == 0) throw std::invalid_argument("histogram needs at least one code");
}

CodeUsageHistogram::CodeUsageHistogram(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("histogram needs at least one code");
    for (auto c : counts_) total_ += c;
}

void CodeUsageHistogram::observe(std::size_t code, std::uint64_t n) {
    if (code >= counts_.size()) throw std::out_of_range("code outside histogram");
    counts_[code] += n;
    total_ += n;
}

CodebookMetrics codebook_metrics(const CodeUsageHistogram& h) {
    if (h.total() == 0) throw std::invalid_argument("no observations");
    const double total = static_cast<double>(h.total());
    std::size_t used = 0;
    double entropy = 0.0;
    for (auto c : h.counts()) {
        if (c == 0) continue;
        ++used;
        const double p = static_cast<double>(c) / total;
        entropy -= p * std::log(p);
    }
    // Rounding can push a single-code distribution a hair below zero.
    entropy = std::max(entropy, 0.0);
    CodebookMetrics m;
    m.utilization = static_cast<double>(used) / static_cast<double>(h.size());
    m.shannon_entropy_nats = entropy;
    m.exp_entropy = std::exp(entropy);
    return m;
}

namespace {

std::string join_issues(const std::vector<RunLogIssue>& issues) {
    std::ostringstream s;
    s << "invalid run log:";
    for (const auto& i : issues) s << "\n  line " << i.line << ": " << i.message;
    return s.str();
}

std::int64_t positive_int(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::invalid_argument(std::string("missing field ") + key);
    if (it->is_number_integer()) {
        auto v = it->get<std::int64_t>();
        if (v < 1) throw std::invalid_argument(std::string(key) + " must be a positive integer");
        return v;
    }
    if (it->is_number_float()) {
        double d = it->get<double>();
        if (std::isfinite(d) && d >= 1.0 && d == std::floor(d) && d < 9.2e18) return static_cast<std::int64_t>(d);
    }
    throw std::invalid_argument(std::string(key) + " must be a positive integer");
}

double real(const nlohmann::json& v, const char* key) {
    if (!v.is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
    return v.get<double>();
}

std::optional<double> optional_real(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return real(*it, key);
}

RunRecord parse_record(const nlohmann::json& obj) {
    if (!obj.is_object()) throw std::invalid_argument("line is not a JSON object");
    RunRecord r;
    auto id = obj.find("run_id");
    if (id == obj.end() || !id->is_string()) throw std::invalid_argument("missing field run_id");
    r.run_id = id->get<std::string>();
    r.n_layers = positive_int(obj, "n_layers");
    r.n_heads = positive_int(obj, "n_heads");
    r.d_model = positive_int(obj, "d_model");
    r.n_ctx = positive_int(obj, "n_ctx");
    r.vocab_size = positive_int(obj, "vocab_size");
    r.tokens_trained = positive_int(obj, "tokens_trained");
    r.flops = optional_real(obj, "flops");
    auto loss = obj.find("normalized_loss");
    if (loss == obj.end()) throw std::invalid_argument("missing field normalized_loss");
    r.normalized_loss = real(*loss, "normalized_loss");
    r.n_nv = optional_real(obj, "n_nv");
    r.n_v = optional_real(obj, "n_v");
    r.d_tokens = optional_real(obj, "d_tokens");
    r.validate();
    if (!r.flops) r.flops = flops_approx(r.effective_n_nv(), r.effective_n_v(), r.effective_d_tokens());
    return r;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

RunLogError::RunLogError(std::vector<RunLogIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<RunRecord> load_runs(std::istream& in) {
    std::vector<RunRecord> runs;
    std::vector<RunLogIssue> issues;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            runs.push_back(parse_record(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error&) {
            issues.push_back({line_no, "unparseable JSON"});
        } catch (const std::exception& e) {
            issues.push_back({line_no, e.what()});
        }
    }
    if (!issues.empty()) throw RunLogError(std::move(issues));
    return runs;
}

void write_runs(std::ostream& out, std::span<const RunRecord> runs) {
    for (const auto& r : runs) {
        ordered_json j;
        j["run_id"] = r.run_id;
        j["n_layers"] = r.n_layers;
        j["n_heads"] = r.n_heads;
        j["d_model"] = r.d_model;
        j["n_ctx"] = r.n_ctx;
        j["vocab_size"] = r.vocab_size;
        j["tokens_trained"] = r.tokens_trained;
        if (r.flops) j["flops"] = *r.flops;
        j["normalized_loss"] = r.normalized_loss;
        if (r.n_nv) j["n_nv"] = *r.n_nv;
        if (r.n_v) j["n_v"] = *r.n_v;
        if (r.d_tokens) j["d_tokens"] = *r.d_tokens;
        out << format_json(j) << '\n';
    }
}

}  // namespace scamo
