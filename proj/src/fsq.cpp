#include "scamo/fsq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace scamo {

std::uint64_t codebook_size(std::span<const int> levels) {
    std::uint64_t size = 1;
    for (int l : levels) {
        if (l < 2) throw std::invalid_argument("FSQ levels must be >= 2");
        if (__builtin_mul_overflow(size, static_cast<std::uint64_t>(l), &size)) {
            throw std::overflow_error("FSQ codebook size overflows uint64");
        }
    }
    return size;
}

FsqLevels::FsqLevels(std::vector<int> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw std::invalid_argument("FSQ needs at least one channel");
    size_ = scamo::codebook_size(levels_);
}

std::span<const FsqPreset> fsq_presets() {
    static const std::vector<FsqPreset> presets = {
        {"2^4", {5, 3}},
        {"2^6", {8, 8}},
        {"2^8", {8, 6, 5}},
        {"2^9", {8, 8, 8}},
        {"2^10", {8, 5, 5, 5}},
        {"2^11", {8, 8, 6, 5}},
        {"2^12", {7, 5, 5, 5, 5}},
        {"2^14", {8, 8, 8, 6, 5}},
        {"2^16", {8, 8, 8, 5, 5, 5}},
    };
    return presets;
}

FsqLevels parse_fsq_levels(std::string_view text) {
    for (const auto& p : fsq_presets()) {
        if (p.name == text) return FsqLevels(p.levels);
    }
    std::vector<int> levels;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view item = text.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        int value = 0;
        auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
            throw std::invalid_argument("unknown FSQ preset or malformed level list: " + std::string(text));
        }
        levels.push_back(value);
        pos = comma + 1;
    }
    return FsqLevels(std::move(levels));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

namespace {

void check_latent(std::span<const double> z, const FsqLevels& levels) {
    if (z.size() != levels.dim()) throw std::invalid_argument("latent length does not match FSQ levels");
    for (double v : z) {
        if (!std::isfinite(v)) throw std::invalid_argument("NaN or infinite value in FSQ input");
    }
}

void check_code(const FsqCode& code, const FsqLevels& levels) {
    if (code.q.size() != levels.dim()) throw std::invalid_argument("code length does not match FSQ levels");
    for (std::size_t i = 0; i < code.q.size(); ++i) {
        if (code.q[i] < 1 || code.q[i] > levels[i]) throw std::out_of_range("FSQ code channel out of range");
    }
}

}  // namespace

FsqCode fsq_quantize(std::span<const double> z, const FsqLevels& levels) {
    check_latent(z, levels);
    FsqCode code;
    code.q.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        // std::round is half-away-from-zero; the argument is never negative here.
        const double scaled = sigmoid(z[i]) * static_cast<double>(levels[i] - 1);
        code.q[i] = 1 + static_cast<int>(std::round(scaled));
    }
    return code;
}

std::vector<double> fsq_dequantize(const FsqCode& code, const FsqLevels& levels) {
    check_code(code, levels);
    std::vector<double> v(code.q.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(code.q[i] - 1) / static_cast<double>(levels[i] - 1);
    }
    return v;
}

std::vector<double> fsq_code_latent(const FsqCode& code, const FsqLevels& levels) {
    constexpr double kEdge = 1e-12;
    auto v = fsq_dequantize(code, levels);
    for (double& x : v) x = logit(std::clamp(x, kEdge, 1.0 - kEdge));
    return v;
}

std::uint64_t fsq_encode_index(const FsqCode& code, const FsqLevels& levels) {
    check_code(code, levels);
    std::uint64_t index = 0;
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < code.q.size(); ++i) {
        index += static_cast<std::uint64_t>(code.q[i] - 1) * stride;
        stride *= static_cast<std::uint64_t>(levels[i]);
    }
    return index;
}

FsqCode fsq_decode_index(std::uint64_t index, const FsqLevels& levels) {
    if (index >= levels.codebook_size()) throw std::out_of_range("FSQ index out of range");
    FsqCode code;
    code.q.resize(levels.dim());
    for (std::size_t i = 0; i < levels.dim(); ++i) {
        const auto l = static_cast<std::uint64_t>(levels[i]);
        code.q[i] = 1 + static_cast<int>(index % l);
        index /= l;
    }
    return code;
}

FsqSteResult fsq_ste_forward(std::span<const double> z, const FsqLevels& levels) {
    FsqSteResult r;
    r.value = fsq_dequantize(fsq_quantize(z, levels), levels);
    r.surrogate_jacobian_diag.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = sigmoid(z[i]);
        r.surrogate_jacobian_diag[i] = s * (1.0 - s);
    }
    return r;
}

}  // namespace scamo
