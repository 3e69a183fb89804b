#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scamo {

/// Per-channel level counts of an FSQ codebook. Every level is >= 2 and the
/// product must fit in uint64.
class FsqLevels {
public:
    explicit FsqLevels(std::vector<int> levels);

    std::span<const int> levels() const { return levels_; }
    std::size_t dim() const { return levels_.size(); }
    int operator[](std::size_t i) const { return levels_[i]; }
    std::uint64_t codebook_size() const { return size_; }

private:
    std::vector<int> levels_;
    std::uint64_t size_ = 1;
};

/// One quantized latent: q[i] in {1, ..., L_i}.
struct FsqCode {
    std::vector<int> q;

    bool operator==(const FsqCode&) const = default;
};

/// Exact product of the levels; throws std::overflow_error past uint64.
std::uint64_t codebook_size(std::span<const int> levels);

struct FsqPreset {
    std::string_view name;  // target size, e.g. "2^10"
    std::vector<int> levels;
};

/// The shipped level tables, one per target codebook size 2^4 .. 2^16.
std::span<const FsqPreset> fsq_presets();

/// Accepts a preset name ("2^10") or a comma-separated level list ("8,5,5,5").
FsqLevels parse_fsq_levels(std::string_view text);

double sigmoid(double x);
double logit(double p);

/// q_i = 1 + round(sigmoid(z_i) (L_i - 1)), ties rounded away from zero.
FsqCode fsq_quantize(std::span<const double> z, const FsqLevels& levels);

/// Normalized level centers (q_i - 1) / (L_i - 1) in [0, 1].
std::vector<double> fsq_dequantize(const FsqCode& code, const FsqLevels& levels);

/// A latent that quantizes to `code`: logit of the level center, with the
/// endpoint centers pulled into the open interval.
std::vector<double> fsq_code_latent(const FsqCode& code, const FsqLevels& levels);

/// Mixed-radix index, least significant channel first.
std::uint64_t fsq_encode_index(const FsqCode& code, const FsqLevels& levels);
FsqCode fsq_decode_index(std::uint64_t index, const FsqLevels& levels);

struct FsqSteResult {
    std::vector<double> value;
    std::vector<double> surrogate_jacobian_diag;
};

/// Forward value of the straight-through quantizer and the diagonal of the
/// Jacobian the backward pass sees, sigmoid'(z_i).
FsqSteResult fsq_ste_forward(std::span<const double> z, const FsqLevels& levels);

}  // namespace scamo
