#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttok/kmeans1d.hpp"
#include "ttok/transforms.hpp"

namespace ttok {

// ---------------------------------------------------------------------------
// Uniform scale binning
// ---------------------------------------------------------------------------

/// K uniform bins over [lo, hi] in transformed space; a token decodes to the
/// centre of its bin.
struct BinSpec {
    ScaleKind scale;
    std::size_t k = 0;  // 0 until fitted
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return (hi - lo) / static_cast<double>(k); }
    // Measured from the nearer end so the upper bins do not inherit rounding from lo.
    double center(std::size_t j) const {
        const double d = static_cast<double>(j) + 0.5;
        return 2 * j < k ? lo + d * width() : hi - (static_cast<double>(k) - d) * width();
    }
};

BinSpec bin_fit(std::span<const double> values, const ScaleKind& scale, std::size_t k);

/// Values outside the fitted range clamp to the edge bins.
std::uint32_t bin_encode(double v, const BinSpec& spec);
std::vector<std::uint32_t> bin_encode_all(std::span<const double> values, const BinSpec& spec,
                                          int threads = 0);

Clamped bin_decode_flagged(std::uint32_t index, const BinSpec& spec);
inline double bin_decode(std::uint32_t index, const BinSpec& spec) {
    return bin_decode_flagged(index, spec).value;
}

/// `<|bin_JJJ|>`, at least three digits.
std::string bin_token(std::uint32_t index);
std::uint32_t parse_bin_token(std::string_view literal);

// ---------------------------------------------------------------------------
// Residual scalar quantization
// ---------------------------------------------------------------------------

struct Codebook {
    std::size_t level = 0;
    std::vector<double> centroids;  // strictly ascending
};

/// 1-D k-means codebook for one level. k is reduced to the number of
/// distinct values when it exceeds it (reported through `k_reduced`).
Codebook kmeans1d_fit(std::span<const double> values, std::size_t k, std::size_t level = 0,
                      const KMeansOptions& opts = {}, bool* k_reduced = nullptr);

struct RsqSpec {
    ScaleKind scale;
    std::vector<Codebook> levels;

    std::size_t n_levels() const { return levels.size(); }
    std::size_t total_codes() const;
};

struct RsqFitReport {
    /// Mean squared residual on the training data after each level.
    std::vector<double> level_mse;
    std::vector<bool> k_reduced;
};

/// Level 0 quantizes the transformed values, each later level the previous
/// level's residuals. Training MSE is checked to be non-increasing.
RsqSpec rsq_fit(std::span<const double> values, const ScaleKind& scale,
                std::span<const std::size_t> ks, const KMeansOptions& opts = {},
                RsqFitReport* report = nullptr);

/// One code per level; nearest centroid with ties to the lower index.
std::vector<std::uint32_t> rsq_encode(double v, const RsqSpec& spec);

/// Inverse transform of the summed centroids, clamped at 0.
Clamped rsq_decode_flagged(std::span<const std::uint32_t> codes, const RsqSpec& spec);
inline double rsq_decode(std::span<const std::uint32_t> codes, const RsqSpec& spec) {
    return rsq_decode_flagged(codes, spec).value;
}

/// `<|L{level}_{index:03}|>`.
std::string rsq_token(std::size_t level, std::uint32_t index);
std::vector<std::string> rsq_tokens(std::span<const std::uint32_t> codes);

/// Parses a full code tuple. Throws Error(arity) on a wrong token count and
/// Error(level_order) unless levels appear as L0, L1, ... in order.
std::vector<std::uint32_t> parse_rsq_tokens(std::span<const std::string> tokens, const RsqSpec& spec);

/// Standard level budgets, all 256 tokens in total.
std::vector<std::vector<std::size_t>> rsq_level_presets();

}  // namespace ttok
