#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttok/core.hpp"
#include "ttok/tokenizer.hpp"
#include "ttok/transforms.hpp"

namespace ttok {

struct TokensPerValue {
    double value = 0.0;
    bool estimate = false;  // numeric strings depend on the host tokenizer
};

TokensPerValue tokens_per_value(const TokenizerSpec& spec);

/// Codec floor: sqrt(mean((decode(encode(v)) - v)^2)), reported in dataset
/// units. Values are epoch seconds for cal_abs and dataset units otherwise.
double reconstruction_rmse(const TokenizerSpec& spec, std::span<const double> values, int threads = 0);

enum class SyntheticShape { lognormal, spiky, mixed, uniform };

std::string_view to_string(SyntheticShape s);
std::optional<SyntheticShape> parse_synthetic_shape(std::string_view text);

/// Presets: lognormal stands in for smooth skewed data, spiky for intervals
/// concentrated on a few atoms, mixed for a blend of the two.
struct SyntheticConfig {
    SyntheticShape shape = SyntheticShape::lognormal;
    std::size_t n_sequences = 100;
    std::size_t seq_len = 50;
    std::uint64_t seed = 1;
    TimeUnit unit{TimeUnitKind::hour};

    double log_mean = 0.0;  // of the underlying normal
    double log_sd = 1.0;

    std::vector<double> atoms{1.0, 2.0, 4.0};
    std::vector<double> atom_weights{0.6, 0.3, 0.1};
    double jitter = 0.01;  // half-width of uniform noise around an atom

    double lognormal_weight = 0.5;  // mixed: probability of a lognormal draw

    double uniform_lo = 1.0;
    double uniform_hi = 2.0;

    std::int64_t start_epoch = 1640995200;  // 2022-01-01T00:00:00Z

    /// Throws Error(invalid_parameter).
    void validate() const;
};

/// Deterministic in the seed. Splits are 80/10/10 by sequence.
Dataset gen_synthetic(const SyntheticConfig& cfg);

struct BenchRow {
    std::string strategy;
    std::string scale;
    std::string levels_or_bins;
    TokensPerValue tokens;
    std::size_t vocab_added = 0;
    double reconstruction_rmse = 0.0;
};

struct BenchReport {
    std::string dataset;
    std::string split;
    std::vector<BenchRow> rows;
};

BenchRow describe(const TokenizerSpec& spec);

/// Evaluates every spec on the test split. Throws Error(unit_mismatch) when a
/// spec was fitted for another unit.
BenchReport compare(std::span<const TokenizerSpec> specs, const Dataset& d, int threads = 0);

/// `strategy,scale,levels_or_bins,tokens_per_value,vocab_added,reconstruction_rmse`.
std::string report_csv(const BenchReport& r);
std::string report_table(const BenchReport& r);

/// Histograms (linear, log) of every inter-event interval; first events are
/// structural zeros and are skipped.
std::pair<Histogram, Histogram> analyze(const Dataset& d, std::size_t bins);

/// The twelve tokenizer configurations of the main comparison.
std::vector<FitOptions> comparison_presets();

}  // namespace ttok
