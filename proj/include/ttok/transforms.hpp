#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ttok {

enum class Scale { linear, log10 };

/// Target space for quantizers: identity, or log10(v + epsilon).
struct ScaleKind {
    Scale kind = Scale::linear;
    double epsilon = 1e-6;

    static ScaleKind linear() { return {Scale::linear, 1e-6}; }
    static ScaleKind log10(double epsilon = 1e-6);

    std::string_view name() const { return kind == Scale::linear ? "linear" : "log"; }
    static std::optional<ScaleKind> parse(std::string_view text, double epsilon = 1e-6);

    friend bool operator==(const ScaleKind&, const ScaleKind&) = default;
};

/// Throws Error(domain) for negative or non-finite v.
double transform(double v, const ScaleKind& s);

struct Clamped {
    double value = 0.0;
    bool clamped = false;
};

/// Inverse of transform; results below zero clamp to 0 and set the flag.
Clamped inverse_transform_flagged(double u, const ScaleKind& s);

inline double inverse_transform(double u, const ScaleKind& s) {
    return inverse_transform_flagged(u, s).value;
}

struct MinMax {
    double min = 0.0;
    double max = 0.0;
    bool degenerate = false;
};

MinMax fit_minmax(std::span<const double> values);

/// [min - 0.5, max + 0.5] when degenerate, the range itself otherwise.
MinMax widen_degenerate(MinMax range);

struct Histogram {
    std::vector<double> edges;  // transformed space, size bins + 1
    std::vector<std::uint64_t> counts;
    ScaleKind scale;

    std::uint64_t total() const;
};

/// Uniform bins over the transformed range of `values`; the last bin
/// includes its right edge.
Histogram histogram(std::span<const double> values, std::size_t bins, const ScaleKind& s);

/// `bin_lo,bin_hi,count` rows with a header line.
std::string histogram_csv(const Histogram& h);

}  // namespace ttok
