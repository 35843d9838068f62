#include "ttok/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ttok/error.hpp"
#include "ttok/kernels.hpp"

namespace ttok {

ScaleKind ScaleKind::log10(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw Error(ErrorKind::invalid_parameter, "log10 scale needs epsilon > 0");
    return {Scale::log10, epsilon};
}

std::optional<ScaleKind> ScaleKind::parse(std::string_view text, double epsilon) {
    if (text == "linear") return ScaleKind::linear();
    if (text == "log" || text == "log10") return ScaleKind::log10(epsilon);
    return std::nullopt;
}

double transform(double v, const ScaleKind& s) {
    if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorKind::domain, fmt::format("time value {} must be finite and >= 0", v));
    if (s.kind == Scale::linear) return v;
    return std::log10(v + s.epsilon);
}

Clamped inverse_transform_flagged(double u, const ScaleKind& s) {
    double v = s.kind == Scale::linear ? u : std::pow(10.0, u) - s.epsilon;
    if (v < 0.0) return {0.0, true};
    return {v, false};
}

MinMax fit_minmax(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::domain, "cannot fit a range on empty input");
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!std::isfinite(*lo) || !std::isfinite(*hi))
        throw Error(ErrorKind::domain, "range input contains non-finite values");
    return {*lo, *hi, *lo == *hi};
}

MinMax widen_degenerate(MinMax range) {
    if (!range.degenerate) return range;
    return {range.min - 0.5, range.max + 0.5, false};
}

std::uint64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram histogram(std::span<const double> values, std::size_t bins, const ScaleKind& s) {
    if (values.empty()) throw Error(ErrorKind::domain, "cannot build a histogram of empty input");
    if (bins == 0) throw Error(ErrorKind::invalid_parameter, "histogram needs at least one bin");

    std::vector<double> u(values.size());
    std::transform(values.begin(), values.end(), u.begin(),
                   [&](double v) { return transform(v, s); });
    const MinMax range = widen_degenerate(fit_minmax(u));
    const double width = (range.max - range.min) / static_cast<double>(bins);

    Histogram h;
    h.scale = s;
    h.edges.resize(bins + 1);
    for (std::size_t j = 0; j <= bins; ++j) h.edges[j] = range.min + static_cast<double>(j) * width;
    h.edges.back() = range.max;
    h.counts = kernels::bin_counts(u, range.min, width, bins);
    return h;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (std::size_t j = 0; j < h.counts.size(); ++j)
        out += fmt::format("{},{},{}\n", h.edges[j], h.edges[j + 1], h.counts[j]);
    return out;
}

}  // namespace ttok
