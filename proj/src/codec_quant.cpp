#include "ttok/codec_quant.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "ttok/error.hpp"
#include "ttok/kernels.hpp"

namespace ttok {

namespace {

std::vector<double> transform_all(std::span<const double> values, const ScaleKind& s) {
    std::vector<double> u(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) u[i] = transform(values[i], s);
    return u;
}

// Parses the digits of `lit` in [first, last); -1 when anything else is there.
long long parse_digits(std::string_view lit, std::size_t first, std::size_t last) {
    if (first >= last || last > lit.size()) return -1;
    long long v = 0;
    auto res = std::from_chars(lit.data() + first, lit.data() + last, v);
    if (res.ec != std::errc{} || res.ptr != lit.data() + last || lit[first] == '-' || lit[first] == '+')
        return -1;
    return v;
}

}  // namespace

BinSpec bin_fit(std::span<const double> values, const ScaleKind& scale, std::size_t k) {
    if (values.empty()) throw Error(ErrorKind::domain, "scale bin fit needs at least one value");
    if (k == 0) throw Error(ErrorKind::invalid_parameter, "scale bin fit needs k >= 1");
    const std::vector<double> u = transform_all(values, scale);
    const MinMax range = widen_degenerate(fit_minmax(u));
    return BinSpec{scale, k, range.min, range.max};
}

std::uint32_t bin_encode(double v, const BinSpec& spec) {
    return kernels::bin_index(transform(v, spec.scale), spec.lo, spec.width(), spec.k);
}

std::vector<std::uint32_t> bin_encode_all(std::span<const double> values, const BinSpec& spec,
                                          int threads) {
    const std::vector<double> u = transform_all(values, spec.scale);
    return kernels::bin_indices(u, spec.lo, spec.width(), spec.k, threads);
}

Clamped bin_decode_flagged(std::uint32_t index, const BinSpec& spec) {
    if (index >= spec.k)
        throw Error(ErrorKind::range, fmt::format("bin index {} outside [0, {})", index, spec.k));
    double c = spec.center(index);
    Clamped out = inverse_transform_flagged(c, spec.scale);
    // The end bins reach exactly lo / hi, which sit w/2 from the centre in real
    // arithmetic. Rounding in the centre and in the scale round trip can push
    // the reconstruction an ulp or two past that; nudge the centre back in.
    const double half = spec.width() / 2;
    for (int step = 0; step < 16 && !out.clamped; ++step) {
        const double u = transform(out.value, spec.scale);
        if (index == 0 && u - spec.lo > half)
            c = std::nextafter(c, -INFINITY);
        else if (index + 1 == spec.k && spec.hi - u > half)
            c = std::nextafter(c, INFINITY);
        else
            break;
        out = inverse_transform_flagged(c, spec.scale);
    }
    return out;
}

std::string bin_token(std::uint32_t index) { return fmt::format("<|bin_{:03}|>", index); }

std::uint32_t parse_bin_token(std::string_view lit) {
    constexpr std::string_view prefix = "<|bin_";
    if (!lit.starts_with(prefix) || !lit.ends_with("|>") || lit.size() < prefix.size() + 3 + 2)
        throw Error(ErrorKind::malformed_token, fmt::format("'{}' is not a bin token", lit));
    const long long v = parse_digits(lit, prefix.size(), lit.size() - 2);
    if (v < 0 || v > 0xFFFFFFFFLL)
        throw Error(ErrorKind::malformed_token, fmt::format("'{}' is not a bin token", lit));
    return static_cast<std::uint32_t>(v);
}

Codebook kmeans1d_fit(std::span<const double> values, std::size_t k, std::size_t level,
                      const KMeansOptions& opts, bool* k_reduced) {
    KMeansResult res = kmeans1d(values, k, opts);
    if (k_reduced) *k_reduced = res.k_reduced;
    return Codebook{level, std::move(res.centroids)};
}

std::size_t RsqSpec::total_codes() const {
    std::size_t n = 0;
    for (const auto& cb : levels) n += cb.centroids.size();
    return n;
}

RsqSpec rsq_fit(std::span<const double> values, const ScaleKind& scale,
                std::span<const std::size_t> ks, const KMeansOptions& opts, RsqFitReport* report) {
    if (values.empty()) throw Error(ErrorKind::domain, "RSQ fit needs at least one value");
    if (ks.empty()) throw Error(ErrorKind::invalid_parameter, "RSQ fit needs at least one level");
    for (std::size_t k : ks)
        if (k == 0) throw Error(ErrorKind::invalid_parameter, "RSQ level sizes must be >= 1");

    RsqSpec spec{scale, {}};
    RsqFitReport local;
    std::vector<double> residual = transform_all(values, scale);
    for (std::size_t level = 0; level < ks.size(); ++level) {
        bool reduced = false;
        Codebook cb = kmeans1d_fit(residual, ks[level], level, opts, &reduced);
        const auto codes = kernels::nearest_centroids(residual, cb.centroids, opts.threads);
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= cb.centroids[codes[i]];
        const double mse =
            kernels::ordered_sum_of_squares(residual) / static_cast<double>(residual.size());
        if (!local.level_mse.empty() && mse > local.level_mse.back())
            throw std::logic_error(fmt::format("RSQ training MSE increased at level {}: {} > {}", level,
                                               mse, local.level_mse.back()));
        local.level_mse.push_back(mse);
        local.k_reduced.push_back(reduced);
        spec.levels.push_back(std::move(cb));
    }
    if (report) *report = std::move(local);
    return spec;
}

std::vector<std::uint32_t> rsq_encode(double v, const RsqSpec& spec) {
    double r = transform(v, spec.scale);
    std::vector<std::uint32_t> codes;
    codes.reserve(spec.levels.size());
    for (const auto& cb : spec.levels) {
        const std::uint32_t q = kernels::nearest_centroid(r, cb.centroids);
        codes.push_back(q);
        r -= cb.centroids[q];
    }
    return codes;
}

Clamped rsq_decode_flagged(std::span<const std::uint32_t> codes, const RsqSpec& spec) {
    if (codes.size() != spec.levels.size())
        throw Error(ErrorKind::arity, fmt::format("RSQ spec has {} levels, got {} codes",
                                                  spec.levels.size(), codes.size()));
    double u = 0.0;
    for (std::size_t l = 0; l < codes.size(); ++l) {
        const auto& c = spec.levels[l].centroids;
        if (codes[l] >= c.size())
            throw Error(ErrorKind::range,
                        fmt::format("level {} code {} outside [0, {})", l, codes[l], c.size()));
        u += c[codes[l]];
    }
    return inverse_transform_flagged(u, spec.scale);
}

std::string rsq_token(std::size_t level, std::uint32_t index) {
    return fmt::format("<|L{}_{:03}|>", level, index);
}

std::vector<std::string> rsq_tokens(std::span<const std::uint32_t> codes) {
    std::vector<std::string> out;
    out.reserve(codes.size());
    for (std::size_t l = 0; l < codes.size(); ++l) out.push_back(rsq_token(l, codes[l]));
    return out;
}

std::vector<std::uint32_t> parse_rsq_tokens(std::span<const std::string> tokens, const RsqSpec& spec) {
    if (tokens.size() != spec.levels.size())
        throw Error(ErrorKind::arity, fmt::format("RSQ spec has {} levels, got {} tokens",
                                                  spec.levels.size(), tokens.size()));
    std::vector<std::uint32_t> codes;
    codes.reserve(tokens.size());
    for (std::size_t l = 0; l < tokens.size(); ++l) {
        std::string_view lit = tokens[l];
        const std::size_t underscore = lit.find('_');
        if (!lit.starts_with("<|L") || !lit.ends_with("|>") || underscore == std::string_view::npos)
            throw Error(ErrorKind::malformed_token, fmt::format("'{}' is not an RSQ token", lit));
        const long long level = parse_digits(lit, 3, underscore);
        const long long index = parse_digits(lit, underscore + 1, lit.size() - 2);
        if (level < 0 || index < 0 || lit.size() - 2 - (underscore + 1) < 3)
            throw Error(ErrorKind::malformed_token, fmt::format("'{}' is not an RSQ token", lit));
        if (static_cast<std::size_t>(level) != l)
            throw Error(ErrorKind::level_order,
                        fmt::format("token {} is '{}' but level L{} was expected", l, lit, l));
        if (static_cast<std::size_t>(index) >= spec.levels[l].centroids.size())
            throw Error(ErrorKind::range, fmt::format("'{}' indexes past the level-{} codebook ({} codes)",
                                                      lit, l, spec.levels[l].centroids.size()));
        codes.push_back(static_cast<std::uint32_t>(index));
    }
    return codes;
}

std::vector<std::vector<std::size_t>> rsq_level_presets() {
    return {{256}, {128, 128}, {85, 85, 86}, {64, 64, 64, 64}};
}

}  // namespace ttok
