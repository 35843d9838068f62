#include "ttok/bench.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttok/codec_simple.hpp"
#include "ttok/error.hpp"
#include "ttok/kernels.hpp"

namespace ttok {

TokensPerValue tokens_per_value(const TokenizerSpec& spec) {
    if (spec.strategy() == Strategy::numeric) return {static_cast<double>(kNumericTokenEstimate), true};
    return {static_cast<double>(time_arity(spec)), false};
}

double reconstruction_rmse(const TokenizerSpec& spec, std::span<const double> values, int threads) {
    require_fitted(spec);
    if (values.empty()) return 0.0;
    const double spu = spec.unit.seconds_per_unit();
    std::vector<double> err(values.size());
    kernels::parallel_for(values.size(), threads, [&](std::size_t i) {
        const double v = values[i];
        switch (spec.strategy()) {
        case Strategy::cal_abs:
            err[i] = (decode_time(spec, encode_time(spec, v)) - v) / spu;
            break;
        case Strategy::cal_rel:
            err[i] = decode_time(spec, encode_time(spec, v * spu)) / spu - v;
            break;
        default: err[i] = decode_time(spec, encode_time(spec, v)) - v; break;
        }
    });
    return std::sqrt(kernels::ordered_sum_of_squares(err) / static_cast<double>(err.size()));
}

std::string_view to_string(SyntheticShape s) {
    switch (s) {
    case SyntheticShape::lognormal: return "lognormal";
    case SyntheticShape::spiky: return "spiky";
    case SyntheticShape::mixed: return "mixed";
    case SyntheticShape::uniform: return "uniform";
    }
    return "lognormal";
}

std::optional<SyntheticShape> parse_synthetic_shape(std::string_view text) {
    if (text == "lognormal") return SyntheticShape::lognormal;
    if (text == "spiky") return SyntheticShape::spiky;
    if (text == "mixed") return SyntheticShape::mixed;
    if (text == "uniform") return SyntheticShape::uniform;
    return std::nullopt;
}

void SyntheticConfig::validate() const {
    auto bad = [](const std::string& what) { return Error(ErrorKind::invalid_parameter, what); };
    if (n_sequences == 0) throw bad("synthetic data needs at least one sequence");
    if (seq_len == 0) throw bad("synthetic sequences need at least one event");
    if (!(log_sd >= 0.0) || !std::isfinite(log_mean)) throw bad("lognormal needs finite mean and sd >= 0");
    if (atoms.empty() || atoms.size() != atom_weights.size())
        throw bad("spiky needs one weight per atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i] >= 0.0) || !std::isfinite(atoms[i])) throw bad("atoms must be finite and >= 0");
        if (!(atom_weights[i] >= 0.0)) throw bad("atom weights must be >= 0");
        total += atom_weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw bad(fmt::format("atom weights sum to {}, not 1", total));
    if (!(jitter >= 0.0)) throw bad("jitter must be >= 0");
    if (!(lognormal_weight >= 0.0 && lognormal_weight <= 1.0)) throw bad("mixture weight must be in [0, 1]");
    if (!(uniform_lo >= 0.0 && uniform_hi >= uniform_lo && std::isfinite(uniform_hi)))
        throw bad("uniform range must satisfy 0 <= lo <= hi");
}

Dataset gen_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    static const std::vector<std::string> kTypes = {"Guru",    "Good Answer", "Nice Question", "Popular Question",
                                                    "Teacher", "Student",     "Editor",        "Yearling"};
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(cfg.log_mean, cfg.log_sd);
    std::discrete_distribution<std::size_t> atom(cfg.atom_weights.begin(), cfg.atom_weights.end());
    std::uniform_real_distribution<double> jitter(-cfg.jitter, cfg.jitter);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(cfg.uniform_lo, cfg.uniform_hi);
    std::uniform_int_distribution<std::size_t> type(0, kTypes.size() - 1);

    auto lognormal_draw = [&] { return std::exp(normal(rng)); };
    auto spiky_draw = [&] {
        const double a = cfg.atoms[atom(rng)];
        return cfg.jitter > 0.0 ? std::max(0.0, a + jitter(rng)) : a;
    };
    auto draw = [&]() -> double {
        switch (cfg.shape) {
        case SyntheticShape::lognormal: return lognormal_draw();
        case SyntheticShape::spiky: return spiky_draw();
        case SyntheticShape::mixed: return unit01(rng) < cfg.lognormal_weight ? lognormal_draw() : spiky_draw();
        case SyntheticShape::uniform: return uniform(rng);
        }
        return 0.0;
    };

    Dataset d;
    d.name = fmt::format("synthetic-{}-seed{}", to_string(cfg.shape), cfg.seed);
    d.unit = cfg.unit;
    const std::size_t n_val = cfg.n_sequences / 10;
    const std::size_t n_test = cfg.n_sequences / 10;
    const std::size_t n_train = cfg.n_sequences - n_val - n_test;
    const double spu = cfg.unit.seconds_per_unit();

    for (std::size_t s = 0; s < cfg.n_sequences; ++s) {
        EventSequence seq;
        std::int64_t t = cfg.start_epoch + static_cast<std::int64_t>(s) * 3600;
        for (std::size_t i = 0; i < cfg.seq_len; ++i) {
            const double gap = i == 0 ? 0.0 : draw();
            t += static_cast<std::int64_t>(std::llround(gap * spu));
            seq.events.push_back(Event{kTypes[type(rng)], t, gap});
        }
        const Split split = s < n_train ? Split::train : (s < n_train + n_val ? Split::val : Split::test);
        d.split(split).push_back(std::move(seq));
    }
    return d;
}

BenchRow describe(const TokenizerSpec& spec) {
    BenchRow row;
    row.strategy = std::string(to_string(spec.strategy()));
    row.scale = "-";
    row.levels_or_bins = "-";
    std::visit(
        [&row](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NumericParams>) {
                row.levels_or_bins = fmt::format("p{}", p.precision);
            } else if constexpr (std::is_same_v<P, CalAbsParams> || std::is_same_v<P, CalRelParams>) {
                row.levels_or_bins = std::string(p.resolution.name());
            } else if constexpr (std::is_same_v<P, BinSpec>) {
                row.scale = std::string(p.scale.name());
                row.levels_or_bins = std::to_string(p.k);
            } else if constexpr (std::is_same_v<P, RsqSpec>) {
                row.scale = std::string(p.scale.name());
                std::vector<std::string> parts;
                for (const auto& cb : p.levels) parts.push_back(std::to_string(cb.centroids.size()));
                row.levels_or_bins = fmt::format("{}", fmt::join(parts, "-"));
            }
        },
        spec.params);
    row.tokens = tokens_per_value(spec);
    const VocabManifest m = build_manifest(spec);
    row.vocab_added = m.counts[1].second;
    return row;
}

BenchReport compare(std::span<const TokenizerSpec> specs, const Dataset& d, int threads) {
    for (const auto& spec : specs)
        if (spec.unit != d.unit)
            throw Error(ErrorKind::unit_mismatch,
                        fmt::format("{} spec was fitted with unit '{}' but dataset '{}' uses '{}'",
                                    to_string(spec.strategy()), spec.unit.name(), d.name, d.unit.name()));
    if (d.test.empty()) throw Error(ErrorKind::domain, fmt::format("dataset '{}' has no test split", d.name));

    const std::vector<double> intervals = d.intervals(Split::test);
    std::vector<double> stamps;
    for (std::int64_t t : d.timestamps(Split::test)) stamps.push_back(static_cast<double>(t));

    BenchReport report{d.name, "test", std::vector<BenchRow>(specs.size())};
    // Specs run concurrently; each one's RMSE loop stays serial.
    kernels::parallel_for(specs.size(), threads, [&](std::size_t i) {
        BenchRow row = describe(specs[i]);
        const auto& values = specs[i].strategy() == Strategy::cal_abs ? stamps : intervals;
        row.reconstruction_rmse = reconstruction_rmse(specs[i], values, 1);
        report.rows[i] = std::move(row);
    });
    return report;
}

std::string report_csv(const BenchReport& r) {
    std::string out = "strategy,scale,levels_or_bins,tokens_per_value,vocab_added,reconstruction_rmse\n";
    for (const auto& row : r.rows)
        out += fmt::format("{},{},{},{}{},{},{}\n", row.strategy, row.scale, row.levels_or_bins,
                           row.tokens.estimate ? "~" : "", row.tokens.value, row.vocab_added,
                           row.reconstruction_rmse);
    return out;
}

std::string report_table(const BenchReport& r) {
    std::string out = fmt::format("dataset: {}  split: {}\n", r.dataset, r.split);
    out += fmt::format("{:<10} {:<7} {:<14} {:>7} {:>7} {:>14}\n", "strategy", "scale", "levels/bins",
                       "tokens", "vocab", "codec floor");
    for (const auto& row : r.rows)
        out += fmt::format("{:<10} {:<7} {:<14} {:>7} {:>7} {:>14.6g}\n", row.strategy, row.scale,
                           row.levels_or_bins,
                           fmt::format("{}{}", row.tokens.estimate ? "~" : "", row.tokens.value),
                           row.vocab_added, row.reconstruction_rmse);
    out += "codec floor = RMSE of decode(encode(v)) against v in dataset units; it is not a model prediction RMSE.\n";
    return out;
}

std::pair<Histogram, Histogram> analyze(const Dataset& d, std::size_t bins) {
    std::vector<double> gaps;
    for (Split s : {Split::train, Split::val, Split::test})
        for (const auto& seq : d.split(s))
            for (std::size_t i = 1; i < seq.events.size(); ++i) gaps.push_back(seq.events[i].interval_units);
    if (gaps.empty()) throw Error(ErrorKind::domain, fmt::format("dataset '{}' has no inter-event intervals", d.name));
    return {histogram(gaps, bins, ScaleKind::linear()), histogram(gaps, bins, ScaleKind::log10())};
}

std::vector<FitOptions> comparison_presets() {
    std::vector<FitOptions> out;
    auto add = [&](Strategy s, auto&& tweak) {
        FitOptions o;
        o.strategy = s;
        tweak(o);
        out.push_back(std::move(o));
    };
    add(Strategy::numeric, [](FitOptions& o) { o.precision = 6; });
    add(Strategy::byte, [](FitOptions&) {});
    for (Strategy s : {Strategy::cal_abs, Strategy::cal_rel})
        for (ResolutionKind r : {ResolutionKind::day, ResolutionKind::second})
            add(s, [r](FitOptions& o) { o.resolution = Resolution{r}; });
    for (Scale sc : {Scale::linear, Scale::log10})
        add(Strategy::scale_bin, [sc](FitOptions& o) {
            o.scale = ScaleKind{sc, 1e-6};
            o.bins = 256;
        });
    for (Scale sc : {Scale::linear, Scale::log10})
        for (auto levels : {std::vector<std::size_t>{256}, std::vector<std::size_t>{64, 64, 64, 64}})
            add(Strategy::rsq, [sc, levels](FitOptions& o) {
                o.scale = ScaleKind{sc, 1e-6};
                o.levels = levels;
            });
    return out;
}

}  // namespace ttok
