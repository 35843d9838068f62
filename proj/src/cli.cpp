#include "ttok/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ttok/bench.hpp"
#include "ttok/core.hpp"
#include "ttok/error.hpp"
#include "ttok/tokenizer.hpp"
#include "ttok/transforms.hpp"

namespace ttok::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T, class Parser>
T parse_choice(const std::string& text, const char* flag, Parser parser) {
    auto v = parser(text);
    if (!v) throw UsageError(fmt::format("invalid value '{}' for {}", text, flag));
    return *v;
}

TimeUnit parse_unit(const std::string& text) {
    return parse_choice<TimeUnit>(text, "--unit", [](std::string_view t) { return TimeUnit::parse(t); });
}

std::vector<std::size_t> parse_levels(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        long long v = -1;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || v < 1)
            throw UsageError(fmt::format("--levels entries must be integers >= 1, got '{}'", item));
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw UsageError("--levels needs at least one entry");
    return out;
}

std::vector<double> parse_reals(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || item.empty())
            throw UsageError(fmt::format("{} entries must be numbers, got '{}'", flag, item));
        out.push_back(v);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, fmt::format("cannot open '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, fmt::format("cannot write '{}'", path));
    f << content;
}

struct Options {
    std::string strategy;
    std::string scale = "linear";
    double epsilon = 1e-6;
    std::size_t bins = 256;
    std::string levels = "64,64,64,64";
    std::string resolution = "second";
    int precision = 6;
    std::string order = "type-time";
    std::string unit;
    std::uint64_t seed = 0;
    std::string engine = "dp";
    int year_margin = 2;
    int threads = 0;
    std::string data;
    std::vector<std::string> specs;
    std::string out;
    std::string manifest;
    std::string split = "all";
    double check_tol = -1.0;

    // gen
    std::string shape = "lognormal";
    std::size_t sequences = 100;
    std::size_t seq_len = 50;
    double log_mean = 0.0;
    double log_sd = 1.0;
    std::string atoms = "1,2,4";
    std::string weights = "0.6,0.3,0.1";
    double jitter = 0.01;
    double mix = 0.5;
    double uniform_lo = 1.0;
    double uniform_hi = 2.0;
};

FitOptions fit_options(const Options& o, bool need_strategy) {
    FitOptions f;
    if (need_strategy)
        f.strategy = parse_choice<Strategy>(o.strategy, "--strategy",
                                            [](std::string_view t) { return parse_strategy(t); });
    if (!(o.epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
    f.scale = parse_choice<ScaleKind>(o.scale, "--scale",
                                      [&](std::string_view t) { return ScaleKind::parse(t, o.epsilon); });
    if (o.bins < 1) throw UsageError("--bins must be >= 1");
    f.bins = o.bins;
    f.levels = parse_levels(o.levels);
    f.resolution = parse_choice<Resolution>(o.resolution, "--resolution",
                                            [](std::string_view t) { return Resolution::parse(t); });
    if (o.precision < 0 || o.precision > 17) throw UsageError("--precision must be in [0, 17]");
    f.precision = o.precision;
    f.year_margin = o.year_margin;
    f.kmeans.engine = parse_choice<KMeansEngine>(o.engine, "--engine",
                                                 [](std::string_view t) { return parse_kmeans_engine(t); });
    f.kmeans.seed = o.seed;
    f.kmeans.threads = o.threads;
    return f;
}

std::vector<EventSequence> selected_sequences(const Dataset& d, const std::string& split) {
    if (split == "all") {
        std::vector<EventSequence> all;
        for (Split s : {Split::train, Split::val, Split::test})
            all.insert(all.end(), d.split(s).begin(), d.split(s).end());
        return all;
    }
    return d.split(parse_choice<Split>(split, "--split", [](std::string_view t) { return parse_split(t); }));
}

int cmd_fit(const Options& o, std::ostream& out) {
    const FitOptions f = fit_options(o, true);
    const Dataset d = load_dataset(o.data, parse_unit(o.unit));
    RsqFitReport report;
    TokenizerSpec spec;
    if (f.strategy == Strategy::rsq) {
        spec.unit = d.unit;
        spec.params = rsq_fit(d.intervals(Split::train), f.scale, f.levels, f.kmeans, &report);
    } else {
        spec = fit_tokenizer(f, d);
    }
    write_output(o.out, spec_to_json(spec), out);
    if (!o.manifest.empty()) write_output(o.manifest, manifest_to_json(build_manifest(spec)), out);
    if (!o.out.empty() && o.out != "-") {
        out << fmt::format("fitted {} tokenizer on {} training sequences -> {}\n", to_string(spec.strategy()),
                           d.train.size(), o.out);
        for (std::size_t l = 0; l < report.level_mse.size(); ++l)
            out << fmt::format("  level {}: {} codes, training MSE {:.6g}{}\n", l,
                               std::get<RsqSpec>(spec.params).levels[l].centroids.size(), report.level_mse[l],
                               report.k_reduced[l] ? " (k reduced to distinct values)" : "");
    }
    return kOk;
}

const std::string& single_spec(const Options& o) {
    if (o.specs.size() != 1) throw UsageError("exactly one --spec is required");
    return o.specs.front();
}

TimeUnit data_unit(const Options& o, const TokenizerSpec& spec) {
    if (o.unit.empty()) return spec.unit;
    const TimeUnit u = parse_unit(o.unit);
    if (u != spec.unit)
        throw Error(ErrorKind::unit_mismatch, fmt::format("--unit {} differs from the spec's unit {}", u.name(),
                                                          spec.unit.name()));
    return u;
}

int cmd_encode(const Options& o, std::ostream& out) {
    const TemplateOrder order = parse_choice<TemplateOrder>(
        o.order, "--order", [](std::string_view t) { return parse_template_order(t); });
    const TokenizerSpec spec = load_spec(single_spec(o));
    const Dataset d = load_dataset(o.data, data_unit(o, spec));
    const std::vector<EventSequence> seqs = selected_sequences(d, o.split);
    const std::vector<TokenStream> streams = render_sequences(seqs, spec, order, o.threads);
    write_output(o.out, streams_to_jsonl(streams), out);
    return kOk;
}

int cmd_decode(const Options& o, std::ostream& out) {
    const TemplateOrder order = parse_choice<TemplateOrder>(
        o.order, "--order", [](std::string_view t) { return parse_template_order(t); });
    const TokenizerSpec spec = load_spec(single_spec(o));
    const std::vector<TokenStream> streams = streams_from_jsonl(read_file(o.data));
    std::string text;
    for (std::size_t i = 0; i < streams.size(); ++i) {
        std::vector<ParsedEvent> events;
        try {
            events = parse_stream(streams[i], spec, order);
        } catch (const PositionedError& e) {
            throw PositionedError(e.kind(), e.position(), fmt::format("stream {}: {}", i + 1, e.what()));
        }
        nlohmann::json types = nlohmann::json::array(), times = nlohmann::json::array();
        for (const auto& ev : events) {
            types.push_back(ev.type_text);
            times.push_back(ev.time_value);
        }
        text += nlohmann::json{{"type_text", types}, {"time", times}}.dump();
        text += '\n';
    }
    write_output(o.out, text, out);
    return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
    if (o.bins < 1) throw UsageError("--bins must be >= 1");
    const Dataset d = load_dataset(o.data, parse_unit(o.unit));
    const auto [linear, log] = analyze(d, o.bins);
    for (const Histogram* h : {&linear, &log}) {
        const auto mode = static_cast<std::size_t>(
            std::max_element(h->counts.begin(), h->counts.end()) - h->counts.begin());
        out << fmt::format("{:<6} scale: {} intervals, range [{:.6g}, {:.6g}], modal bin [{:.6g}, {:.6g}) with {}\n",
                           h->scale.name(), h->total(), h->edges.front(), h->edges.back(), h->edges[mode],
                           h->edges[mode + 1], h->counts[mode]);
    }
    if (!o.out.empty()) {
        write_output(o.out + ".linear.csv", histogram_csv(linear), out);
        write_output(o.out + ".log.csv", histogram_csv(log), out);
    }
    return kOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
    const Dataset d = load_dataset(o.data, parse_unit(o.unit));
    std::vector<TokenizerSpec> specs;
    if (o.specs.empty()) {
        const FitOptions base = fit_options(o, false);
        for (FitOptions f : comparison_presets()) {
            f.kmeans = base.kmeans;
            specs.push_back(fit_tokenizer(f, d));
        }
    } else {
        for (const auto& path : o.specs) specs.push_back(load_spec(path));
    }
    const BenchReport report = compare(specs, d, o.threads);
    out << report_table(report);
    if (!o.out.empty()) write_output(o.out, report_csv(report), out);
    return kOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
    SyntheticConfig cfg;
    cfg.shape = parse_choice<SyntheticShape>(o.shape, "--shape",
                                             [](std::string_view t) { return parse_synthetic_shape(t); });
    cfg.n_sequences = o.sequences;
    cfg.seq_len = o.seq_len;
    cfg.seed = o.seed;
    cfg.unit = o.unit.empty() ? TimeUnit{TimeUnitKind::hour} : parse_unit(o.unit);
    cfg.log_mean = o.log_mean;
    cfg.log_sd = o.log_sd;
    cfg.atoms = parse_reals(o.atoms, "--atoms");
    cfg.atom_weights = parse_reals(o.weights, "--weights");
    cfg.jitter = o.jitter;
    cfg.lognormal_weight = o.mix;
    cfg.uniform_lo = o.uniform_lo;
    cfg.uniform_hi = o.uniform_hi;
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    write_output(o.out, serialize_dataset(gen_synthetic(cfg)), out);
    return kOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
    const Dataset d = load_dataset(o.data, parse_unit(o.unit));
    out << format_stats(dataset_stats(d), d);
    if (o.check_tol >= 0.0) {
        std::size_t n = 0;
        for (Split s : {Split::train, Split::val, Split::test})
            for (const auto& seq : d.split(s)) {
                for (const auto& w : validate_consistency(seq, d.unit, o.check_tol)) {
                    if (n < 10) out << "warning: " << w.message << '\n';
                    ++n;
                }
            }
        out << fmt::format("consistency: {} interval(s) disagree with timestamps beyond {} {}s\n", n,
                           o.check_tol, d.unit.name());
    }
    return kOk;
}

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
    std::string line(message);
    std::replace(line.begin(), line.end(), '\n', ' ');
    err << "ttok: error[" << kind << "]: " << line << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Temporal tokenization toolkit: fit, apply and benchmark time tokenizers", "ttok"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", fmt::format("ttok spec format {}", kSpecFormatVersion));
    Options o;

    auto* fit = app.add_subcommand("fit", "Fit a tokenizer on the training split and write its spec");
    fit->add_option("--strategy", o.strategy, "numeric|byte|cal-abs|cal-rel|bin|rsq")->required();
    fit->add_option("--scale", o.scale, "linear|log");
    fit->add_option("--epsilon", o.epsilon, "log-scale floor added before log10");
    fit->add_option("--bins", o.bins, "bin count for the bin strategy");
    fit->add_option("--levels", o.levels, "RSQ codebook sizes, e.g. 64,64,64,64");
    fit->add_option("--resolution", o.resolution, "day|hour|minute|second");
    fit->add_option("--precision", o.precision, "numeric string decimals");
    fit->add_option("--year-margin", o.year_margin, "extra years around the absolute-calendar range");
    fit->add_option("--engine", o.engine, "k-means engine: dp|lloyd");
    fit->add_option("--seed", o.seed, "seed for the lloyd engine");
    fit->add_option("--unit", o.unit, "interval unit of the dataset")->required();
    fit->add_option("--data", o.data, "dataset JSONL")->required();
    fit->add_option("--out", o.out, "spec file (stdout if omitted)");
    fit->add_option("--manifest", o.manifest, "also write the vocabulary manifest here");
    fit->add_option("--threads", o.threads, "OpenMP threads (0 = default)");

    auto* encode = app.add_subcommand("encode", "Render dataset sequences as token streams");
    encode->add_option("--spec", o.specs, "spec file")->required();
    encode->add_option("--data", o.data, "dataset JSONL")->required();
    encode->add_option("--order", o.order, "type-time|time-type");
    encode->add_option("--unit", o.unit, "dataset unit (defaults to the spec's)");
    encode->add_option("--split", o.split, "all|train|val|test");
    encode->add_option("--out", o.out, "token-stream JSONL (stdout if omitted)");
    encode->add_option("--threads", o.threads, "OpenMP threads (0 = default)");

    auto* decode = app.add_subcommand("decode", "Parse token streams back into types and times");
    decode->add_option("--spec", o.specs, "spec file")->required();
    decode->add_option("--data", o.data, "token-stream JSONL")->required();
    decode->add_option("--order", o.order, "type-time|time-type");
    decode->add_option("--out", o.out, "decoded JSONL (stdout if omitted)");

    auto* analyze_cmd = app.add_subcommand("analyze", "Interval histograms on linear and log scales");
    analyze_cmd->add_option("--data", o.data, "dataset JSONL")->required();
    analyze_cmd->add_option("--unit", o.unit, "interval unit")->required();
    analyze_cmd->add_option("--bins", o.bins, "histogram bins")->default_val(50);
    analyze_cmd->add_option("--out", o.out, "CSV prefix: writes <prefix>.linear.csv and <prefix>.log.csv");

    auto* bench = app.add_subcommand("bench", "Compare tokenizers by token cost and codec floor");
    bench->add_option("--data", o.data, "dataset JSONL")->required();
    bench->add_option("--unit", o.unit, "interval unit")->required();
    bench->add_option("--spec", o.specs, "spec files (default: fit the standard presets)");
    bench->add_option("--engine", o.engine, "k-means engine for presets: dp|lloyd");
    bench->add_option("--seed", o.seed, "seed for the lloyd engine");
    bench->add_option("--out", o.out, "CSV report");
    bench->add_option("--threads", o.threads, "OpenMP threads (0 = default)");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->add_option("--shape", o.shape, "lognormal|spiky|mixed|uniform");
    gen->add_option("--sequences", o.sequences, "number of sequences");
    gen->add_option("--seq-len", o.seq_len, "events per sequence");
    gen->add_option("--seed", o.seed, "RNG seed");
    gen->add_option("--unit", o.unit, "interval unit (default hour)");
    gen->add_option("--log-mean", o.log_mean, "lognormal: mean of log interval");
    gen->add_option("--log-sd", o.log_sd, "lognormal: sd of log interval");
    gen->add_option("--atoms", o.atoms, "spiky: comma-separated atoms");
    gen->add_option("--weights", o.weights, "spiky: comma-separated atom weights");
    gen->add_option("--jitter", o.jitter, "spiky: uniform jitter half-width");
    gen->add_option("--mix", o.mix, "mixed: probability of a lognormal draw");
    gen->add_option("--uniform-lo", o.uniform_lo, "uniform: lower bound");
    gen->add_option("--uniform-hi", o.uniform_hi, "uniform: upper bound");
    gen->add_option("--out", o.out, "dataset JSONL (stdout if omitted)");

    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("--data", o.data, "dataset JSONL")->required();
    stats->add_option("--unit", o.unit, "interval unit")->required();
    stats->add_option("--check-tol", o.check_tol, "also cross-check intervals against timestamps");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        err << app.help();
        return kUsage;
    }

    try {
        if (fit->parsed()) return cmd_fit(o, out);
        if (encode->parsed()) return cmd_encode(o, out);
        if (decode->parsed()) return cmd_decode(o, out);
        if (analyze_cmd->parsed()) return cmd_analyze(o, out);
        if (bench->parsed()) return cmd_bench(o, out);
        if (gen->parsed()) return cmd_gen(o, out);
        if (stats->parsed()) return cmd_stats(o, out);
        err << app.help();
        return kUsage;
    } catch (const UsageError& e) {
        print_error(err, "usage", e.what());
        for (const auto* sub : app.get_subcommands())
            if (sub->parsed()) err << sub->help();
        return kUsage;
    } catch (const Error& e) {
        print_error(err, to_string(e.kind()), e.what());
        return kDataError;
    } catch (const std::exception& e) {
        print_error(err, "internal", e.what());
        return kInternalError;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace ttok::cli
