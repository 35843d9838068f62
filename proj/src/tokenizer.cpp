#include "ttok/tokenizer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ttok/codec_simple.hpp"
#include "ttok/error.hpp"
#include "ttok/kernels.hpp"

namespace ttok {

using nlohmann::json;

bool is_structural(std::string_view t) {
    return t == kBeginOfEvent || t == kTypePrefix || t == kTimePrefix || t == kEndOfEvent;
}

std::string_view to_string(TemplateOrder order) {
    return order == TemplateOrder::type_time ? "type-time" : "time-type";
}

std::optional<TemplateOrder> parse_template_order(std::string_view text) {
    if (text == "type-time" || text == "type_time") return TemplateOrder::type_time;
    if (text == "time-type" || text == "time_type") return TemplateOrder::time_type;
    return std::nullopt;
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::numeric: return "numeric";
    case Strategy::byte: return "byte";
    case Strategy::cal_abs: return "cal_abs";
    case Strategy::cal_rel: return "cal_rel";
    case Strategy::scale_bin: return "scale_bin";
    case Strategy::rsq: return "rsq";
    }
    return "numeric";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "numeric") return Strategy::numeric;
    if (text == "byte") return Strategy::byte;
    if (text == "cal_abs" || text == "cal-abs") return Strategy::cal_abs;
    if (text == "cal_rel" || text == "cal-rel") return Strategy::cal_rel;
    if (text == "scale_bin" || text == "bin") return Strategy::scale_bin;
    if (text == "rsq") return Strategy::rsq;
    return std::nullopt;
}

void require_fitted(const TokenizerSpec& spec) {
    const bool fitted = std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, CalAbsParams>) return p.year_lo <= p.year_hi;
            else if constexpr (std::is_same_v<P, BinSpec>) return p.k > 0 && p.hi > p.lo;
            else if constexpr (std::is_same_v<P, RsqSpec>) {
                if (p.levels.empty()) return false;
                for (const auto& cb : p.levels)
                    if (cb.centroids.empty()) return false;
                return true;
            } else return true;
        },
        spec.params);
    if (!fitted)
        throw Error(ErrorKind::unfitted,
                    fmt::format("{} tokenizer has not been fitted", to_string(spec.strategy())));
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

TokenizerSpec fit_tokenizer(const FitOptions& opts, TimeUnit unit, std::span<const double> intervals,
                            std::span<const std::int64_t> timestamps) {
    TokenizerSpec spec;
    spec.unit = unit;
    switch (opts.strategy) {
    case Strategy::numeric:
        if (opts.precision < 0 || opts.precision > 17)
            throw Error(ErrorKind::invalid_parameter, "numeric precision must be in [0, 17]");
        spec.params = NumericParams{opts.precision};
        break;
    case Strategy::byte: spec.params = ByteParams{}; break;
    case Strategy::cal_abs: {
        if (timestamps.empty())
            throw Error(ErrorKind::domain, "absolute calendar fit needs at least one timestamp");
        auto [lo, hi] = std::minmax_element(timestamps.begin(), timestamps.end());
        const int y_lo = civil_from_epoch(*lo).year - opts.year_margin;
        const int y_hi = civil_from_epoch(*hi).year + opts.year_margin;
        spec.params = CalAbsParams{opts.resolution, std::max(y_lo, 1900), std::min(y_hi, 2199)};
        break;
    }
    case Strategy::cal_rel: spec.params = CalRelParams{opts.resolution}; break;
    case Strategy::scale_bin: spec.params = bin_fit(intervals, opts.scale, opts.bins); break;
    case Strategy::rsq: spec.params = rsq_fit(intervals, opts.scale, opts.levels, opts.kmeans); break;
    }
    return spec;
}

TokenizerSpec fit_tokenizer(const FitOptions& opts, const Dataset& d) {
    return fit_tokenizer(opts, d.unit, d.intervals(Split::train), d.timestamps(Split::train));
}

// ---------------------------------------------------------------------------
// Per-value codecs
// ---------------------------------------------------------------------------

std::size_t time_arity(const TokenizerSpec& spec) {
    return std::visit(
        [](const auto& p) -> std::size_t {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NumericParams>) return 1;
            else if constexpr (std::is_same_v<P, ByteParams>) return 4;
            else if constexpr (std::is_same_v<P, CalAbsParams> || std::is_same_v<P, CalRelParams>)
                return p.resolution.n_fields();
            else if constexpr (std::is_same_v<P, BinSpec>) return 1;
            else return p.levels.size();
        },
        spec.params);
}

std::vector<std::string> encode_time(const TokenizerSpec& spec, double value) {
    return std::visit(
        [value](const auto& p) -> std::vector<std::string> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NumericParams>) {
                return {encode_numeric(value, p.precision)};
            } else if constexpr (std::is_same_v<P, ByteParams>) {
                std::vector<std::string> out;
                for (ByteToken b : encode_bytes(value)) out.push_back(b.literal());
                return out;
            } else if constexpr (std::is_same_v<P, CalAbsParams>) {
                if (!std::isfinite(value))
                    throw Error(ErrorKind::domain, "absolute timestamp must be finite");
                const auto t = static_cast<std::int64_t>(std::floor(value));
                const int year = civil_from_epoch(t).year;
                if (year < p.year_lo || year > p.year_hi)
                    throw Error(ErrorKind::range, fmt::format("year {} outside the fitted vocabulary [{}, {}]",
                                                              year, p.year_lo, p.year_hi));
                return encode_abs(t, p.resolution);
            } else if constexpr (std::is_same_v<P, CalRelParams>) {
                return encode_rel(value, p.resolution);
            } else if constexpr (std::is_same_v<P, BinSpec>) {
                return {bin_token(bin_encode(value, p))};
            } else {
                const auto codes = rsq_encode(value, p);
                return rsq_tokens(codes);
            }
        },
        spec.params);
}

double decode_time(const TokenizerSpec& spec, std::span<const std::string> tokens) {
    return std::visit(
        [tokens](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NumericParams>) {
                if (tokens.size() != 1)
                    throw Error(ErrorKind::arity,
                                fmt::format("numeric time payload is one string, got {}", tokens.size()));
                return decode_numeric(tokens[0]);
            } else if constexpr (std::is_same_v<P, ByteParams>) {
                std::vector<ByteToken> bytes;
                for (const auto& t : tokens) bytes.push_back(ByteToken::parse(t));
                return static_cast<double>(decode_bytes(bytes));
            } else if constexpr (std::is_same_v<P, CalAbsParams>) {
                return static_cast<double>(decode_abs(tokens, p.resolution));
            } else if constexpr (std::is_same_v<P, CalRelParams>) {
                return static_cast<double>(decode_rel(tokens, p.resolution));
            } else if constexpr (std::is_same_v<P, BinSpec>) {
                if (tokens.size() != 1)
                    throw Error(ErrorKind::arity, fmt::format("bin payload is one token, got {}", tokens.size()));
                return bin_decode(parse_bin_token(tokens[0]), p);
            } else {
                const auto codes = parse_rsq_tokens(tokens, p);
                return rsq_decode(codes, p);
            }
        },
        spec.params);
}

double time_input(const TokenizerSpec& spec, const EventSequence& seq, std::size_t i) {
    switch (spec.strategy()) {
    case Strategy::cal_abs: return static_cast<double>(seq.events[i].timestamp_s);
    case Strategy::cal_rel:
        return i == 0 ? 0.0 : static_cast<double>(seq.events[i].timestamp_s - seq.events[i - 1].timestamp_s);
    default: return seq.events[i].interval_units;
    }
}

// ---------------------------------------------------------------------------
// Template
// ---------------------------------------------------------------------------

TokenStream render_event(std::string_view type_text, std::span<const std::string> time_tokens,
                         TemplateOrder order) {
    TokenStream out;
    out.reserve(time_tokens.size() + 5);
    out.emplace_back(kBeginOfEvent);
    auto type_block = [&] {
        out.emplace_back(kTypePrefix);
        out.emplace_back(type_text);
    };
    auto time_block = [&] {
        out.emplace_back(kTimePrefix);
        out.insert(out.end(), time_tokens.begin(), time_tokens.end());
    };
    if (order == TemplateOrder::type_time) {
        type_block();
        time_block();
    } else {
        time_block();
        type_block();
    }
    out.emplace_back(kEndOfEvent);
    return out;
}

TokenStream render_sequence(const EventSequence& seq, const TokenizerSpec& spec, TemplateOrder order) {
    require_fitted(spec);
    TokenStream out;
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
        std::vector<std::string> time_tokens;
        try {
            time_tokens = encode_time(spec, time_input(spec, seq, i));
        } catch (const Error& e) {
            throw PositionedError(e.kind(), i, fmt::format("event {}: {}", i, e.what()));
        }
        TokenStream ev = render_event(seq.events[i].type_text, time_tokens, order);
        out.insert(out.end(), std::make_move_iterator(ev.begin()), std::make_move_iterator(ev.end()));
    }
    return out;
}

std::vector<TokenStream> render_sequences(std::span<const EventSequence> seqs, const TokenizerSpec& spec,
                                          TemplateOrder order, int threads) {
    require_fitted(spec);
    std::vector<TokenStream> out(seqs.size());
    kernels::parallel_for(seqs.size(), threads,
                          [&](std::size_t i) { out[i] = render_sequence(seqs[i], spec, order); });
    return out;
}

namespace {

class StreamParser {
public:
    StreamParser(std::span<const std::string> stream, const TokenizerSpec& spec)
        : stream_(stream), spec_(spec), arity_(time_arity(spec)) {}

    std::vector<ParsedEvent> parse(TemplateOrder order) {
        std::vector<ParsedEvent> events;
        while (pos_ < stream_.size()) {
            ParsedEvent ev;
            expect(kBeginOfEvent);
            if (order == TemplateOrder::type_time) {
                expect(kTypePrefix);
                ev.type_text = type_payload();
                expect(kTimePrefix);
                ev.time_value = time_payload();
            } else {
                expect(kTimePrefix);
                ev.time_value = time_payload();
                expect(kTypePrefix);
                ev.type_text = type_payload();
            }
            expect(kEndOfEvent);
            events.push_back(std::move(ev));
        }
        return events;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw PositionedError(ErrorKind::grammar, pos_, fmt::format("token {}: {}", pos_, what));
    }

    void expect(std::string_view token) {
        if (pos_ >= stream_.size()) fail(fmt::format("stream ends where {} was expected", token));
        if (stream_[pos_] != token) fail(fmt::format("expected {} but found '{}'", token, stream_[pos_]));
        ++pos_;
    }

    std::string type_payload() {
        std::string text;
        const std::size_t start = pos_;
        while (pos_ < stream_.size() && !is_structural(stream_[pos_])) text += stream_[pos_++];
        if (pos_ == start) fail("empty event type");
        return text;
    }

    double time_payload() {
        const std::size_t start = pos_;
        for (std::size_t i = 0; i < arity_; ++i) {
            if (pos_ >= stream_.size()) fail(fmt::format("truncated time payload ({} of {} tokens)", i, arity_));
            if (is_structural(stream_[pos_]))
                fail(fmt::format("time payload has {} tokens, expected {}", i, arity_));
            ++pos_;
        }
        try {
            return decode_time(spec_, stream_.subspan(start, arity_));
        } catch (const PositionedError&) {
            throw;
        } catch (const Error& e) {
            throw PositionedError(e.kind(), start, fmt::format("token {}: {}", start, e.what()));
        }
    }

    std::span<const std::string> stream_;
    const TokenizerSpec& spec_;
    std::size_t arity_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<ParsedEvent> parse_stream(std::span<const std::string> stream, const TokenizerSpec& spec,
                                      TemplateOrder order) {
    require_fitted(spec);
    return StreamParser(stream, spec).parse(order);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

VocabManifest build_manifest(const TokenizerSpec& spec) {
    require_fitted(spec);
    VocabManifest m;
    m.tokens = {std::string(kBeginOfEvent), std::string(kEndOfEvent), std::string(kTypePrefix),
                std::string(kTimePrefix)};
    const std::vector<std::string> strategy_tokens = std::visit(
        [](const auto& p) -> std::vector<std::string> {
            using P = std::decay_t<decltype(p)>;
            std::vector<std::string> out;
            if constexpr (std::is_same_v<P, ByteParams>) {
                for (unsigned b = 0; b < kByteVocabSize; ++b)
                    out.push_back(ByteToken{static_cast<std::uint8_t>(b)}.literal());
            } else if constexpr (std::is_same_v<P, CalAbsParams>) {
                out = calendar_abs_vocab(p.resolution, p.year_lo, p.year_hi);
            } else if constexpr (std::is_same_v<P, CalRelParams>) {
                out = calendar_rel_vocab(p.resolution);
            } else if constexpr (std::is_same_v<P, BinSpec>) {
                for (std::size_t j = 0; j < p.k; ++j) out.push_back(bin_token(static_cast<std::uint32_t>(j)));
            } else if constexpr (std::is_same_v<P, RsqSpec>) {
                for (const auto& cb : p.levels)
                    for (std::size_t j = 0; j < cb.centroids.size(); ++j)
                        out.push_back(rsq_token(cb.level, static_cast<std::uint32_t>(j)));
            }
            return out;
        },
        spec.params);
    m.tokens.insert(m.tokens.end(), strategy_tokens.begin(), strategy_tokens.end());
    m.counts = {{"structural", 4}, {"strategy", strategy_tokens.size()}};
    return m;
}

std::string manifest_to_json(const VocabManifest& m) {
    json counts = json::object();
    for (const auto& [name, n] : m.counts) counts[name] = n;
    json j = json::object();
    j["tokens"] = m.tokens;
    j["counts"] = counts;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Spec files
// ---------------------------------------------------------------------------

namespace {

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

json scale_json(const ScaleKind& s) {
    return json{{"kind", std::string(s.name())}, {"epsilon", s.epsilon}};
}

json params_json(const StrategyParams& params) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NumericParams>) return json{{"precision", p.precision}};
            else if constexpr (std::is_same_v<P, ByteParams>) return json::object();
            else if constexpr (std::is_same_v<P, CalAbsParams>)
                return json{{"resolution", std::string(p.resolution.name())},
                            {"year_lo", p.year_lo},
                            {"year_hi", p.year_hi}};
            else if constexpr (std::is_same_v<P, CalRelParams>)
                return json{{"resolution", std::string(p.resolution.name())}};
            else if constexpr (std::is_same_v<P, BinSpec>)
                return json{{"scale", scale_json(p.scale)}, {"k", p.k}, {"lo", p.lo}, {"hi", p.hi}};
            else {
                json levels = json::array();
                for (const auto& cb : p.levels) levels.push_back(cb.centroids);
                return json{{"scale", scale_json(p.scale)}, {"levels", levels}};
            }
        },
        params);
}

json body_json(const TokenizerSpec& spec) {
    json j = json::object();
    j["version"] = spec.version;
    j["strategy"] = std::string(to_string(spec.strategy()));
    j["unit"] = std::string(spec.unit.name());
    j["params"] = params_json(spec.params);
    return j;
}

[[noreturn]] void schema_error(const std::string& what) {
    throw Error(ErrorKind::schema, fmt::format("tokenizer spec: {}", what));
}

const json& field(const json& obj, const char* key) {
    if (!obj.is_object()) schema_error("expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(fmt::format("missing '{}'", key));
    return *it;
}

template <class T>
T get_as(const json& obj, const char* key) {
    const json& v = field(obj, key);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        schema_error(fmt::format("'{}' has the wrong type", key));
    }
}

ScaleKind scale_from(const json& obj) {
    const json& s = field(obj, "scale");
    const auto eps = get_as<double>(s, "epsilon");
    auto kind = ScaleKind::parse(get_as<std::string>(s, "kind"), eps);
    if (!kind) schema_error("unknown scale kind");
    return *kind;
}

Resolution resolution_from(const json& obj) {
    auto r = Resolution::parse(get_as<std::string>(obj, "resolution"));
    if (!r) schema_error("unknown resolution");
    return *r;
}

StrategyParams params_from(Strategy strategy, const json& p) {
    switch (strategy) {
    case Strategy::numeric: {
        const int precision = get_as<int>(p, "precision");
        if (precision < 0 || precision > 17) schema_error("precision outside [0, 17]");
        return NumericParams{precision};
    }
    case Strategy::byte: return ByteParams{};
    case Strategy::cal_abs:
        return CalAbsParams{resolution_from(p), get_as<int>(p, "year_lo"), get_as<int>(p, "year_hi")};
    case Strategy::cal_rel: return CalRelParams{resolution_from(p)};
    case Strategy::scale_bin: {
        BinSpec b{scale_from(p), get_as<std::size_t>(p, "k"), get_as<double>(p, "lo"), get_as<double>(p, "hi")};
        if (b.k == 0 || !(b.hi > b.lo)) schema_error("bin range must satisfy k >= 1 and lo < hi");
        return b;
    }
    case Strategy::rsq: {
        RsqSpec r{scale_from(p), {}};
        const json& levels = field(p, "levels");
        if (!levels.is_array() || levels.empty()) schema_error("'levels' must be a non-empty array");
        for (std::size_t l = 0; l < levels.size(); ++l) {
            Codebook cb{l, {}};
            try {
                cb.centroids = levels[l].get<std::vector<double>>();
            } catch (const json::exception&) {
                schema_error(fmt::format("level {} is not an array of numbers", l));
            }
            if (cb.centroids.empty()) schema_error(fmt::format("level {} is empty", l));
            for (std::size_t j = 1; j < cb.centroids.size(); ++j)
                if (!(cb.centroids[j] > cb.centroids[j - 1]))
                    schema_error(fmt::format("level {} centroids are not strictly ascending", l));
            r.levels.push_back(std::move(cb));
        }
        return r;
    }
    }
    schema_error("unknown strategy");
}

}  // namespace

std::string spec_to_json(const TokenizerSpec& spec) {
    require_fitted(spec);
    json body = body_json(spec);
    const std::string checksum = fnv1a_hex(body.dump());
    body["checksum"] = checksum;
    return body.dump(2) + "\n";
}

TokenizerSpec spec_from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) schema_error("not valid JSON (truncated or corrupt file)");
    if (!j.is_object()) schema_error("top level must be an object");

    const auto version = get_as<std::string>(j, "version");
    if (version != kSpecFormatVersion)
        throw Error(ErrorKind::version_mismatch,
                    fmt::format("tokenizer spec format version {} is not supported (this build reads version {})",
                                version, kSpecFormatVersion));
    const auto checksum = get_as<std::string>(j, "checksum");
    json body = j;
    body.erase("checksum");
    const std::string actual = fnv1a_hex(body.dump());
    if (checksum != actual)
        throw Error(ErrorKind::checksum_mismatch,
                    fmt::format("tokenizer spec checksum {} does not match content ({})", checksum, actual));

    TokenizerSpec spec;
    spec.version = version;
    auto strategy = parse_strategy(get_as<std::string>(j, "strategy"));
    if (!strategy) schema_error("unknown strategy");
    auto unit = TimeUnit::parse(get_as<std::string>(j, "unit"));
    if (!unit) schema_error("unknown unit");
    spec.unit = *unit;
    spec.params = params_from(*strategy, field(j, "params"));
    require_fitted(spec);
    return spec;
}

void save_spec(const TokenizerSpec& spec, const std::filesystem::path& path) {
    const std::string text = spec_to_json(spec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, fmt::format("cannot write '{}'", path.string()));
    out << text;
}

TokenizerSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return spec_from_json(buf.str());
}

std::string streams_to_jsonl(std::span<const TokenStream> streams) {
    std::string out;
    for (const auto& s : streams) {
        out += json{{"tokens", s}}.dump();
        out += '\n';
    }
    return out;
}

std::vector<TokenStream> streams_from_jsonl(std::string_view text) {
    std::vector<TokenStream> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("tokens") || !j["tokens"].is_array())
            throw PositionedError(ErrorKind::parse, line_no,
                                  fmt::format("line {}: expected {{\"tokens\": [...]}}", line_no));
        TokenStream s;
        for (const auto& t : j["tokens"]) {
            if (!t.is_string())
                throw PositionedError(ErrorKind::parse, line_no, fmt::format("line {}: non-string token", line_no));
            s.push_back(t.get<std::string>());
        }
        out.push_back(std::move(s));
    }
    return out;
}

Tokenizer::Tokenizer(TokenizerSpec spec) : spec_(std::move(spec)) { require_fitted(spec_); }

Tokenizer Tokenizer::load(const std::filesystem::path& path) { return Tokenizer(load_spec(path)); }

TokenStream Tokenizer::render_sequence(std::string_view sequence_json, TemplateOrder order) const {
    return ttok::render_sequence(parse_sequence_json(sequence_json), spec_, order);
}

}  // namespace ttok
