#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ttok/codec_calendar.hpp"
#include "ttok/codec_quant.hpp"
#include "ttok/core.hpp"

namespace ttok {

inline constexpr std::string_view kBeginOfEvent = "<|begin_of_event|>";
inline constexpr std::string_view kTypePrefix = "<|type_prefix|>";
inline constexpr std::string_view kTimePrefix = "<|time_prefix|>";
inline constexpr std::string_view kEndOfEvent = "<|end_of_event|>";

/// Version written to and required from tokenizer spec files.
inline constexpr std::string_view kSpecFormatVersion = "1";

bool is_structural(std::string_view token);

enum class TemplateOrder { type_time, time_type };

std::string_view to_string(TemplateOrder order);
/// Accepts "type-time"/"time-type" and the underscore spellings.
std::optional<TemplateOrder> parse_template_order(std::string_view text);

enum class Strategy { numeric, byte, cal_abs, cal_rel, scale_bin, rsq };

/// Spec-file spelling: numeric, byte, cal_abs, cal_rel, scale_bin, rsq.
std::string_view to_string(Strategy s);
/// Accepts the spec-file spelling and the CLI one (cal-abs, cal-rel, bin).
std::optional<Strategy> parse_strategy(std::string_view text);

struct NumericParams {
    int precision = 6;
};
struct ByteParams {};
struct CalAbsParams {
    Resolution resolution;
    int year_lo = 0;
    int year_hi = -1;  // empty range until fitted
};
struct CalRelParams {
    Resolution resolution;
};

using StrategyParams = std::variant<NumericParams, ByteParams, CalAbsParams, CalRelParams, BinSpec, RsqSpec>;

/// A fitted tokenizer. The strategy is the active alternative of `params`.
struct TokenizerSpec {
    TimeUnit unit;
    std::string version{kSpecFormatVersion};
    StrategyParams params;

    Strategy strategy() const { return static_cast<Strategy>(params.index()); }
};

/// Throws Error(unfitted) when data-driven parameters are missing.
void require_fitted(const TokenizerSpec& spec);

struct FitOptions {
    Strategy strategy = Strategy::byte;
    ScaleKind scale;
    std::size_t bins = 256;
    std::vector<std::size_t> levels{64, 64, 64, 64};
    Resolution resolution;
    int precision = 6;
    int year_margin = 2;
    KMeansOptions kmeans;
};

/// Fits on every interval (and timestamp, for absolute calendars) of the
/// training split.
TokenizerSpec fit_tokenizer(const FitOptions& opts, const Dataset& d);
TokenizerSpec fit_tokenizer(const FitOptions& opts, TimeUnit unit, std::span<const double> intervals,
                            std::span<const std::int64_t> timestamps);

// The value a strategy encodes: epoch seconds for cal_abs, seconds for
// cal_rel, interval units for everything else.

std::size_t time_arity(const TokenizerSpec& spec);
std::vector<std::string> encode_time(const TokenizerSpec& spec, double value);
double decode_time(const TokenizerSpec& spec, std::span<const std::string> tokens);

/// Value of event i that `spec` consumes. cal_rel reads timestamp deltas.
double time_input(const TokenizerSpec& spec, const EventSequence& seq, std::size_t i);

using TokenStream = std::vector<std::string>;

TokenStream render_event(std::string_view type_text, std::span<const std::string> time_tokens,
                         TemplateOrder order = TemplateOrder::type_time);

/// Codec failures are rethrown annotated with the event index.
TokenStream render_sequence(const EventSequence& seq, const TokenizerSpec& spec,
                            TemplateOrder order = TemplateOrder::type_time);

/// Renders sequences in parallel; the result order matches the input.
std::vector<TokenStream> render_sequences(std::span<const EventSequence> seqs, const TokenizerSpec& spec,
                                          TemplateOrder order = TemplateOrder::type_time, int threads = 0);

struct ParsedEvent {
    std::string type_text;
    double time_value = 0.0;
};

/// Inverse of render_sequence. Type payloads of several fragments are
/// concatenated. Throws PositionedError(grammar) at the offending offset.
std::vector<ParsedEvent> parse_stream(std::span<const std::string> stream, const TokenizerSpec& spec,
                                      TemplateOrder order = TemplateOrder::type_time);

struct VocabManifest {
    std::vector<std::string> tokens;
    std::vector<std::pair<std::string, std::size_t>> counts;  // structural, strategy
};

VocabManifest build_manifest(const TokenizerSpec& spec);
std::string manifest_to_json(const VocabManifest& m);

std::string spec_to_json(const TokenizerSpec& spec);
TokenizerSpec spec_from_json(std::string_view text);
void save_spec(const TokenizerSpec& spec, const std::filesystem::path& path);
TokenizerSpec load_spec(const std::filesystem::path& path);

/// `{"tokens": [...]}`, one line per stream.
std::string streams_to_jsonl(std::span<const TokenStream> streams);
std::vector<TokenStream> streams_from_jsonl(std::string_view text);

/// A loaded spec behind the handful of calls an LLM data pipeline needs.
class Tokenizer {
public:
    explicit Tokenizer(TokenizerSpec spec);
    static Tokenizer load(const std::filesystem::path& path);

    const TokenizerSpec& spec() const { return spec_; }
    Strategy strategy() const { return spec_.strategy(); }
    TimeUnit unit() const { return spec_.unit; }

    std::vector<std::string> encode_value(double v) const { return encode_time(spec_, v); }
    double decode_value(std::span<const std::string> tokens) const { return decode_time(spec_, tokens); }
    /// Takes one dataset JSONL object (the split field is optional).
    TokenStream render_sequence(std::string_view sequence_json,
                                TemplateOrder order = TemplateOrder::type_time) const;
    std::vector<std::string> vocab() const { return build_manifest(spec_).tokens; }

private:
    TokenizerSpec spec_;
};

}  // namespace ttok
