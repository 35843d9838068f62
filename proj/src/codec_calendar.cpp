#include "ttok/codec_calendar.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "ttok/error.hpp"

namespace ttok {

namespace chr = std::chrono;

std::string_view Resolution::name() const {
    switch (kind) {
    case ResolutionKind::day: return "day";
    case ResolutionKind::hour: return "hour";
    case ResolutionKind::minute: return "minute";
    case ResolutionKind::second: return "second";
    }
    return "second";
}

std::optional<Resolution> Resolution::parse(std::string_view text) {
    if (text == "day") return Resolution{ResolutionKind::day};
    if (text == "hour") return Resolution{ResolutionKind::hour};
    if (text == "minute") return Resolution{ResolutionKind::minute};
    if (text == "second") return Resolution{ResolutionKind::second};
    return std::nullopt;
}

namespace {

// Field order and literal names shared by absolute and relative tokens.
constexpr std::array<std::string_view, 6> kFieldNames = {"year", "month", "day",
                                                         "hour", "min",   "sec"};

std::string field_token(std::size_t field, int value, int width) {
    return fmt::format("<|{}_{:0{}}|>", kFieldNames[field], value, width);
}

int parse_field_token(std::string_view lit, std::size_t field, std::size_t width) {
    const std::string_view name = kFieldNames[field];
    const std::size_t expected = 2 + name.size() + 1 + width + 2;
    auto bad = [&] {
        return Error(ErrorKind::malformed_token,
                     fmt::format("'{}' is not a <|{}_{}|> token", lit, name, std::string(width, 'N')));
    };
    if (lit.size() != expected || !lit.starts_with("<|") || !lit.ends_with("|>") ||
        lit.substr(2, name.size()) != name || lit[2 + name.size()] != '_')
        throw bad();
    const char* first = lit.data() + 2 + name.size() + 1;
    for (std::size_t i = 0; i < width; ++i)
        if (first[i] < '0' || first[i] > '9') throw bad();
    int value = 0;
    std::from_chars(first, first + width, value);
    return value;
}

void check_arity(std::span<const std::string> tokens, Resolution r) {
    if (tokens.size() != r.n_fields())
        throw Error(ErrorKind::arity, fmt::format("{}-resolution calendar needs {} tokens, got {}",
                                                  r.name(), r.n_fields(), tokens.size()));
}

}  // namespace

CivilTime civil_from_epoch(std::int64_t t) {
    if (t < kMinEpoch || t >= kMaxEpochExclusive)
        throw Error(ErrorKind::range,
                    fmt::format("epoch {} outside the supported window [1900, 2200)", t));
    const chr::sys_seconds tp{chr::seconds{t}};
    const auto day_point = chr::floor<chr::days>(tp);
    const chr::year_month_day ymd{day_point};
    const chr::hh_mm_ss hms{tp - day_point};
    return CivilTime{static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()),
                     static_cast<unsigned>(hms.hours().count()),
                     static_cast<unsigned>(hms.minutes().count()),
                     static_cast<unsigned>(hms.seconds().count())};
}

std::int64_t epoch_from_civil(const CivilTime& c) {
    const chr::year_month_day ymd{chr::year{c.year}, chr::month{c.month}, chr::day{c.day}};
    if (!ymd.ok() || c.hour > 23 || c.minute > 59 || c.second > 59)
        throw Error(ErrorKind::invalid_date,
                    fmt::format("invalid date {:04}-{:02}-{:02} {:02}:{:02}:{:02}", c.year, c.month,
                                c.day, c.hour, c.minute, c.second));
    const auto days = chr::sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + c.hour * 3600LL + c.minute * 60LL + c.second;
}

std::vector<std::string> encode_abs(std::int64_t t, Resolution r) {
    const CivilTime c = civil_from_epoch(t);
    const std::array<int, 6> fields = {c.year,
                                       static_cast<int>(c.month),
                                       static_cast<int>(c.day),
                                       static_cast<int>(c.hour),
                                       static_cast<int>(c.minute),
                                       static_cast<int>(c.second)};
    std::vector<std::string> out;
    out.reserve(r.n_fields());
    for (std::size_t f = 0; f < r.n_fields(); ++f) out.push_back(field_token(f, fields[f], f == 0 ? 4 : 2));
    return out;
}

std::int64_t decode_abs(std::span<const std::string> tokens, Resolution r) {
    check_arity(tokens, r);
    std::array<int, 6> fields = {1970, 1, 1, 0, 0, 0};
    for (std::size_t f = 0; f < r.n_fields(); ++f)
        fields[f] = parse_field_token(tokens[f], f, f == 0 ? 4 : 2);
    return epoch_from_civil(CivilTime{fields[0], static_cast<unsigned>(fields[1]),
                                      static_cast<unsigned>(fields[2]), static_cast<unsigned>(fields[3]),
                                      static_cast<unsigned>(fields[4]), static_cast<unsigned>(fields[5])});
}

std::int64_t RelSpan::total_seconds() const {
    return years * kSecondsPerRelYear + months * kSecondsPerRelMonth + days * 86400LL +
           hours * 3600LL + minutes * 60LL + seconds;
}

RelSpan RelSpan::from_seconds(std::int64_t s) {
    RelSpan span;
    span.years = static_cast<int>(s / kSecondsPerRelYear);
    s %= kSecondsPerRelYear;
    span.months = static_cast<int>(s / kSecondsPerRelMonth);
    s %= kSecondsPerRelMonth;
    span.days = static_cast<int>(s / 86400);
    s %= 86400;
    span.hours = static_cast<int>(s / 3600);
    s %= 3600;
    span.minutes = static_cast<int>(s / 60);
    span.seconds = static_cast<int>(s % 60);
    return span;
}

std::vector<std::string> encode_rel(double delta_s, Resolution r) {
    if (!std::isfinite(delta_s) || delta_s < 0.0)
        throw Error(ErrorKind::domain, fmt::format("relative span {} s must be finite and >= 0", delta_s));
    constexpr double ceiling = static_cast<double>((kMaxRelYears + 1) * kSecondsPerRelYear);
    if (delta_s >= ceiling)
        throw Error(ErrorKind::range,
                    fmt::format("relative span {} s reaches the {}-year token ceiling", delta_s,
                                kMaxRelYears + 1));
    const RelSpan span = RelSpan::from_seconds(static_cast<std::int64_t>(std::floor(delta_s)));
    const std::array<int, 6> fields = {span.years, span.months,  span.days,
                                       span.hours, span.minutes, span.seconds};
    std::vector<std::string> out;
    out.reserve(r.n_fields());
    for (std::size_t f = 0; f < r.n_fields(); ++f) out.push_back(field_token(f, fields[f], 2));
    return out;
}

std::int64_t decode_rel(std::span<const std::string> tokens, Resolution r) {
    check_arity(tokens, r);
    std::array<int, 6> fields{};
    for (std::size_t f = 0; f < r.n_fields(); ++f) fields[f] = parse_field_token(tokens[f], f, 2);
    return RelSpan{fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]}.total_seconds();
}

std::vector<std::string> calendar_abs_vocab(Resolution r, int year_lo, int year_hi) {
    std::vector<std::string> out;
    for (int y = year_lo; y <= year_hi; ++y) out.push_back(field_token(0, y, 4));
    for (int m = 1; m <= 12; ++m) out.push_back(field_token(1, m, 2));
    for (int d = 1; d <= 31; ++d) out.push_back(field_token(2, d, 2));
    const std::array<int, 3> limits = {24, 60, 60};
    for (std::size_t f = 3; f < r.n_fields(); ++f)
        for (int v = 0; v < limits[f - 3]; ++v) out.push_back(field_token(f, v, 2));
    return out;
}

std::vector<std::string> calendar_rel_vocab(Resolution r) {
    // Reachable values under greedy fixed units: months <= 12, days <= 29.
    const std::array<int, 6> limits = {kMaxRelYears + 1, 13, 30, 24, 60, 60};
    std::vector<std::string> out;
    for (std::size_t f = 0; f < r.n_fields(); ++f)
        for (int v = 0; v < limits[f]; ++v) out.push_back(field_token(f, v, 2));
    return out;
}

}  // namespace ttok
