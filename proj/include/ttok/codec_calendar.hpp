#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ttok {

enum class ResolutionKind { day, hour, minute, second };

/// How many calendar fields are emitted: day=3 (y/m/d) up to second=6.
struct Resolution {
    ResolutionKind kind = ResolutionKind::second;

    constexpr std::size_t n_fields() const { return static_cast<std::size_t>(kind) + 3; }

    std::string_view name() const;
    static std::optional<Resolution> parse(std::string_view text);

    friend constexpr bool operator==(Resolution, Resolution) = default;
};

/// Supported absolute window: [1900-01-01, 2200-01-01) UTC.
inline constexpr std::int64_t kMinEpoch = -2208988800;
inline constexpr std::int64_t kMaxEpochExclusive = 7258118400;

struct CivilTime {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;
    unsigned hour = 0;
    unsigned minute = 0;
    unsigned second = 0;

    friend bool operator==(const CivilTime&, const CivilTime&) = default;
};

/// Throws Error(range) outside the supported window.
CivilTime civil_from_epoch(std::int64_t t);

/// Throws Error(invalid_date) for impossible fields (Feb 30, hour 24, ...).
std::int64_t epoch_from_civil(const CivilTime& c);

/// `<|year_YYYY|>` `<|month_MM|>` `<|day_DD|>` then hour/min/sec as the
/// resolution allows.
std::vector<std::string> encode_abs(std::int64_t t, Resolution r);

/// Fields below the resolution are filled with their minimum (day 1, 0 h...).
std::int64_t decode_abs(std::span<const std::string> tokens, Resolution r);

// Relative spans use fixed units: year = 365 days, month = 30 days,
// decomposed greedily from the largest unit.

inline constexpr std::int64_t kSecondsPerRelYear = 365LL * 86400;
inline constexpr std::int64_t kSecondsPerRelMonth = 30LL * 86400;
inline constexpr int kMaxRelYears = 99;

struct RelSpan {
    int years = 0;
    int months = 0;
    int days = 0;
    int hours = 0;
    int minutes = 0;
    int seconds = 0;

    std::int64_t total_seconds() const;
    static RelSpan from_seconds(std::int64_t seconds);
};

/// Floors delta_s to whole seconds, then drops fields below the resolution.
/// Throws Error(range) at 100 fixed years or more.
std::vector<std::string> encode_rel(double delta_s, Resolution r);
std::int64_t decode_rel(std::span<const std::string> tokens, Resolution r);

/// Vocabulary for a fitted absolute calendar: years [year_lo, year_hi].
std::vector<std::string> calendar_abs_vocab(Resolution r, int year_lo, int year_hi);
std::vector<std::string> calendar_rel_vocab(Resolution r);

}  // namespace ttok
