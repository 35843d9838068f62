#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ttok {

enum class TimeUnitKind { second, hour, day, week, month };

/// Unit attached to the precomputed intervals of a dataset. A month is a
/// fixed 30 days.
class TimeUnit {
public:
    constexpr TimeUnit() = default;
    constexpr explicit TimeUnit(TimeUnitKind kind) : kind_(kind) {}

    constexpr TimeUnitKind kind() const { return kind_; }

    constexpr double seconds_per_unit() const {
        switch (kind_) {
        case TimeUnitKind::second: return 1.0;
        case TimeUnitKind::hour: return 3600.0;
        case TimeUnitKind::day: return 86400.0;
        case TimeUnitKind::week: return 604800.0;
        case TimeUnitKind::month: return 2592000.0;
        }
        return 1.0;
    }

    std::string_view name() const;

    /// Parses "second", "hour", "day", "week" or "month".
    static std::optional<TimeUnit> parse(std::string_view text);

    friend constexpr bool operator==(TimeUnit, TimeUnit) = default;

private:
    TimeUnitKind kind_ = TimeUnitKind::second;
};

struct Event {
    std::string type_text;
    std::int64_t timestamp_s = 0;
    double interval_units = 0.0;
};

struct EventSequence {
    std::vector<Event> events;

    std::size_t size() const { return events.size(); }

    /// Throws Error(validation) when an invariant is broken: empty sequence,
    /// empty type, negative or non-finite interval, decreasing timestamps,
    /// or a non-zero first interval.
    void validate() const;
};

enum class Split { train, val, test };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

struct Dataset {
    std::string name;
    TimeUnit unit;
    std::vector<EventSequence> train;
    std::vector<EventSequence> val;
    std::vector<EventSequence> test;

    const std::vector<EventSequence>& split(Split s) const;
    std::vector<EventSequence>& split(Split s);

    /// Interval values of every event in a split, in file order.
    std::vector<double> intervals(Split s) const;
    std::vector<std::int64_t> timestamps(Split s) const;
};

struct DatasetStats {
    std::size_t n_types = 0;
    std::size_t n_events = 0;
    std::size_t n_seqs = 0;
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    double avg_seq_len = 0.0;
    std::vector<std::string> warnings;
};

/// One sequence object as found on a dataset line; `split` is not required.
EventSequence parse_sequence_json(std::string_view text);

Dataset load_dataset(const std::filesystem::path& path, TimeUnit unit);

/// Parses JSONL text. `name` is used in messages and as Dataset::name.
Dataset parse_dataset(std::string_view text, TimeUnit unit, std::string name = "dataset");

/// One JSON object per sequence, splits written in train, val, test order.
std::string serialize_dataset(const Dataset& d);
void save_dataset(const Dataset& d, const std::filesystem::path& path);

DatasetStats dataset_stats(const Dataset& d);

/// Table-style rendering with avg_seq_len at two decimals.
std::string format_stats(const DatasetStats& stats, const Dataset& d);

struct ConsistencyWarning {
    std::size_t event_index = 0;
    double interval_units = 0.0;
    double timestamp_delta_units = 0.0;
    std::string message;
};

/// Compares each interval with the timestamp difference it should encode.
/// Mismatches beyond `tol` units are reported, not thrown.
std::vector<ConsistencyWarning> validate_consistency(const EventSequence& seq, TimeUnit unit,
                                                     double tol);

}  // namespace ttok
