#include "ttok/core.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "ttok/error.hpp"

namespace ttok {

using nlohmann::json;

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::missing_field: return "missing-field";
    case ErrorKind::domain: return "domain";
    case ErrorKind::range: return "range";
    case ErrorKind::invalid_date: return "invalid-date";
    case ErrorKind::malformed_token: return "malformed-token";
    case ErrorKind::arity: return "arity";
    case ErrorKind::level_order: return "level-order";
    case ErrorKind::decode_range: return "decode-range";
    case ErrorKind::grammar: return "grammar";
    case ErrorKind::schema: return "schema";
    case ErrorKind::version_mismatch: return "version-mismatch";
    case ErrorKind::checksum_mismatch: return "checksum-mismatch";
    case ErrorKind::unfitted: return "unfitted";
    case ErrorKind::unit_mismatch: return "unit-mismatch";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

std::string_view TimeUnit::name() const {
    switch (kind_) {
    case TimeUnitKind::second: return "second";
    case TimeUnitKind::hour: return "hour";
    case TimeUnitKind::day: return "day";
    case TimeUnitKind::week: return "week";
    case TimeUnitKind::month: return "month";
    }
    return "second";
}

std::optional<TimeUnit> TimeUnit::parse(std::string_view text) {
    if (text == "second") return TimeUnit{TimeUnitKind::second};
    if (text == "hour") return TimeUnit{TimeUnitKind::hour};
    if (text == "day") return TimeUnit{TimeUnitKind::day};
    if (text == "week") return TimeUnit{TimeUnitKind::week};
    if (text == "month") return TimeUnit{TimeUnitKind::month};
    return std::nullopt;
}

void EventSequence::validate() const {
    if (events.empty()) throw Error(ErrorKind::validation, "sequence has no events");
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (e.type_text.empty())
            throw Error(ErrorKind::validation, fmt::format("type_text[{}] is empty", i));
        if (!std::isfinite(e.interval_units) || e.interval_units < 0.0)
            throw Error(ErrorKind::validation,
                        fmt::format("interval[{}] = {} must be finite and >= 0", i, e.interval_units));
        if (i == 0 && e.interval_units != 0.0)
            throw Error(ErrorKind::validation,
                        fmt::format("interval[0] = {} but the first interval must be 0", e.interval_units));
        if (i > 0 && e.timestamp_s < events[i - 1].timestamp_s)
            throw Error(ErrorKind::validation,
                        fmt::format("timestamp[{}] = {} decreases from {}", i, e.timestamp_s,
                                    events[i - 1].timestamp_s));
    }
}

std::string_view to_string(Split split) {
    switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    }
    return "train";
}

std::optional<Split> parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "val") return Split::val;
    if (text == "test") return Split::test;
    return std::nullopt;
}

const std::vector<EventSequence>& Dataset::split(Split s) const {
    switch (s) {
    case Split::train: return train;
    case Split::val: return val;
    case Split::test: return test;
    }
    return train;
}

std::vector<EventSequence>& Dataset::split(Split s) {
    return const_cast<std::vector<EventSequence>&>(std::as_const(*this).split(s));
}

std::vector<double> Dataset::intervals(Split s) const {
    std::vector<double> out;
    for (const auto& seq : split(s))
        for (const auto& e : seq.events) out.push_back(e.interval_units);
    return out;
}

std::vector<std::int64_t> Dataset::timestamps(Split s) const {
    std::vector<std::int64_t> out;
    for (const auto& seq : split(s))
        for (const auto& e : seq.events) out.push_back(e.timestamp_s);
    return out;
}

namespace {

const json& require(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw PositionedError(ErrorKind::missing_field, line,
                              fmt::format("line {}: missing field '{}'", line, key));
    if (std::string_view(key) != "split" && !it->is_array())
        throw PositionedError(ErrorKind::parse, line,
                              fmt::format("line {}: field '{}' must be an array", line, key));
    return *it;
}

EventSequence parse_sequence(const json& obj, std::size_t line) {
    const json& types = require(obj, "type_text", line);
    const json& stamps = require(obj, "timestamp", line);
    const json& gaps = require(obj, "interval", line);
    if (types.size() != stamps.size() || types.size() != gaps.size())
        throw PositionedError(ErrorKind::validation, line,
                              fmt::format("line {}: type_text/timestamp/interval lengths differ ({}/{}/{})",
                                          line, types.size(), stamps.size(), gaps.size()));
    EventSequence seq;
    seq.events.reserve(types.size());
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (!types[i].is_string())
            throw PositionedError(ErrorKind::parse, line,
                                  fmt::format("line {}: type_text[{}] is not a string", line, i));
        if (!stamps[i].is_number_integer())
            throw PositionedError(ErrorKind::parse, line,
                                  fmt::format("line {}: timestamp[{}] is not an integer", line, i));
        if (!gaps[i].is_number())
            throw PositionedError(ErrorKind::parse, line,
                                  fmt::format("line {}: interval[{}] is not a number", line, i));
        seq.events.push_back(Event{types[i].get<std::string>(), stamps[i].get<std::int64_t>(),
                                   gaps[i].get<double>()});
    }
    try {
        seq.validate();
    } catch (const Error& e) {
        throw PositionedError(e.kind(), line, fmt::format("line {}: {}", line, e.what()));
    }
    return seq;
}

}  // namespace

EventSequence parse_sequence_json(std::string_view text) {
    json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        throw PositionedError(ErrorKind::parse, 1, "line 1: malformed JSON object");
    return parse_sequence(obj, 1);
}

Dataset parse_dataset(std::string_view text, TimeUnit unit, std::string name) {
    Dataset d;
    d.name = std::move(name);
    d.unit = unit;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw PositionedError(ErrorKind::parse, line_no,
                                  fmt::format("line {}: malformed JSON object", line_no));
        auto split_it = obj.find("split");
        if (split_it == obj.end())
            throw PositionedError(ErrorKind::missing_field, line_no,
                                  fmt::format("line {}: missing field 'split'", line_no));
        if (!split_it->is_string())
            throw PositionedError(ErrorKind::parse, line_no,
                                  fmt::format("line {}: 'split' must be a string", line_no));
        auto split = parse_split(split_it->get<std::string>());
        if (!split)
            throw PositionedError(ErrorKind::validation, line_no,
                                  fmt::format("line {}: unknown split '{}'", line_no,
                                              split_it->get<std::string>()));
        d.split(*split).push_back(parse_sequence(obj, line_no));
    }
    return d;
}

Dataset load_dataset(const std::filesystem::path& path, TimeUnit unit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str(), unit, path.stem().string());
}

std::string serialize_dataset(const Dataset& d) {
    std::string out;
    for (Split s : {Split::train, Split::val, Split::test}) {
        for (const auto& seq : d.split(s)) {
            json types = json::array(), stamps = json::array(), gaps = json::array();
            for (const auto& e : seq.events) {
                types.push_back(e.type_text);
                stamps.push_back(e.timestamp_s);
                gaps.push_back(e.interval_units);
            }
            json obj = json::object();
            obj["split"] = std::string(to_string(s));
            obj["type_text"] = std::move(types);
            obj["timestamp"] = std::move(stamps);
            obj["interval"] = std::move(gaps);
            out += obj.dump();
            out += '\n';
        }
    }
    return out;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, fmt::format("cannot write '{}'", path.string()));
    out << serialize_dataset(d);
}

DatasetStats dataset_stats(const Dataset& d) {
    DatasetStats st;
    std::set<std::string_view> types;
    st.train = d.train.size();
    st.val = d.val.size();
    st.test = d.test.size();
    for (Split s : {Split::train, Split::val, Split::test}) {
        for (const auto& seq : d.split(s)) {
            st.n_events += seq.size();
            for (const auto& e : seq.events) types.insert(e.type_text);
        }
    }
    st.n_seqs = st.train + st.val + st.test;
    st.n_types = types.size();
    if (st.n_seqs == 0) {
        st.warnings.push_back("dataset has no sequences; avg_seq_len reported as 0");
    } else {
        st.avg_seq_len = static_cast<double>(st.n_events) / static_cast<double>(st.n_seqs);
    }
    return st;
}

std::string format_stats(const DatasetStats& st, const Dataset& d) {
    std::string out;
    out += fmt::format("{:<20} {:>7} {:>10} {:>8} {:>18} {:>8} {:>6}\n", "Dataset", "Types", "Events",
                       "Seqs", "Train/Val/Test", "Seq Len", "Unit");
    out += fmt::format("{:<20} {:>7} {:>10} {:>8} {:>18} {:>8.2f} {:>6}\n", d.name, st.n_types,
                       st.n_events, st.n_seqs, fmt::format("{}/{}/{}", st.train, st.val, st.test),
                       st.avg_seq_len, d.unit.name());
    for (const auto& w : st.warnings) out += fmt::format("warning: {}\n", w);
    return out;
}

std::vector<ConsistencyWarning> validate_consistency(const EventSequence& seq, TimeUnit unit,
                                                     double tol) {
    if (!(tol >= 0.0)) throw Error(ErrorKind::invalid_parameter, "tolerance must be >= 0");
    const double spu = unit.seconds_per_unit();
    std::vector<ConsistencyWarning> warnings;
    for (std::size_t i = 1; i < seq.events.size(); ++i) {
        const double delta_s =
            static_cast<double>(seq.events[i].timestamp_s - seq.events[i - 1].timestamp_s);
        const double stated_s = seq.events[i].interval_units * spu;
        if (std::abs(stated_s - delta_s) > tol * spu) {
            ConsistencyWarning w;
            w.event_index = i;
            w.interval_units = seq.events[i].interval_units;
            w.timestamp_delta_units = delta_s / spu;
            w.message = fmt::format("event {}: interval {} {}s but timestamps differ by {} {}s", i,
                                    w.interval_units, unit.name(), w.timestamp_delta_units,
                                    unit.name());
            warnings.push_back(std::move(w));
        }
    }
    return warnings;
}

}  // namespace ttok
