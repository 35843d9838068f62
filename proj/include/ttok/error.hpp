#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ttok {

/// Error categories shared by every module. The CLI maps them onto exit codes
/// and prints `error[<kind>]: <message>` on a single line.
enum class ErrorKind {
    parse,
    validation,
    missing_field,
    domain,
    range,
    invalid_date,
    malformed_token,
    arity,
    level_order,
    decode_range,
    grammar,
    schema,
    version_mismatch,
    checksum_mismatch,
    unfitted,
    unit_mismatch,
    invalid_parameter,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// An error tied to a position: a line number for JSONL input, a character
/// offset for numeric strings, a token offset for streams.
class PositionedError : public Error {
public:
    PositionedError(ErrorKind kind, std::size_t position, const std::string& message)
        : Error(kind, message), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace ttok
