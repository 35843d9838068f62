#include "ttok/codec_simple.hpp"

#include <bit>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "ttok/error.hpp"

namespace ttok {

std::string encode_numeric(double v, int precision) {
    if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorKind::domain, fmt::format("numeric value {} must be finite and >= 0", v));
    if (precision < 0 || precision > 17)
        throw Error(ErrorKind::invalid_parameter,
                    fmt::format("numeric precision {} outside [0, 17]", precision));
    // 309 integer digits + point + 17 decimals covers every finite double.
    char buf[352];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

double decode_numeric(std::string_view text) {
    std::size_t i = 0;
    auto digits = [&] {
        const std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        return i > start;
    };
    if (!digits())
        throw PositionedError(ErrorKind::parse, i,
                              fmt::format("numeric string '{}': expected digit at offset {}", text, i));
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (!digits())
            throw PositionedError(ErrorKind::parse, i,
                                  fmt::format("numeric string '{}': expected digit at offset {}", text, i));
    }
    if (i != text.size())
        throw PositionedError(ErrorKind::parse, i,
                              fmt::format("numeric string '{}': unexpected character at offset {}", text, i));
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::fixed);
    if (res.ec != std::errc{})
        throw PositionedError(ErrorKind::parse, 0, fmt::format("numeric string '{}' out of range", text));
    return v;
}

std::string ByteToken::literal() const { return fmt::format("<|byte_{:03}|>", value); }

ByteToken ByteToken::parse(std::string_view lit) {
    constexpr std::string_view prefix = "<|byte_", suffix = "|>";
    if (lit.size() != prefix.size() + 3 + suffix.size() || !lit.starts_with(prefix) ||
        !lit.ends_with(suffix))
        throw Error(ErrorKind::malformed_token, fmt::format("'{}' is not a byte token", lit));
    unsigned value = 0;
    const char* first = lit.data() + prefix.size();
    auto res = std::from_chars(first, first + 3, value);
    if (res.ec != std::errc{} || res.ptr != first + 3 || value > 255)
        throw Error(ErrorKind::malformed_token, fmt::format("'{}' is not a byte token", lit));
    return ByteToken{static_cast<std::uint8_t>(value)};
}

ByteTokens encode_float_bits(std::uint32_t bits) {
    return {ByteToken{static_cast<std::uint8_t>(bits & 0xFFu)},
            ByteToken{static_cast<std::uint8_t>((bits >> 8) & 0xFFu)},
            ByteToken{static_cast<std::uint8_t>((bits >> 16) & 0xFFu)},
            ByteToken{static_cast<std::uint8_t>((bits >> 24) & 0xFFu)}};
}

ByteTokens encode_bytes(double v) {
    if (!std::isfinite(v))
        throw Error(ErrorKind::domain, fmt::format("byte codec input {} is not finite", v));
    const float f = static_cast<float>(v);
    if (!std::isfinite(f))
        throw Error(ErrorKind::domain, fmt::format("byte codec input {} overflows float32", v));
    return encode_float_bits(std::bit_cast<std::uint32_t>(f));
}

float decode_bytes(std::span<const ByteToken> tokens) {
    if (tokens.size() != 4)
        throw Error(ErrorKind::arity, fmt::format("byte codec needs 4 tokens, got {}", tokens.size()));
    const std::uint32_t bits = std::uint32_t{tokens[0].value} | (std::uint32_t{tokens[1].value} << 8) |
                               (std::uint32_t{tokens[2].value} << 16) |
                               (std::uint32_t{tokens[3].value} << 24);
    const float f = std::bit_cast<float>(bits);
    if (!std::isfinite(f))
        throw Error(ErrorKind::decode_range,
                    fmt::format("byte tokens decode to non-finite pattern 0x{:08X}", bits));
    return f;
}

}  // namespace ttok
