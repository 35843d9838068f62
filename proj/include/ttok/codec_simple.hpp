#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace ttok {

// Numeric strings: fixed-point text handed to the host tokenizer as-is.

inline constexpr int kDefaultNumericPrecision = 6;
/// Estimated host-tokenizer fragments per numeric string, e.g. '0' '.' '437' '604'.
inline constexpr int kNumericTokenEstimate = 4;

/// Fixed-point rendering of v with exactly `precision` fractional digits,
/// rounding half to even on the exact binary value.
std::string encode_numeric(double v, int precision = kDefaultNumericPrecision);

/// Accepts `[0-9]+(\.[0-9]+)?`; throws PositionedError(parse) at the first
/// offending character.
double decode_numeric(std::string_view text);

// Byte tokens: the IEEE-754 single-precision bit pattern, least significant
// byte first. Little-endian is the only order under which the reference
// sequence [147, 13, 224, 62] denotes an interval that prints as 0.437604
// (bits 0x3EE00D93).

struct ByteToken {
    std::uint8_t value = 0;

    /// `<|byte_NNN|>`, zero-padded to three digits.
    std::string literal() const;
    static ByteToken parse(std::string_view literal);

    friend bool operator==(ByteToken, ByteToken) = default;
};

inline constexpr std::size_t kByteVocabSize = 256;

using ByteTokens = std::array<ByteToken, 4>;

/// Narrows v to float (round to nearest even) and splits its bits.
ByteTokens encode_bytes(double v);
ByteTokens encode_float_bits(std::uint32_t bits);

/// Exact inverse of encode_bytes. Throws Error(arity) unless exactly four
/// tokens are given and Error(decode_range) for NaN/infinite patterns.
float decode_bytes(std::span<const ByteToken> tokens);

}  // namespace ttok
