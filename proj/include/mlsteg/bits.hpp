#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlsteg {

using Bytes = std::vector<std::uint8_t>;

/// Ordered bit sequence; element 0 is transmitted first.
using BitString = std::vector<bool>;

/// Parses a string of '0'/'1' characters. Throws ParameterError on any other character.
BitString bits_from_string(std::string_view text);
std::string to_string(const BitString& bits);

/// Unpacks bytes most significant bit first.
BitString bytes_to_bits(std::span<const std::uint8_t> bytes);

/// Packs bits most significant bit first; a trailing partial byte is zero-padded.
Bytes bits_to_bytes(const BitString& bits);

/// Appends the low `width` bits of `value`, most significant first.
void append_uint(BitString& out, std::uint64_t value, unsigned width);

/// Reads `width` bits starting at `offset` as a big-endian unsigned integer.
std::uint64_t read_uint(const BitString& bits, std::size_t offset, unsigned width);

} // namespace mlsteg
