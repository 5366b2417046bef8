#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "mlsteg/bits.hpp"

namespace mlsteg::mls {

struct KeyMaterial {
    BitString key_bits;
};

/// XOR with keystream block_i = MD5(key_bytes || be64(i)), where key_bytes
/// are the key bits packed MSB-first with a zero-padded last byte. Length
/// preserving and its own inverse. Not a secure cipher.
///
/// Throws ParameterError on an empty key.
Bytes encipher(std::span<const std::uint8_t> message, const KeyMaterial& key);
Bytes decipher(std::span<const std::uint8_t> ciphertext, const KeyMaterial& key);

/// Ratio sentinel meaning "nothing goes to the lower level".
inline constexpr std::size_t kUpperOnly = std::numeric_limits<std::size_t>::max();

struct SplitParts {
    BitString upper;
    BitString lower;
};

/// Interleaved split: bit i goes to the lower part iff i mod (r + 1) == r.
/// r >= 1, or kUpperOnly. Throws ParameterError for r == 0.
SplitParts split_steg(const BitString& message, std::size_t r);

/// Inverse of split_steg. Throws ParameterError if the part sizes cannot come from one split.
BitString merge_steg(const BitString& upper, const BitString& lower, std::size_t r);

} // namespace mlsteg::mls
