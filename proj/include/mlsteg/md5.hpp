#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace mlsteg {

using Md5Digest = std::array<std::uint8_t, 16>;

Md5Digest md5(std::span<const std::uint8_t> data);
std::string to_hex(std::span<const std::uint8_t> bytes);

} // namespace mlsteg
