#include "mlsteg/bits.hpp"

#include "mlsteg/errors.hpp"

namespace mlsteg {

BitString bits_from_string(std::string_view text)
{
    BitString bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw ParameterError("bit string may only contain '0' and '1'");
        }
        bits.push_back(c == '1');
    }
    return bits;
}

std::string to_string(const BitString& bits)
{
    std::string s;
    s.reserve(bits.size());
    for (bool b : bits) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

BitString bytes_to_bits(std::span<const std::uint8_t> bytes)
{
    BitString bits;
    bits.reserve(bytes.size() * 8);
    for (auto byte : bytes) {
        for (int i = 7; i >= 0; --i) {
            bits.push_back(((byte >> i) & 1U) != 0);
        }
    }
    return bits;
}

Bytes bits_to_bytes(const BitString& bits)
{
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
        }
    }
    return out;
}

void append_uint(BitString& out, std::uint64_t value, unsigned width)
{
    if (width > 64) {
        throw ParameterError("width exceeds 64 bits");
    }
    for (unsigned i = width; i-- > 0;) {
        out.push_back(((value >> i) & 1U) != 0);
    }
}

std::uint64_t read_uint(const BitString& bits, std::size_t offset, unsigned width)
{
    if (width > 64 || offset + width > bits.size()) {
        throw SizeError("read past end of bit string");
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
        v = (v << 1) | (bits[offset + i] ? 1U : 0U);
    }
    return v;
}

} // namespace mlsteg
