#include "mlsteg/services.hpp"

#include "mlsteg/errors.hpp"
#include "mlsteg/md5.hpp"

namespace mlsteg::mls {

Bytes encipher(std::span<const std::uint8_t> message, const KeyMaterial& key)
{
    if (key.key_bits.empty()) {
        throw ParameterError("cipher key must not be empty");
    }
    Bytes block_in = bits_to_bytes(key.key_bits);
    const auto key_len = block_in.size();
    block_in.resize(key_len + 8);

    Bytes out(message.begin(), message.end());
    Md5Digest ks{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i % ks.size() == 0) {
            const std::uint64_t counter = i / ks.size();
            for (int b = 0; b < 8; ++b) {
                block_in[key_len + static_cast<std::size_t>(b)] =
                    static_cast<std::uint8_t>(counter >> (56 - 8 * b));
            }
            ks = md5(block_in);
        }
        out[i] ^= ks[i % ks.size()];
    }
    return out;
}

Bytes decipher(std::span<const std::uint8_t> ciphertext, const KeyMaterial& key)
{
    return encipher(ciphertext, key);
}

SplitParts split_steg(const BitString& message, std::size_t r)
{
    if (r == 0) {
        throw ParameterError("split ratio must be >= 1");
    }
    SplitParts p;
    if (r == kUpperOnly) {
        p.upper = message;
        return p;
    }
    for (std::size_t i = 0; i < message.size(); ++i) {
        (i % (r + 1) == r ? p.lower : p.upper).push_back(message[i]);
    }
    return p;
}

BitString merge_steg(const BitString& upper, const BitString& lower, std::size_t r)
{
    if (r == 0) {
        throw ParameterError("split ratio must be >= 1");
    }
    if (r == kUpperOnly) {
        if (!lower.empty()) {
            throw ParameterError("upper-only split cannot have lower bits");
        }
        return upper;
    }
    const auto n = upper.size() + lower.size();
    if (n / (r + 1) != lower.size()) {
        throw ParameterError("part sizes are inconsistent with ratio " + std::to_string(r));
    }
    BitString out;
    out.reserve(n);
    std::size_t u = 0;
    std::size_t l = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(i % (r + 1) == r ? lower[l++] : upper[u++]);
    }
    return out;
}

} // namespace mlsteg::mls
