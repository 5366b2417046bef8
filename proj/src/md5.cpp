#include "mlsteg/md5.hpp"

#include <openssl/evp.h>

#include "mlsteg/errors.hpp"

namespace mlsteg {

Md5Digest md5(std::span<const std::uint8_t> data)
{
    Md5Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_md5(), nullptr) != 1 ||
        len != out.size()) {
        throw Error("MD5 computation failed");
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0x0f]);
    }
    return s;
}

} // namespace mlsteg
