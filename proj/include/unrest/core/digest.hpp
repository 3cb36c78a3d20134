#pragma once

#include <openssl/evp.h>

#include <memory>
#include <string>
#include <string_view>

#include "unrest/core/error.hpp"

namespace unrest {

namespace detail {

inline std::string evp_hex_digest(const EVP_MD* md, std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out, &len) != 1)
        throw Error("digest computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string s(2 * len, '0');
    for (unsigned i = 0; i < len; ++i) {
        s[2 * i] = hex[out[i] >> 4];
        s[2 * i + 1] = hex[out[i] & 0xF];
    }
    return s;
}

} // namespace detail

inline std::string md5_hex(std::string_view bytes) { return detail::evp_hex_digest(EVP_md5(), bytes); }
inline std::string sha256_hex(std::string_view bytes) { return detail::evp_hex_digest(EVP_sha256(), bytes); }

} // namespace unrest
