#include "powsec/hashing.hpp"

#include <openssl/evp.h>

#include <memory>

#include "powsec/error.hpp"

namespace powsec {

std::string to_hex(const Digest& d) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : d) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Digest digest_from_hex(std::string_view hex) {
    if (hex.size() != 64) throw Error("digest must be 64 hex characters");
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(std::string("invalid hex character '") + c + "'");
    };
    Digest d{};
    for (std::size_t i = 0; i < 32; ++i) d[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return d;
}

Digest sha256(std::span<const std::uint8_t> bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    Digest out{};
    unsigned len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
        throw Error("SHA-256 failed");
    return out;
}

Digest test_hash(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    Digest out{};
    std::uint64_t state = h;
    for (std::size_t w = 0; w < 4; ++w) {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        for (std::size_t i = 0; i < 8; ++i) out[w * 8 + i] = static_cast<std::uint8_t>(z >> (56 - 8 * i));
    }
    return out;
}

HashSpace::HashSpace(Kind kind, unsigned bits) : kind_(kind), bits_(bits) {
    if (bits < 1 || bits > 62) throw Error("hash space must have between 1 and 62 bits");
}

Digest HashSpace::digest(std::span<const std::uint8_t> bytes) const {
    return kind_ == Kind::Sha256 ? powsec::sha256(bytes) : test_hash(bytes);
}

std::uint64_t HashSpace::value(const Digest& d) const noexcept {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = v << 8 | d[i];
    return v >> (64 - bits_);
}

}  // namespace powsec
