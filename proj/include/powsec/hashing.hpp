#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace powsec {

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const Digest& d);
/// Throws powsec::Error on malformed input.
Digest digest_from_hex(std::string_view hex);

Digest sha256(std::span<const std::uint8_t> bytes);

/// Cheap deterministic 256-bit mixer for tests: FNV-1a over the input seeds a
/// splitmix64 stream. Not collision resistant.
Digest test_hash(std::span<const std::uint8_t> bytes);

/// Hash function plus the size of its output space S = 2^bits. The PoW value
/// of a digest is its leading `bits` bits read big-endian.
class HashSpace {
  public:
    enum class Kind { Sha256, Test };

    HashSpace(Kind kind, unsigned bits);

    static HashSpace sha256(unsigned bits = 62) { return HashSpace(Kind::Sha256, bits); }
    static HashSpace test(unsigned bits = 24) { return HashSpace(Kind::Test, bits); }

    Kind kind() const noexcept { return kind_; }
    unsigned bits() const noexcept { return bits_; }
    std::uint64_t size() const noexcept { return std::uint64_t{1} << bits_; }

    Digest digest(std::span<const std::uint8_t> bytes) const;
    std::uint64_t value(const Digest& d) const noexcept;
    std::uint64_t value(std::span<const std::uint8_t> bytes) const { return value(digest(bytes)); }

    friend bool operator==(const HashSpace&, const HashSpace&) = default;

  private:
    Kind kind_;
    unsigned bits_;
};

}  // namespace powsec
