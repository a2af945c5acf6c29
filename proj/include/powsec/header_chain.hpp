#pragma once

// Light-client header chains: linkage, proof of work, and the target each
// header declares for its successor.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powsec/hashing.hpp"

namespace powsec {

/// `target` is the threshold the *next* header's hash must stay below;
/// genesis carries the starting target.
struct BlockHeader {
    std::uint64_t height = 0;
    Digest prev_hash{};
    std::uint64_t target = 0;
    std::uint64_t nonce = 0;
    std::int64_t timestamp = 0;

    /// Expected hashes per block at this target: S / target.
    double difficulty(const HashSpace& space) const { return static_cast<double>(space.size()) / target; }

    std::vector<std::uint8_t> serialize() const;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

Digest header_hash(const HashSpace& space, const BlockHeader& h);

/// Rule fixing the target a header may declare.
struct DaaRule {
    enum class Kind {
        Fixed,    ///< target never changes
        Window,   ///< retarget every n blocks from the timestamps, clamped
        Bounded,  ///< any target within a factor `clamp` of the previous one
    } kind = Kind::Fixed;
    std::uint32_t n = 1;
    std::int64_t T = 600;
    std::uint64_t clamp = 4;

    static DaaRule fixed() { return {Kind::Fixed, 1, 600, 4}; }
    static DaaRule window(std::uint32_t n, std::int64_t T, std::uint64_t clamp = 4) { return {Kind::Window, n, T, clamp}; }
    static DaaRule bounded(std::uint64_t clamp = 4) { return {Kind::Bounded, 1, 600, clamp}; }

    /// Whether `declared` is a legal target for the header following `chain`.
    bool accepts(std::span<const BlockHeader> chain, std::uint64_t declared, std::uint64_t space_size) const;
    /// The unique legal target for Fixed and Window; nullopt for Bounded.
    std::optional<std::uint64_t> expected(std::span<const BlockHeader> chain, std::uint64_t space_size) const;

    friend bool operator==(const DaaRule&, const DaaRule&) = default;
};

enum class UpdateResult { Appended, BadLink, BadPoW, BadDifficulty };

const char* to_string(UpdateResult r) noexcept;

class HeaderChain {
  public:
    HeaderChain(HashSpace space, DaaRule rule, BlockHeader genesis);

    /// Genesis at height 0 with the given starting target.
    static HeaderChain with_genesis(HashSpace space, DaaRule rule, std::uint64_t target, std::int64_t timestamp = 0);

    const HashSpace& space() const noexcept { return space_; }
    const DaaRule& rule() const noexcept { return rule_; }
    std::span<const BlockHeader> headers() const noexcept { return headers_; }
    const BlockHeader& tip() const { return headers_.back(); }
    std::uint64_t height() const { return headers_.back().height; }
    Digest tip_hash() const { return header_hash(space_, tip()); }

    /// Header at a height, or nullopt when it has not been mined yet.
    std::optional<BlockHeader> at(std::uint64_t height) const;

    /// Checks and, on success, appends. The chain is unchanged otherwise.
    UpdateResult validate(const BlockHeader& h) const;
    UpdateResult append(const BlockHeader& h);

    /// Brute-force a valid successor declaring `next_target`, starting the
    /// nonce search at `nonce_start`.
    BlockHeader mine_next(std::int64_t timestamp, std::uint64_t next_target, std::uint64_t nonce_start = 0) const;

    friend bool operator==(const HeaderChain&, const HeaderChain&) = default;

  private:
    HashSpace space_;
    DaaRule rule_;
    std::vector<BlockHeader> headers_;
};

struct MinedBlock {
    std::int64_t timestamp = 0;
    double difficulty = 0.0;  ///< hashes per block declared for the next block
};

/// Builds a valid chain whose headers declare the given difficulties, mining
/// each header for real. Cost is about one difficulty's worth of hashes per
/// block, so keep difficulties small.
HeaderChain mine_chain(HashSpace space, DaaRule rule, double genesis_difficulty, std::span<const MinedBlock> blocks,
                       std::uint64_t nonce_seed = 0);

/// Target for a difficulty, clamped to [1, S].
std::uint64_t target_for(const HashSpace& space, double difficulty);

/// JSON-lines header dump: height, prev_hash (hex), target, nonce, timestamp.
void write_headers_jsonl(const std::filesystem::path& path, std::span<const BlockHeader> headers);
std::vector<BlockHeader> read_headers_jsonl(const std::filesystem::path& path);

}  // namespace powsec
