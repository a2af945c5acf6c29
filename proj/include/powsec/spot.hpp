#pragma once

// Spot hash-price contract. A puzzle in chain B's hash function pays a fixed
// reward in coin A; its target rises every N host blocks until someone
// solves it, so the target at which it is solved prices one B-hash in units
// of A-hashes.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "powsec/hashing.hpp"
#include "powsec/header_chain.hpp"

namespace powsec {

struct SpotParams {
    std::uint64_t j = 16;      ///< step divisor: a solved target g yields step g / j
    double alpha = 0.5;        ///< next epoch starts at alpha * g
    std::uint64_t N = 10;      ///< host blocks per round
    double R = 1.0;            ///< reward per solve, coins A
    double k_A = 1.0;          ///< coins A per host block
    std::uint64_t initial_target = 0;  ///< 0 means the whole hash space

    void validate() const;

    friend bool operator==(const SpotParams&, const SpotParams&) = default;
};

/// Bookkeeping of one finished epoch. `start + (rounds - 1) * step` is the
/// target the solution beat, unless the long-stall clamp kicked in.
struct SpotEpoch {
    std::uint64_t start = 0;
    std::uint64_t step = 0;
    std::uint64_t rounds = 1;
    std::uint64_t solved = 0;
    std::uint64_t prev_solved = 0;  ///< 0 for the first epoch

    std::uint64_t reconstructed() const { return start + (rounds - 1) * step; }

    friend bool operator==(const SpotEpoch&, const SpotEpoch&) = default;
};

class Spot {
  public:
    Spot(SpotParams params, HashSpace puzzle_space, const HeaderChain& host);

    const SpotParams& params() const noexcept { return params_; }
    const HashSpace& puzzle_space() const noexcept { return space_; }
    std::uint64_t round() const noexcept { return r_; }
    std::uint64_t target() const noexcept { return g_; }
    std::uint64_t step() const noexcept { return step_; }
    std::uint64_t epoch_start() const noexcept { return start_; }
    std::uint64_t last_height() const noexcept { return b_A_; }
    double fees() const noexcept { return fees_; }
    std::size_t solves() const noexcept { return solves_; }
    const SpotEpoch& last_epoch() const noexcept { return last_; }
    const std::map<std::string, double>& credits() const noexcept { return credits_; }

    /// Puzzle value of (host tip hash, nonce, payout address).
    std::uint64_t puzzle_value(const HeaderChain& host, std::uint64_t nonce, const std::string& addr) const;

    /// Returns true and closes the epoch when the solution beats the current
    /// target; anything else is a silent no-op.
    bool solve(const std::string& addr, std::uint64_t nonce, const HeaderChain& host);

    /// Called once per host block. Returns true when a new round begins.
    bool update(const HeaderChain& host);

    /// Records the fee and reports sigma_A / sigma_B from the last epoch.
    double query(double fee, const HeaderChain& host);
    /// Same value without touching state.
    double peek(const HeaderChain& host) const;

    friend bool operator==(const Spot&, const Spot&) = default;

  private:
    SpotParams params_;
    HashSpace space_;
    std::uint64_t r_ = 1;
    std::uint64_t g_ = 0;
    std::uint64_t step_ = 0;
    std::uint64_t start_ = 0;
    std::uint64_t b_A_ = 0;
    double fees_ = 0.0;
    std::size_t solves_ = 0;
    SpotEpoch last_;
    std::map<std::string, double> credits_;
};

/// Host chain plus contract, driven by a replayable event log.
struct SpotSession {
    struct HostBlock {
        BlockHeader header;
    };
    struct Solve {
        std::string addr;
        std::uint64_t nonce = 0;
    };
    struct Query {
        double fee = 0.0;
    };
    using Event = std::variant<HostBlock, Solve, Query>;

    HeaderChain host;
    Spot spot;
    std::vector<Event> log;

    SpotSession(HeaderChain host_genesis, SpotParams params, HashSpace puzzle_space);

    /// Host blocks that fail validation are rejected with a powsec::Error.
    void apply(const Event& e);
    /// Mines and applies the next host block; the header is recorded in the log.
    void advance_host(std::int64_t timestamp, std::uint64_t nonce_start = 0);
    /// Tries nonces [from, from + count) and applies the first valid one.
    bool grind(const std::string& addr, std::uint64_t from, std::uint64_t count);

    static SpotSession replay(const HeaderChain& host_genesis, SpotParams params, HashSpace puzzle_space,
                              std::span<const Event> log);

    bool same_state(const SpotSession& other) const { return host == other.host && spot == other.spot; }
};

struct RationalEpoch {
    std::uint64_t threshold = 0;  ///< smallest target the miner accepts
    std::uint64_t solved = 0;
    std::uint64_t step = 0;
    double reported = 0.0;
};

/// Miner who solves only once the puzzle pays at least what its hash earns
/// elsewhere, with sigma_A / sigma_B = rho. Warm-up epochs that open above
/// the break-even target are skipped. The host target is a quarter of the
/// hash space.
std::vector<RationalEpoch> rational_miner_epochs(const SpotParams& params, double rho, std::size_t epochs,
                                                 std::uint64_t seed, unsigned space_bits = 24);

struct ManipulationStats {
    double mean_rounds = 0.0;
    double mean_reported = 0.0;
    std::vector<std::uint64_t> rounds;
    std::vector<double> reported;
};

/// Runs `epochs` independent epochs, each from the same state left by a solve
/// at `reference_target`, against an attacker grinding `hashes_per_block`
/// puzzle hashes per host block. Per-epoch seeds depend only on `seed`, so
/// runs with different hash rates are paired.
ManipulationStats manipulation_epochs(const SpotParams& params, std::uint64_t reference_target,
                                      std::uint64_t hashes_per_block, std::size_t epochs, std::uint64_t seed,
                                      unsigned space_bits = 24);

}  // namespace powsec
