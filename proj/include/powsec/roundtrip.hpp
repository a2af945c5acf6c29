#pragma once

// Turns a simulated pair of chains into real header chains so the oracle and
// the futures can be exercised on data with a known price path.

#include <cstdint>

#include "powsec/header_chain.hpp"
#include "powsec/simulator.hpp"

namespace powsec {

struct HeaderPair {
    HeaderChain a;
    HeaderChain b;
    /// Common factor applied to every simulated difficulty before mining.
    /// Ratios of difficulties, and so oracle answers, are unaffected.
    double scale = 1.0;
};

/// Mines one header per simulated block with a Bounded(4) rule. Difficulties
/// are rescaled so the largest is `max_difficulty` hashes.
HeaderPair mine_header_pair(const sim::SimConfig& config, const sim::SimResult& result,
                            HashSpace space = HashSpace::test(24), double max_difficulty = 64.0,
                            std::uint64_t nonce_seed = 0);

/// Highest height whose header timestamp is at or before `timestamp`.
std::uint64_t height_at(const HeaderChain& chain, std::int64_t timestamp);

}  // namespace powsec
