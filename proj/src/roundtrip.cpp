#include "powsec/roundtrip.hpp"

#include <algorithm>
#include <cmath>

namespace powsec {

HeaderPair mine_header_pair(const sim::SimConfig& config, const sim::SimResult& result, HashSpace space,
                            double max_difficulty, std::uint64_t nonce_seed) {
    if (!(max_difficulty >= 1.0)) throw Error("max_difficulty must be >= 1");
    double top = 0.0;
    for (const auto& blocks : result.blocks)
        for (const auto& b : blocks) top = std::max({top, b.difficulty, b.next_difficulty});
    if (result.blocks[0].empty() || result.blocks[1].empty()) throw Error("simulation produced no blocks on a chain");
    const double scale = max_difficulty / top;

    std::array<std::vector<MinedBlock>, 2> mined;
    for (int x = 0; x < 2; ++x)
        for (const auto& b : result.blocks[x])
            mined[x].push_back({config.epoch + static_cast<std::int64_t>(std::floor(b.time)), b.next_difficulty * scale});

    const DaaRule rule = DaaRule::bounded(4);
    HeaderChain a = mine_chain(space, rule, result.blocks[0].front().difficulty * scale, mined[0], nonce_seed);
    HeaderChain b = mine_chain(space, rule, result.blocks[1].front().difficulty * scale, mined[1], nonce_seed + 1);
    return {std::move(a), std::move(b), scale};
}

std::uint64_t height_at(const HeaderChain& chain, std::int64_t timestamp) {
    const auto headers = chain.headers();
    const auto it = std::upper_bound(headers.begin(), headers.end(), timestamp,
                                     [](std::int64_t t, const BlockHeader& h) { return t < h.timestamp; });
    if (it == headers.begin()) throw Error("no header at or before timestamp " + std::to_string(timestamp));
    return std::prev(it)->height;
}

}  // namespace powsec
