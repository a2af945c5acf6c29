#include "powsec/header_chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "powsec/error.hpp"

namespace powsec {
namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

std::vector<std::uint8_t> BlockHeader::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(8 + 32 + 8 + 8 + 8);
    put_u64(out, height);
    out.insert(out.end(), prev_hash.begin(), prev_hash.end());
    put_u64(out, target);
    put_u64(out, nonce);
    put_u64(out, static_cast<std::uint64_t>(timestamp));
    return out;
}

Digest header_hash(const HashSpace& space, const BlockHeader& h) { return space.digest(h.serialize()); }

std::optional<std::uint64_t> DaaRule::expected(std::span<const BlockHeader> chain, std::uint64_t space_size) const {
    const BlockHeader& prev = chain.back();
    switch (kind) {
        case Kind::Fixed: return prev.target;
        case Kind::Bounded: return std::nullopt;
        case Kind::Window: {
            const std::uint64_t next_height = prev.height + 1;
            if (next_height % n != 0 || chain.size() <= n) return prev.target;
            const BlockHeader& first = chain[chain.size() - 1 - n];
            const __int128 want = static_cast<__int128>(n) * T;
            __int128 span = static_cast<__int128>(prev.timestamp) - first.timestamp;
            span = std::clamp<__int128>(span, std::max<__int128>(1, want / clamp), want * clamp);
            __int128 next = static_cast<__int128>(prev.target) * span / want;
            next = std::clamp<__int128>(next, 1, space_size);
            return static_cast<std::uint64_t>(next);
        }
    }
    return std::nullopt;
}

bool DaaRule::accepts(std::span<const BlockHeader> chain, std::uint64_t declared, std::uint64_t space_size) const {
    if (declared < 1 || declared > space_size) return false;
    if (kind == Kind::Bounded) {
        const std::uint64_t prev = chain.back().target;
        const __int128 lo = prev / clamp;
        const __int128 hi = static_cast<__int128>(prev) * clamp;
        return declared >= lo && declared <= hi;
    }
    return expected(chain, space_size) == declared;
}

const char* to_string(UpdateResult r) noexcept {
    switch (r) {
        case UpdateResult::Appended: return "Appended";
        case UpdateResult::BadLink: return "BadLink";
        case UpdateResult::BadPoW: return "BadPoW";
        case UpdateResult::BadDifficulty: return "BadDifficulty";
    }
    return "unknown";
}

HeaderChain::HeaderChain(HashSpace space, DaaRule rule, BlockHeader genesis) : space_(space), rule_(rule) {
    if (genesis.target < 1 || genesis.target > space_.size()) throw Error("genesis target outside [1, S]");
    if (rule_.kind == DaaRule::Kind::Window && (rule_.n < 1 || rule_.T < 1)) throw Error("invalid window DAA");
    if (rule_.clamp < 1) throw Error("DAA clamp must be >= 1");
    headers_.push_back(genesis);
}

HeaderChain HeaderChain::with_genesis(HashSpace space, DaaRule rule, std::uint64_t target, std::int64_t timestamp) {
    BlockHeader g;
    g.height = 0;
    g.target = target;
    g.timestamp = timestamp;
    return HeaderChain(space, rule, g);
}

std::optional<BlockHeader> HeaderChain::at(std::uint64_t h) const {
    const std::uint64_t base = headers_.front().height;
    if (h < base || h > height()) return std::nullopt;
    return headers_[h - base];
}

UpdateResult HeaderChain::validate(const BlockHeader& h) const {
    if (h.prev_hash != tip_hash() || h.height != height() + 1) return UpdateResult::BadLink;
    if (space_.value(header_hash(space_, h)) >= tip().target) return UpdateResult::BadPoW;
    if (!rule_.accepts(headers_, h.target, space_.size())) return UpdateResult::BadDifficulty;
    return UpdateResult::Appended;
}

UpdateResult HeaderChain::append(const BlockHeader& h) {
    const UpdateResult r = validate(h);
    if (r == UpdateResult::Appended) headers_.push_back(h);
    return r;
}

BlockHeader HeaderChain::mine_next(std::int64_t timestamp, std::uint64_t next_target, std::uint64_t nonce_start) const {
    BlockHeader h;
    h.height = height() + 1;
    h.prev_hash = tip_hash();
    h.target = next_target;
    h.timestamp = timestamp;
    const std::uint64_t goal = tip().target;
    for (std::uint64_t n = nonce_start;; ++n) {
        h.nonce = n;
        if (space_.value(header_hash(space_, h)) < goal) return h;
        if (n - nonce_start > (std::uint64_t{1} << 40)) throw Error("nonce search exhausted");
    }
}

std::uint64_t target_for(const HashSpace& space, double difficulty) {
    if (!(difficulty > 0.0)) throw Error("difficulty must be positive");
    const double S = static_cast<double>(space.size());
    return static_cast<std::uint64_t>(std::clamp(std::round(S / difficulty), 1.0, S));
}

HeaderChain mine_chain(HashSpace space, DaaRule rule, double genesis_difficulty, std::span<const MinedBlock> blocks,
                       std::uint64_t nonce_seed) {
    HeaderChain chain = HeaderChain::with_genesis(space, rule, target_for(space, genesis_difficulty),
                                                  blocks.empty() ? 0 : blocks.front().timestamp);
    for (const auto& b : blocks) {
        const BlockHeader h = chain.mine_next(b.timestamp, target_for(space, b.difficulty), nonce_seed);
        if (const UpdateResult r = chain.append(h); r != UpdateResult::Appended)
            throw Error(std::string("mined header rejected at height ") + std::to_string(h.height) + ": " + to_string(r));
        nonce_seed = nonce_seed * 0x9e3779b97f4a7c15ULL + h.nonce + 1;
    }
    return chain;
}

void write_headers_jsonl(const std::filesystem::path& path, std::span<const BlockHeader> headers) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& h : headers) {
        nlohmann::json j = {{"height", h.height},
                            {"prev_hash", to_hex(h.prev_hash)},
                            {"target", h.target},
                            {"nonce", h.nonce},
                            {"timestamp", h.timestamp}};
        out << j.dump() << '\n';
    }
}

std::vector<BlockHeader> read_headers_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string(), 0, "", "cannot open file");
    std::vector<BlockHeader> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            BlockHeader h;
            h.height = j.at("height").get<std::uint64_t>();
            h.prev_hash = digest_from_hex(j.at("prev_hash").get<std::string>());
            h.target = j.at("target").get<std::uint64_t>();
            h.nonce = j.at("nonce").get<std::uint64_t>();
            h.timestamp = j.at("timestamp").get<std::int64_t>();
            out.push_back(h);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path.string(), lineno, "", e.what());
        } catch (const Error& e) {
            throw InputError(path.string(), lineno, "prev_hash", e.what());
        }
    }
    return out;
}

}  // namespace powsec
