#include "powsec/spot.hpp"

#include <algorithm>
#include <cmath>

#include "powsec/error.hpp"

namespace powsec {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t scale_target(double alpha, std::uint64_t g) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(alpha * static_cast<double>(g))));
}

HeaderChain host_genesis(unsigned bits, std::uint64_t seed) {
    const HashSpace space = HashSpace::test(bits);
    return HeaderChain::with_genesis(space, DaaRule::fixed(), space.size() / 4, static_cast<std::int64_t>(seed >> 16));
}

}  // namespace

void SpotParams::validate() const {
    if (j < 1) throw Error("spot: j must be >= 1");
    if (!(alpha > 0.0) || alpha > 1.0) throw Error("spot: alpha must be in (0, 1]");
    if (N < 1) throw Error("spot: N must be >= 1");
    if (!(R > 0.0) || !std::isfinite(R)) throw Error("spot: reward must be positive");
    if (!(k_A > 0.0) || !std::isfinite(k_A)) throw Error("spot: k_A must be positive");
}

Spot::Spot(SpotParams params, HashSpace puzzle_space, const HeaderChain& host)
    : params_(params), space_(puzzle_space) {
    params_.validate();
    const std::uint64_t S = space_.size();
    if (params_.initial_target > S) throw Error("spot: initial target exceeds the hash space");
    g_ = params_.initial_target == 0 ? S : params_.initial_target;
    start_ = g_;
    step_ = std::max<std::uint64_t>(1, g_ / params_.j);
    b_A_ = host.height();
    last_ = SpotEpoch{g_, step_, 1, g_, 0};
}

std::uint64_t Spot::puzzle_value(const HeaderChain& host, std::uint64_t nonce, const std::string& addr) const {
    const Digest tip = host.tip_hash();
    std::vector<std::uint8_t> bytes(tip.begin(), tip.end());
    for (int i = 7; i >= 0; --i) bytes.push_back(static_cast<std::uint8_t>(nonce >> (8 * i)));
    bytes.insert(bytes.end(), addr.begin(), addr.end());
    return space_.value(bytes);
}

bool Spot::solve(const std::string& addr, std::uint64_t nonce, const HeaderChain& host) {
    if (puzzle_value(host, nonce, addr) >= g_) return false;
    last_ = SpotEpoch{start_, step_, r_, g_, solves_ == 0 ? 0 : last_.solved};
    r_ = 1;
    step_ = std::max<std::uint64_t>(1, g_ / params_.j);
    g_ = scale_target(params_.alpha, g_);
    start_ = g_;
    credits_[addr] += params_.R;
    b_A_ = host.height();
    ++solves_;
    return true;
}

bool Spot::update(const HeaderChain& host) {
    if (host.height() <= b_A_ + params_.N) return false;
    b_A_ = host.height();
    ++r_;
    g_ = std::min(space_.size(), g_ + step_);
    return true;
}

double Spot::peek(const HeaderChain& host) const {
    const std::uint64_t solved = std::min(last_.reconstructed(), space_.size());
    return params_.k_A * static_cast<double>(host.tip().target) / (params_.R * static_cast<double>(solved));
}

double Spot::query(double fee, const HeaderChain& host) {
    if (!(fee >= 0.0) || !std::isfinite(fee)) throw Error("spot: fee must be >= 0");
    fees_ += fee;
    return peek(host);
}

SpotSession::SpotSession(HeaderChain host_genesis, SpotParams params, HashSpace puzzle_space)
    : host(std::move(host_genesis)), spot(params, puzzle_space, host) {}

void SpotSession::apply(const Event& e) {
    if (const auto* hb = std::get_if<HostBlock>(&e)) {
        const UpdateResult res = host.append(hb->header);
        if (res != UpdateResult::Appended)
            throw Error(std::string("host block rejected: ") + to_string(res) + " at height " + std::to_string(hb->header.height));
        spot.update(host);
    } else if (const auto* s = std::get_if<Solve>(&e)) {
        spot.solve(s->addr, s->nonce, host);
    } else {
        spot.query(std::get<Query>(e).fee, host);
    }
    log.push_back(e);
}

void SpotSession::advance_host(std::int64_t timestamp, std::uint64_t nonce_start) {
    const std::uint64_t next = host.rule().expected(host.headers(), host.space().size()).value_or(host.tip().target);
    apply(HostBlock{host.mine_next(timestamp, next, nonce_start)});
}

bool SpotSession::grind(const std::string& addr, std::uint64_t from, std::uint64_t count) {
    for (std::uint64_t n = from; n - from < count; ++n) {
        if (spot.puzzle_value(host, n, addr) < spot.target()) {
            apply(Solve{addr, n});
            return true;
        }
    }
    return false;
}

SpotSession SpotSession::replay(const HeaderChain& host_genesis, SpotParams params, HashSpace puzzle_space,
                                std::span<const Event> log) {
    SpotSession s(host_genesis, params, puzzle_space);
    for (const auto& e : log) s.apply(e);
    return s;
}

std::vector<RationalEpoch> rational_miner_epochs(const SpotParams& params, double rho, std::size_t epochs,
                                                 std::uint64_t seed, unsigned space_bits) {
    if (!(rho > 0.0)) throw Error("rational miner: price ratio must be positive");
    const HeaderChain genesis = host_genesis(space_bits, splitmix(seed));
    SpotSession session(genesis, params, HashSpace::test(space_bits));
    const double g_A = static_cast<double>(session.host.tip().target);
    const auto threshold = static_cast<std::uint64_t>(std::ceil(params.k_A * g_A / (params.R * rho)));
    if (threshold < 1 || threshold > session.spot.puzzle_space().size())
        throw Error("rational miner: break-even target outside the hash space");

    std::vector<RationalEpoch> out;
    std::uint64_t nonce = splitmix(seed ^ 0x5107);
    std::int64_t t = 0;
    const std::size_t max_blocks = (epochs + 64) * (params.j + 2) * (params.N + 1) * 64;
    for (std::size_t b = 0; out.size() < epochs; ++b) {
        if (b > max_blocks) throw Error("rational miner: puzzle stalled");
        session.advance_host(++t, splitmix(seed + b) & 0xffffffffULL);
        if (session.spot.target() < threshold) continue;
        const std::uint64_t start = session.spot.epoch_start();
        const std::uint64_t step = session.spot.step();
        const std::uint64_t g = session.spot.target();
        while (!session.grind("rational", nonce, 1 << 16)) nonce += 1 << 16;
        nonce = splitmix(nonce);
        // Epochs that open above the break-even target are the warm-up from
        // the initial target; they carry no price information.
        if (start >= threshold) continue;
        out.push_back({threshold, g, step, session.spot.peek(session.host)});
    }
    return out;
}

ManipulationStats manipulation_epochs(const SpotParams& params, std::uint64_t reference_target,
                                      std::uint64_t hashes_per_block, std::size_t epochs, std::uint64_t seed,
                                      unsigned space_bits) {
    if (hashes_per_block < 1) throw Error("manipulation: hash rate must be >= 1");
    if (epochs < 1) throw Error("manipulation: need at least one epoch");
    SpotParams p = params;
    p.initial_target = reference_target;

    ManipulationStats stats;
    for (std::size_t e = 0; e < epochs; ++e) {
        const std::uint64_t epoch_seed = splitmix(seed ^ splitmix(e));
        SpotSession session(host_genesis(space_bits, epoch_seed), p, HashSpace::test(space_bits));
        // The opening solve at the reference target fixes the start state.
        for (std::uint64_t n = 0; !session.grind("setup", n, 1 << 16); n += 1 << 16) {}

        std::int64_t t = 0;
        const std::size_t max_blocks = (p.j * 64 + 2) * (p.N + 1);
        for (std::size_t b = 0;; ++b) {
            if (b > max_blocks) throw Error("manipulation: puzzle stalled");
            session.advance_host(++t, splitmix(epoch_seed + b) & 0xffffffffULL);
            const std::uint64_t base = splitmix(epoch_seed ^ (session.host.height() * 0x100000001b3ULL));
            if (session.grind("attacker", base, hashes_per_block)) break;
        }
        stats.rounds.push_back(session.spot.last_epoch().rounds);
        stats.reported.push_back(session.spot.peek(session.host));
    }
    double r = 0.0, s = 0.0;
    for (std::size_t i = 0; i < epochs; ++i) {
        r += static_cast<double>(stats.rounds[i]);
        s += stats.reported[i];
    }
    stats.mean_rounds = r / static_cast<double>(epochs);
    stats.mean_reported = s / static_cast<double>(epochs);
    return stats;
}

}  // namespace powsec
