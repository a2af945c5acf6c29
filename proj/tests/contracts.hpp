#pragma once

// Contract fixtures shared by the unit tests and the acceptance run: small
// mined header chains, a funded future, a margin future, and the
// exhaustive-transition and conservation sweeps.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "powsec/futures.hpp"

namespace fixtures {

using namespace powsec;

inline const HashSpace kSpace = HashSpace::test(24);

/// Chain whose header at height i declares difficulties[i - 1].
inline HeaderChain chain_with(const std::vector<double>& difficulties, std::uint64_t seed) {
    std::vector<MinedBlock> blocks;
    std::int64_t t = 0;
    for (double d : difficulties) blocks.push_back({t += 600, d});
    return mine_chain(kSpace, DaaRule::bounded(4), 8.0, blocks, seed);
}

inline HeaderChain genesis_of(const HeaderChain& c) { return HeaderChain(c.space(), c.rule(), *c.at(0)); }

/// Headers at heights [from, to]; empty when to < from.
inline std::span<const BlockHeader> heights(const HeaderChain& c, std::uint64_t from, std::uint64_t to) {
    return c.headers().subspan(from, to + 1 - from);
}

/// Error code thrown by f, or nullopt if it returned normally.
inline std::optional<ContractError::Code> contract_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const ContractError& e) {
        return e.code();
    }
    return std::nullopt;
}

/// G escrows for beneficiary B; at height 4 the oracle reads P_B / P_A = 2.
struct FutureSetup {
    Ledger ledger;
    HeaderChain host = chain_with({8, 8, 8, 8}, 1);
    Oracle oracle{{1, 1}, chain_with({8, 8, 8, 16}, 2)};
    Future f{"fut", "G", "B"};

    FutureSetup() {
        ledger.mint("G", Coin::A, 100 * kCoin);
        ledger.mint("B", Coin::A, kCoin);
    }
};

inline MarginTerms margin_terms() {
    MarginTerms t;
    t.long_b = "L";
    t.short_b = "S";
    t.c_A = 10 * kCoin;
    t.c_B = 10 * kCoin;
    t.m = 0.5;
    t.z = 6;
    t.length_A = 10;
    t.length_B = 10;
    return t;
}

/// Twenty blocks each: A stays at difficulty 8, B jumps to d_B at height 1.
struct MarginSetup {
    Ledger ledger;
    HeaderChain a;
    HeaderChain b;
    MarginFuture mf;

    explicit MarginSetup(double d_B, std::uint64_t seed = 3)
        : a(chain_with(std::vector<double>(20, 8.0), seed)),
          b(chain_with(std::vector<double>(20, d_B), seed + 1)),
          mf("mf", margin_terms(), genesis_of(a), genesis_of(b)) {
        ledger.mint("L", Coin::A, 20 * kCoin);
        ledger.mint("S", Coin::B, 20 * kCoin);
    }

    void submit_to(std::uint64_t h) {
        mf.submit_headers(ledger, heights(a, mf.chain_A().height() + 1, h), heights(b, mf.chain_B().height() + 1, h));
    }
};

inline FutureSetup future_in(Future::Phase p) {
    using P = Future::Phase;
    FutureSetup s;
    if (p != P::Empty) s.f.deposit(s.ledger, {"G"}, 10 * kCoin);
    if (p == P::Recovered) s.f.recover(s.ledger, {"G"});
    if (p == P::Issued || p == P::Redeemed) s.f.issue(s.ledger, {"G", "B"}, 0, 0, 4, 4, 0);
    if (p == P::Redeemed) s.f.redeem(s.ledger, {"B"}, s.oracle, s.host, 1.0);
    return s;
}

inline MarginSetup margin_in(MarginFuture::Phase p) {
    using P = MarginFuture::Phase;
    MarginSetup s(p == P::MarginCalled ? 32.0 : 8.0);
    if (p != P::Pending) s.mf.open(s.ledger, {"L", "S"});
    if (p == P::MarginCalled) s.submit_to(7);
    if (p == P::Settled) {
        s.submit_to(16);
        s.mf.settle(s.ledger);
    }
    return s;
}

/// Tries every operation in every phase of both contracts. Legal calls must
/// not fail with WrongPhase; illegal ones must, leaving the contract as it
/// was. Returns a description of each violation.
inline std::vector<std::string> transition_failures() {
    std::vector<std::string> bad;
    const auto record = [&](const std::string& what, const std::string& phase, const std::string& op) {
        bad.push_back(what + ": " + op + " in " + phase);
    };

    using FP = Future::Phase;
    const std::map<FP, std::set<std::string>> future_ok = {{FP::Empty, {"deposit"}},
                                                           {FP::Funded, {"recover", "issue"}},
                                                           {FP::Issued, {"redeem"}},
                                                           {FP::Redeemed, {}},
                                                           {FP::Recovered, {}}};
    for (const auto& [phase, ok] : future_ok) {
        for (const std::string op : {"deposit", "recover", "issue", "redeem"}) {
            auto s = future_in(phase);
            if (s.f.phase() != phase) {
                record("future could not reach phase", to_string(phase), op);
                continue;
            }
            const auto before = s.f;
            const auto code = contract_code([&] {
                if (op == "deposit") s.f.deposit(s.ledger, {"G"}, kCoin);
                if (op == "recover") s.f.recover(s.ledger, {"G"});
                if (op == "issue") s.f.issue(s.ledger, {"G", "B"}, 0, 0, 4, 4, 0);
                if (op == "redeem") s.f.redeem(s.ledger, {"B"}, s.oracle, s.host, 1.0);
            });
            if (ok.contains(op) && code) record("future legal call failed", to_string(phase), op);
            if (!ok.contains(op) && (code != ContractError::Code::WrongPhase || !(s.f == before)))
                record("future illegal call not rejected", to_string(phase), op);
        }
    }

    using MP = MarginFuture::Phase;
    const std::map<MP, std::set<std::string>> margin_ok = {
        {MP::Pending, {"open"}}, {MP::Open, {"submit", "settle"}}, {MP::MarginCalled, {}}, {MP::Settled, {}}};
    for (const auto& [phase, ok] : margin_ok) {
        for (const std::string op : {"open", "submit", "settle"}) {
            auto s = margin_in(phase);
            if (s.mf.phase() != phase) {
                record("margin future could not reach phase", to_string(phase), op);
                continue;
            }
            const auto before = s.mf;
            const auto code = contract_code([&] {
                if (op == "open") s.mf.open(s.ledger, {"L", "S"});
                if (op == "submit") s.mf.submit_headers(s.ledger, {}, {});
                if (op == "settle") s.mf.settle(s.ledger);
            });
            // Settling before expiry is a precondition failure, not a phase error.
            if (ok.contains(op) && code == ContractError::Code::WrongPhase)
                record("margin future legal call failed", to_string(phase), op);
            if (!ok.contains(op) && (code != ContractError::Code::WrongPhase || !(s.mf == before)))
                record("margin future illegal call not rejected", to_string(phase), op);
        }
    }
    return bad;
}

/// Random calls (random signers, amounts and header batches) against a
/// future and a margin future sharing one ledger. Returns the number of
/// lifecycles in which a ledger total moved or a closed contract kept funds.
inline int conservation_failures(int lifecycles, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::vector<MarginSetup> setups = {MarginSetup(8.0, 20), MarginSetup(6.0, 22), MarginSetup(12.0, 24),
                                             MarginSetup(32.0, 26), MarginSetup(2.5, 28)};
    const std::vector<Signers> signer_sets = {{}, {"G"}, {"B"}, {"G", "B"}, {"L"}, {"S"}, {"L", "S"}};
    const FutureSetup base;
    int failures = 0;
    for (int trial = 0; trial < lifecycles; ++trial) {
        auto ms = setups[rng() % setups.size()];
        auto fs = base;
        Ledger& ledger = ms.ledger;
        ledger.mint("G", Coin::A, 100 * kCoin);
        ledger.mint("B", Coin::A, kCoin);
        const Amount total_A = ledger.total(Coin::A), total_B = ledger.total(Coin::B);
        bool ok = true;
        for (int step = 0; step < 12; ++step) {
            const auto& sig = signer_sets[rng() % signer_sets.size()];
            try {
                switch (rng() % 7) {
                    case 0: fs.f.deposit(ledger, sig, static_cast<Amount>(rng() % (20 * kCoin)) - kCoin); break;
                    case 1: fs.f.recover(ledger, sig); break;
                    case 2:
                        fs.f.issue(ledger, sig, 0, 0, 1 + rng() % 6, 1 + rng() % 6, static_cast<Amount>(rng() % kCoin));
                        break;
                    case 3: fs.f.redeem(ledger, sig, fs.oracle, fs.host, 0.5 + 0.1 * static_cast<double>(rng() % 20)); break;
                    case 4: ms.mf.open(ledger, sig); break;
                    case 5: {
                        const std::uint64_t ha = ms.mf.chain_A().height(), hb = ms.mf.chain_B().height();
                        const std::uint64_t na = rng() % 6, nb = rng() % 6;
                        ms.mf.submit_headers(ledger, heights(ms.a, ha + 1, std::min<std::uint64_t>(20, ha + na)),
                                             heights(ms.b, hb + 1, std::min<std::uint64_t>(20, hb + nb)));
                        break;
                    }
                    case 6: ms.mf.settle(ledger); break;
                }
            } catch (const Error&) {
            }
            ok = ok && ledger.total(Coin::A) == total_A && ledger.total(Coin::B) == total_B;
        }
        using MP = MarginFuture::Phase;
        if (ms.mf.phase() == MP::Settled || ms.mf.phase() == MP::MarginCalled)
            ok = ok && ledger.balance("mf", Coin::A) == 0 && ledger.balance("mf", Coin::B) == 0;
        using FP = Future::Phase;
        if (fs.f.phase() == FP::Redeemed || fs.f.phase() == FP::Recovered) ok = ok && ledger.balance("fut", Coin::A) == 0;
        if (!ok) ++failures;
    }
    return failures;
}

}  // namespace fixtures
