#include "powsec/futures.hpp"

#include <cmath>

#include "powsec/equilibrium.hpp"

namespace powsec {
namespace {

using Code = ContractError::Code;

Amount floor_units(double x) {
    if (!std::isfinite(x) || x < 0.0 || x > 9.0e18) throw Error("amount out of range");
    return static_cast<Amount>(std::floor(x));
}

}  // namespace

const char* to_string(ContractError::Code c) noexcept {
    switch (c) {
        case Code::WrongPhase: return "WrongPhase";
        case Code::BadSignature: return "BadSignature";
        case Code::ExpiryNotReached: return "ExpiryNotReached";
        case Code::InsufficientDeposit: return "InsufficientDeposit";
        case Code::InsufficientConfirmations: return "InsufficientConfirmations";
        case Code::BadHeaderChain: return "BadHeaderChain";
        case Code::InsufficientFunds: return "InsufficientFunds";
    }
    return "unknown";
}

void Ledger::mint(const AccountId& who, Coin coin, Amount amount) {
    if (amount < 0) throw Error("cannot mint a negative amount");
    balances_[{who, coin}] += amount;
}

Amount Ledger::balance(const AccountId& who, Coin coin) const {
    const auto it = balances_.find({who, coin});
    return it == balances_.end() ? 0 : it->second;
}

void Ledger::transfer(const AccountId& from, const AccountId& to, Coin coin, Amount amount) {
    if (amount < 0) throw Error("cannot transfer a negative amount");
    if (balance(from, coin) < amount)
        throw ContractError(Code::InsufficientFunds, from + " holds less than " + std::to_string(amount));
    if (amount == 0) return;
    balances_[{from, coin}] -= amount;
    balances_[{to, coin}] += amount;
}

Amount Ledger::total(Coin coin) const {
    Amount sum = 0;
    for (const auto& [key, v] : balances_)
        if (key.second == coin) sum += v;
    return sum;
}

const char* to_string(Future::Phase p) noexcept {
    switch (p) {
        case Future::Phase::Empty: return "Empty";
        case Future::Phase::Funded: return "Funded";
        case Future::Phase::Issued: return "Issued";
        case Future::Phase::Redeemed: return "Redeemed";
        case Future::Phase::Recovered: return "Recovered";
    }
    return "unknown";
}

Future::Future(AccountId id, AccountId guarantor, AccountId beneficiary)
    : id_(std::move(id)), guarantor_(std::move(guarantor)), beneficiary_(std::move(beneficiary)) {
    if (guarantor_ == beneficiary_ || id_ == guarantor_ || id_ == beneficiary_)
        throw Error("future: contract, guarantor and beneficiary must be distinct accounts");
}

void Future::require(Phase p, const char* op) const {
    if (phase_ != p)
        throw ContractError(Code::WrongPhase, std::string(op) + " not allowed in phase " + to_string(phase_));
}

void Future::require_signer(const Signers& sig, const AccountId& who, const char* op) const {
    if (!sig.contains(who)) throw ContractError(Code::BadSignature, std::string(op) + " must be signed by " + who);
}

void Future::deposit(Ledger& ledger, const Signers& sig, Amount amount) {
    require(Phase::Empty, "deposit");
    require_signer(sig, guarantor_, "deposit");
    if (amount <= 0) throw ContractError(Code::InsufficientDeposit, "deposit must be positive");
    ledger.transfer(guarantor_, id_, Coin::A, amount);
    deposit_ = amount;
    phase_ = Phase::Funded;
}

void Future::recover(Ledger& ledger, const Signers& sig) {
    require(Phase::Funded, "recover");
    require_signer(sig, guarantor_, "recover");
    ledger.transfer(id_, guarantor_, Coin::A, deposit_);
    phase_ = Phase::Recovered;
}

void Future::issue(Ledger& ledger, const Signers& sig, std::uint64_t b_A, std::uint64_t b_B, std::uint64_t expiry_A,
                   std::uint64_t expiry_B, Amount fee) {
    require(Phase::Funded, "issue");
    require_signer(sig, guarantor_, "issue");
    require_signer(sig, beneficiary_, "issue");
    if (fee < 0) throw Error("future: fee must be >= 0");
    if (expiry_A < b_A || expiry_B < b_B) throw Error("future: expiry before issue height");
    ledger.transfer(beneficiary_, guarantor_, Coin::A, fee);
    fee_ = fee;
    issued_at_ = {b_A, b_B};
    expiry_ = {expiry_A, expiry_B};
    phase_ = Phase::Issued;
}

Amount Future::redeem(Ledger& ledger, const Signers& sig, const Oracle& oracle, const HeaderChain& host,
                      double sigma_delta) {
    require(Phase::Issued, "redeem");
    if (!sig.contains(beneficiary_) && !sig.contains(guarantor_))
        throw ContractError(Code::BadSignature, "redeem must be signed by a party to the contract");
    const auto [e_A, e_B] = *expiry_;
    if (!host.at(e_A) || !oracle.headers_b().at(e_B))
        throw ContractError(Code::ExpiryNotReached, "expiry headers have not been mined");
    const Amount payout = floor_units(oracle.query(host, e_A, e_B, sigma_delta) * static_cast<double>(kCoin));
    if (payout > deposit_)
        throw ContractError(Code::InsufficientDeposit,
                            "payout " + std::to_string(payout) + " exceeds deposit " + std::to_string(deposit_));
    ledger.transfer(id_, beneficiary_, Coin::A, payout);
    ledger.transfer(id_, guarantor_, Coin::A, deposit_ - payout);
    phase_ = Phase::Redeemed;
    return payout;
}

Amount MarginTerms::margin_A() const { return floor_units(static_cast<double>(c_A) * m); }
Amount MarginTerms::margin_B() const { return floor_units(static_cast<double>(c_B) * m); }

void MarginTerms::validate() const {
    if (long_b.empty() || short_b.empty() || long_b == short_b) throw Error("margin future: need two distinct parties");
    if (c_A <= 0 || c_B <= 0) throw Error("margin future: notionals must be positive");
    if (!(m > 0.0) || !std::isfinite(m)) throw Error("margin future: margin multiplier must be positive");
    if (length_A < 1 || length_B < 1) throw Error("margin future: contract length must be >= 1 block");
    if (!(sigma_delta > 0.0)) throw Error("margin future: sigma_delta must be positive");
    if (height_tolerance && !(*height_tolerance >= 0.0)) throw Error("margin future: height tolerance must be >= 0");
}

const char* to_string(MarginFuture::Phase p) noexcept {
    switch (p) {
        case MarginFuture::Phase::Pending: return "Pending";
        case MarginFuture::Phase::Open: return "Open";
        case MarginFuture::Phase::MarginCalled: return "MarginCalled";
        case MarginFuture::Phase::Settled: return "Settled";
    }
    return "unknown";
}

MarginFuture::MarginFuture(AccountId id, MarginTerms terms, HeaderChain start_A, HeaderChain start_B)
    : id_(std::move(id)),
      terms_(std::move(terms)),
      chain_A_(std::move(start_A)),
      chain_B_(std::move(start_B)),
      start_A_(chain_A_.height()),
      start_B_(chain_B_.height()) {
    terms_.validate();
    if (id_ == terms_.long_b || id_ == terms_.short_b) throw Error("margin future: contract account clashes with a party");
}

double MarginFuture::ratio_at(std::uint64_t h_A, std::uint64_t h_B) const {
    const auto a = chain_A_.at(h_A);
    const auto b = chain_B_.at(h_B);
    if (!a || !b) throw Error("margin future: checkpoint height not submitted");
    return oracle_price_ratio(terms_.rewards.k_A, terms_.rewards.k_B, a->difficulty(chain_A_.space()),
                              b->difficulty(chain_B_.space()), terms_.sigma_delta);
}

double MarginFuture::opening_ratio() const { return ratio_at(start_A_, start_B_); }

double MarginFuture::delta_at(std::uint64_t h_A, std::uint64_t h_B) const {
    return static_cast<double>(terms_.c_B) * (ratio_at(h_A, h_B) - opening_ratio());
}

void MarginFuture::open(Ledger& ledger, const Signers& sig) {
    if (phase_ != Phase::Pending)
        throw ContractError(Code::WrongPhase, std::string("open not allowed in phase ") + to_string(phase_));
    for (const auto* who : {&terms_.long_b, &terms_.short_b})
        if (!sig.contains(*who)) throw ContractError(Code::BadSignature, "open must be signed by " + *who);
    const Amount mA = terms_.margin_A(), mB = terms_.margin_B();
    if (ledger.balance(terms_.long_b, Coin::A) < mA)
        throw ContractError(Code::InsufficientFunds, terms_.long_b + " cannot post the A margin");
    if (ledger.balance(terms_.short_b, Coin::B) < mB)
        throw ContractError(Code::InsufficientFunds, terms_.short_b + " cannot post the B margin");
    ledger.transfer(terms_.long_b, id_, Coin::A, mA);
    ledger.transfer(terms_.short_b, id_, Coin::B, mB);
    phase_ = Phase::Open;
}

bool MarginFuture::close(Ledger& ledger, double delta, double ratio_now, bool force_settle) {
    const Amount mA = terms_.margin_A(), mB = terms_.margin_B();
    Amount pay_B = 0, pay_A = 0;
    bool called = false;
    if (delta > 0.0) {
        const double owed = delta / ratio_now;
        called = owed > static_cast<double>(mB);
        pay_B = called ? mB : floor_units(owed);
    } else if (delta < 0.0) {
        const double owed = -delta;
        called = owed > static_cast<double>(mA);
        pay_A = called ? mA : floor_units(owed);
    }
    if (!called && !force_settle) return false;
    ledger.transfer(id_, terms_.long_b, Coin::A, mA - pay_A);
    ledger.transfer(id_, terms_.short_b, Coin::A, pay_A);
    ledger.transfer(id_, terms_.long_b, Coin::B, pay_B);
    ledger.transfer(id_, terms_.short_b, Coin::B, mB - pay_B);
    phase_ = called ? Phase::MarginCalled : Phase::Settled;
    return called;
}

void MarginFuture::submit_headers(Ledger& ledger, std::span<const BlockHeader> headers_A,
                                  std::span<const BlockHeader> headers_B) {
    if (phase_ != Phase::Open)
        throw ContractError(Code::WrongPhase, std::string("submit_headers not allowed in phase ") + to_string(phase_));
    HeaderChain a = chain_A_, b = chain_B_;
    for (const auto& h : headers_A)
        if (const auto r = a.append(h); r != UpdateResult::Appended)
            throw ContractError(Code::BadHeaderChain, std::string("chain A header at height ") + std::to_string(h.height) + ": " + to_string(r));
    for (const auto& h : headers_B)
        if (const auto r = b.append(h); r != UpdateResult::Appended)
            throw ContractError(Code::BadHeaderChain, std::string("chain B header at height ") + std::to_string(h.height) + ": " + to_string(r));
    if (terms_.height_tolerance) {
        const double progress_A = static_cast<double>(a.height() - start_A_);
        const double expected_B = progress_A * static_cast<double>(terms_.length_B) / static_cast<double>(terms_.length_A);
        const double drift = std::abs(static_cast<double>(b.height() - start_B_) - expected_B);
        if (drift > *terms_.height_tolerance * expected_B + static_cast<double>(terms_.z))
            throw ContractError(Code::BadHeaderChain, "chain B height drifts from the height implied by chain A");
    }
    chain_A_ = std::move(a);
    chain_B_ = std::move(b);

    if (chain_A_.height() < start_A_ + terms_.z || chain_B_.height() < start_B_ + terms_.z) return;
    const std::uint64_t h_A = std::min(chain_A_.height() - terms_.z, expiry_A());
    const std::uint64_t h_B = std::min(chain_B_.height() - terms_.z, expiry_B());
    close(ledger, delta_at(h_A, h_B), ratio_at(h_A, h_B), false);
}

void MarginFuture::settle(Ledger& ledger) {
    if (phase_ != Phase::Open)
        throw ContractError(Code::WrongPhase, std::string("settle not allowed in phase ") + to_string(phase_));
    if (chain_A_.height() < expiry_A() + terms_.z || chain_B_.height() < expiry_B() + terms_.z)
        throw ContractError(Code::InsufficientConfirmations,
                            "expiry needs " + std::to_string(terms_.z) + " confirmations on both chains");
    close(ledger, delta_at(expiry_A(), expiry_B()), ratio_at(expiry_A(), expiry_B()), true);
}

}  // namespace powsec
