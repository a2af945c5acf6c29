#pragma once

// Hash-oracle settled derivatives: a deposit-backed future that pays the
// value of one coin B in coin A, and a margined future settled from the
// difficulty ratio of two light-client header chains.
//
// Balances are integer base units (kCoin per coin) so conservation checks
// are exact. Signatures are modelled as the set of accounts that
// authenticated the call.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "powsec/error.hpp"
#include "powsec/header_chain.hpp"
#include "powsec/oracle.hpp"

namespace powsec {

using AccountId = std::string;
using Signers = std::set<AccountId>;
using Amount = std::int64_t;

inline constexpr Amount kCoin = 100'000'000;

enum class Coin { A, B };

class ContractError : public Error {
  public:
    enum class Code {
        WrongPhase,
        BadSignature,
        ExpiryNotReached,
        InsufficientDeposit,
        InsufficientConfirmations,
        BadHeaderChain,
        InsufficientFunds,
    };
    ContractError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const noexcept { return code_; }

  private:
    Code code_;
};

const char* to_string(ContractError::Code c) noexcept;

class Ledger {
  public:
    void mint(const AccountId& who, Coin coin, Amount amount);
    Amount balance(const AccountId& who, Coin coin) const;
    /// Throws InsufficientFunds without moving anything.
    void transfer(const AccountId& from, const AccountId& to, Coin coin, Amount amount);
    Amount total(Coin coin) const;

    friend bool operator==(const Ledger&, const Ledger&) = default;

  private:
    std::map<std::pair<AccountId, Coin>, Amount> balances_;
};

/// Guarantor G escrows coins A; beneficiary B later receives the value of one
/// coin B at the expiry heights, priced by the oracle.
class Future {
  public:
    enum class Phase { Empty, Funded, Issued, Redeemed, Recovered };

    Future(AccountId id, AccountId guarantor, AccountId beneficiary);

    Phase phase() const noexcept { return phase_; }
    const AccountId& id() const noexcept { return id_; }
    Amount deposit_amount() const noexcept { return deposit_; }
    Amount fee() const noexcept { return fee_; }
    std::optional<std::pair<std::uint64_t, std::uint64_t>> expiry() const noexcept { return expiry_; }

    void deposit(Ledger& ledger, const Signers& sig, Amount amount);
    void recover(Ledger& ledger, const Signers& sig);
    void issue(Ledger& ledger, const Signers& sig, std::uint64_t b_A, std::uint64_t b_B, std::uint64_t expiry_A,
               std::uint64_t expiry_B, Amount fee);
    /// Pays the beneficiary floor(ratio * kCoin) units of A; returns that payout.
    Amount redeem(Ledger& ledger, const Signers& sig, const Oracle& oracle, const HeaderChain& host, double sigma_delta);

    friend bool operator==(const Future&, const Future&) = default;

  private:
    void require(Phase p, const char* op) const;
    void require_signer(const Signers& sig, const AccountId& who, const char* op) const;

    AccountId id_, guarantor_, beneficiary_;
    Phase phase_ = Phase::Empty;
    Amount deposit_ = 0;
    Amount fee_ = 0;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> issued_at_;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> expiry_;
};

const char* to_string(Future::Phase p) noexcept;

struct MarginTerms {
    AccountId long_b;   ///< gains when coin B appreciates against coin A; margin in coin A
    AccountId short_b;  ///< margin in coin B
    Amount c_A = 0;     ///< notional in units of A
    Amount c_B = 0;     ///< notional in units of B
    double m = 1.0;     ///< margin multiplier
    std::uint64_t z = 6;  ///< confirmations required past a checkpoint
    std::uint64_t length_A = 0;  ///< contract length, blocks of A
    std::uint64_t length_B = 0;  ///< contract length, blocks of B
    OracleParams rewards;
    double sigma_delta = 1.0;
    /// Maximum relative drift of B's height from the height implied by A's
    /// progress and the length ratio; nullopt disables the check.
    std::optional<double> height_tolerance = 0.5;

    Amount margin_A() const;
    Amount margin_B() const;
    void validate() const;

    friend bool operator==(const MarginTerms&, const MarginTerms&) = default;
};

/// Margined future settled by difficulty ratio. With ratio = P_B / P_A read at
/// confirmed heights, the long side is owed delta = c_B * (ratio_now -
/// ratio_open) units of A. A positive delta is paid by the short side in B at
/// the current ratio; a negative one by the long side in A. If either
/// payment exceeds the payer's margin the contract closes at once and the
/// payer forfeits exactly its margin.
class MarginFuture {
  public:
    enum class Phase { Pending, Open, MarginCalled, Settled };

    MarginFuture(AccountId id, MarginTerms terms, HeaderChain start_A, HeaderChain start_B);

    Phase phase() const noexcept { return phase_; }
    const MarginTerms& terms() const noexcept { return terms_; }
    const HeaderChain& chain_A() const noexcept { return chain_A_; }
    const HeaderChain& chain_B() const noexcept { return chain_B_; }
    double opening_ratio() const;
    std::uint64_t expiry_A() const { return start_A_ + terms_.length_A; }
    std::uint64_t expiry_B() const { return start_B_ + terms_.length_B; }

    void open(Ledger& ledger, const Signers& sig);
    /// Extends both light-client chains; all or nothing. Checks margin at the
    /// newest confirmed checkpoint and may close the contract.
    void submit_headers(Ledger& ledger, std::span<const BlockHeader> headers_A, std::span<const BlockHeader> headers_B);
    void settle(Ledger& ledger);

    /// Amount of A owed to the long side at a pair of heights.
    double delta_at(std::uint64_t h_A, std::uint64_t h_B) const;

    friend bool operator==(const MarginFuture&, const MarginFuture&) = default;

  private:
    double ratio_at(std::uint64_t h_A, std::uint64_t h_B) const;
    /// Pays out given delta; returns true if it was a margin call.
    bool close(Ledger& ledger, double delta, double ratio_now, bool force_settle);

    AccountId id_;
    MarginTerms terms_;
    HeaderChain chain_A_, chain_B_;
    std::uint64_t start_A_, start_B_;
    Phase phase_ = Phase::Pending;
};

const char* to_string(MarginFuture::Phase p) noexcept;

}  // namespace powsec
