#pragma once

// Price-ratio oracle living on host chain A: it keeps a light-client copy of
// chain B's headers and reads chain A's headers directly.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "powsec/error.hpp"
#include "powsec/header_chain.hpp"

namespace powsec {

class OracleError : public Error {
  public:
    enum class Code { UnknownHeightA, UnknownHeightB };
    OracleError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const noexcept { return code_; }

  private:
    Code code_;
};

struct OracleParams {
    double k_A = 1.0;  ///< coins A per block A
    double k_B = 1.0;  ///< coins B per block B

    friend bool operator==(const OracleParams&, const OracleParams&) = default;
};

class Oracle {
  public:
    Oracle(OracleParams params, HeaderChain chain_b);

    const OracleParams& params() const noexcept { return params_; }
    const HeaderChain& headers_b() const noexcept { return chain_b_; }

    /// Public entry point: anyone may submit the next header of chain B.
    UpdateResult update(const BlockHeader& h_b) { return chain_b_.append(h_b); }

    /// P_B / P_A = sigma_delta * (k_A / k_B) * (D_B[b_B] / D_A[b_A]), where
    /// D[b] is the difficulty declared by the header at height b.
    double query(const HeaderChain& host, std::uint64_t b_A, std::uint64_t b_B, double sigma_delta) const;

    friend bool operator==(const Oracle&, const Oracle&) = default;

  private:
    OracleParams params_;
    HeaderChain chain_b_;
};

/// Replays a log of submitted headers from a fresh oracle; rejected headers
/// are part of the log and leave no trace, as in the live run.
Oracle replay_oracle(OracleParams params, const HeaderChain& genesis_b, std::span<const BlockHeader> log);

}  // namespace powsec
