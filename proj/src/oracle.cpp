#include "powsec/oracle.hpp"

#include <cmath>

#include "powsec/equilibrium.hpp"

namespace powsec {

Oracle::Oracle(OracleParams params, HeaderChain chain_b) : params_(params), chain_b_(std::move(chain_b)) {
    if (!(params_.k_A > 0) || !(params_.k_B > 0)) throw Error("oracle block rewards must be positive");
}

double Oracle::query(const HeaderChain& host, std::uint64_t b_A, std::uint64_t b_B, double sigma_delta) const {
    const auto a = host.at(b_A);
    if (!a) throw OracleError(OracleError::Code::UnknownHeightA, "block " + std::to_string(b_A) + " of chain A has not yet been mined");
    const auto b = chain_b_.at(b_B);
    if (!b) throw OracleError(OracleError::Code::UnknownHeightB, "block " + std::to_string(b_B) + " of chain B has not yet been mined");
    return oracle_price_ratio(params_.k_A, params_.k_B, a->difficulty(host.space()), b->difficulty(chain_b_.space()), sigma_delta);
}

Oracle replay_oracle(OracleParams params, const HeaderChain& genesis_b, std::span<const BlockHeader> log) {
    Oracle oracle(params, genesis_b);
    for (const auto& h : log) oracle.update(h);
    return oracle;
}

}  // namespace powsec
