#pragma once

// Security market between two chains: payoffs, at-rest prices, symmetric
// rebalancing claims, arbitrage search, and the miner game's best response.

#include <optional>

#include "powsec/core.hpp"

namespace powsec {

/// A pair of per-chain quantities (A first).
struct Pair {
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const Pair&, const Pair&) = default;
};

inline double dot(const Pair& x, const Pair& y) noexcept { return x.a * y.a + x.b * y.b; }

struct MarketState {
    double e = 0.0;  ///< aggregate endowment, fiat/sec
    Allocation w;
    Pair p;   ///< portfolio prices, fiat/sec
    Pair pi;  ///< payoff per second

    /// Market with SAAs at rest: p = e w.
    static MarketState at_rest(double e, const Allocation& w, const Pair& pi);
};

struct Rebalancing {
    Pair dw;
    Pair dc;

    bool symmetric() const noexcept { return dw.a == -dw.b; }
};

Pair payoff_vector(double V_A, double V_B, double T_A, double T_B);
Pair portfolio_price_at_rest(double e, const Allocation& w);

/// dw / w componentwise; throws "boundary allocation" when a component is 0.
Pair rebalancing_claims(const Allocation& w, const Pair& dw);
double rebalancing_price(const Pair& dc, const Pair& p);
double rebalancing_payoff(const Pair& dc, const Pair& pi);

inline constexpr double kEquilibriumTolerance = 1e-9;

/// Symmetric move toward the no-arbitrage allocation implied by pi and the
/// block times, with |eps| = min(step_cap, distance / 2). Empty when already
/// within kEquilibriumTolerance.
std::optional<Rebalancing> find_arbitrage(const Allocation& w, const Pair& pi, double T_A, double T_B,
                                          double step_cap);

/// Claim-value limit on selling: on each chain, the value sold at the new
/// prices may not exceed the value held at the old prices.
bool within_short_sale_limit(const Pair& c_before, const Pair& p_before, const Pair& c_after,
                             const Pair& p_after);

/// Closed-form best response of one of N identical miners, clamped to [0, 1/N].
double best_response(double w_minus_iA, int N, double V_A, double V_B, double T_A, double T_B);

/// pi_A w_i / (w_i + w_-i) + pi_B (1/N - w_i) / (1 - w_i - w_-i).
double game_payoff(double w_iA, double w_minus_iA, int N, const Pair& pi);

}  // namespace powsec
