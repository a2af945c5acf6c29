#include "powsec/market.hpp"

#include <algorithm>
#include <cmath>

#include "powsec/equilibrium.hpp"

namespace powsec {

MarketState MarketState::at_rest(double e, const Allocation& w, const Pair& pi) {
    return MarketState{e, w, portfolio_price_at_rest(e, w), pi};
}

Pair payoff_vector(double V_A, double V_B, double T_A, double T_B) {
    if (!(T_A > 0.0) || !(T_B > 0.0)) throw Error("block times must be > 0");
    if (!(V_A >= 0.0) || !(V_B >= 0.0)) throw Error("block rewards must be >= 0");
    return {V_A / T_A, V_B / T_B};
}

Pair portfolio_price_at_rest(double e, const Allocation& w) {
    if (!(e > 0.0)) throw Error("endowment must be > 0");
    return {e * w.a(), e * w.b()};
}

Pair rebalancing_claims(const Allocation& w, const Pair& dw) {
    if (w.a() == 0.0 || w.b() == 0.0) throw Error("boundary allocation");
    return {dw.a / w.a(), dw.b / w.b()};
}

double rebalancing_price(const Pair& dc, const Pair& p) { return dot(dc, p); }

double rebalancing_payoff(const Pair& dc, const Pair& pi) { return dot(dc, pi); }

std::optional<Rebalancing> find_arbitrage(const Allocation& w, const Pair& pi, double T_A, double T_B,
                                          double step_cap) {
    if (w.a() == 0.0 || w.b() == 0.0) throw Error("boundary allocation");
    if (!(step_cap > 0.0)) throw Error("step_cap must be > 0");
    const double R = relative_reward(pi.a * T_A, pi.b * T_B);
    const Allocation eq = equilibrium_allocation(T_A, T_B, R);
    const double distance = allocation_distance(w, eq);
    if (distance < kEquilibriumTolerance) return std::nullopt;

    const double eps = std::min(step_cap, distance / 2.0) * (eq.a() > w.a() ? 1.0 : -1.0);
    Rebalancing move;
    move.dw = {eps, -eps};
    move.dc = rebalancing_claims(w, move.dw);
    // Rounding can flip the sign for moves of a few ulps; treat as settled.
    if (!(rebalancing_payoff(move.dc, pi) > 0.0)) return std::nullopt;
    return move;
}

bool within_short_sale_limit(const Pair& c_before, const Pair& p_before, const Pair& c_after,
                             const Pair& p_after) {
    const auto ok = [](double c0, double p0, double c1, double p1) {
        const double sold = std::max(0.0, c0 - c1) * p1;
        return sold <= c0 * p0;
    };
    return ok(c_before.a, p_before.a, c_after.a, p_after.a) && ok(c_before.b, p_before.b, c_after.b, p_after.b);
}

double best_response(double w_minus_iA, int N, double V_A, double V_B, double T_A, double T_B) {
    if (N < 2) throw Error("best_response: N must be >= 2");
    const double n_over_N = static_cast<double>(N - 1) / N;
    if (!(w_minus_iA >= 0.0) || w_minus_iA > n_over_N) throw Error("best_response: w_minus_iA out of range");
    if (!(V_A >= 0.0) || !(V_B >= 0.0) || !(T_A > 0.0) || !(T_B > 0.0))
        throw Error("best_response: invalid rewards or block times");

    const double x = w_minus_iA;
    const double sa = std::sqrt(x * V_A * T_B);
    const double sb = std::sqrt(std::max(0.0, n_over_N - x) * V_B * T_A);
    const double upper = 1.0 / N;
    if (sa + sb == 0.0) return 0.0;
    const double w = ((1.0 - x) * sa - x * sb) / (sa + sb);
    return std::clamp(w, 0.0, upper);
}

double game_payoff(double w_iA, double w_minus_iA, int N, const Pair& pi) {
    if (N < 1) throw Error("game_payoff: N must be >= 1");
    const double da = w_iA + w_minus_iA;
    const double db = 1.0 - w_iA - w_minus_iA;
    const double share_b = 1.0 / N - w_iA;
    double y = 0.0;
    if (w_iA != 0.0) {
        if (da == 0.0) throw Error("game_payoff: zero denominator");
        y += pi.a * w_iA / da;
    }
    if (share_b != 0.0) {
        if (db == 0.0) throw Error("game_payoff: zero denominator");
        y += pi.b * share_b / db;
    }
    return y;
}

}  // namespace powsec
