// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "contracts.hpp"
#include "powsec/causality.hpp"
#include "powsec/equilibrium.hpp"
#include "powsec/market.hpp"
#include "powsec/mdp.hpp"
#include "powsec/oracle.hpp"
#include "powsec/roundtrip.hpp"
#include "powsec/simulator.hpp"
#include "powsec/spot.hpp"
#include "support.hpp"

using namespace powsec;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ------------------------------------------------------------------- MDP

Verdict mdp_cli() {
    const auto dir = testing::scratch("acc-mdp");
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = testing::run_cli("mdp --preset motivating --out " + (dir / "out").string(), dir / "log");
    const double secs = seconds_since(t0);
    const bool found = slurp(dir / "log").find("concentration: D_A=8 D_B=4") != std::string::npos;
    return {rc == 0 && found && secs < 60.0,
            std::string("cli mdp --preset motivating -> ") + (found ? "(8, 4)" : "not (8, 4)") + " in " + fmt("%.2f", secs) +
                " s (limit 60 s)"};
}

Verdict mdp_cross_method() {
    using namespace mdp;
    bool ok = true;
    std::string detail;
    for (auto [ra, rb] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}, {5.0, 1.0}}) {
        MdpConfig c = MdpConfig::with_rewards(ra, rb);
        c.action_grid.clear();
        for (int k = 0; k <= 12; ++k) c.action_grid.push_back(0.5 * k);
        c.tail = TailRate::Fixed;
        c.tail_rate = 0.5;
        const MdpModel m(c);
        const Allocation w = equilibrium_allocation(c.T, c.T, relative_reward(ra, rb));
        const double want_A = c.difficulty_grid[m.snap(w.a() * c.H * c.T)];
        const double want_B = c.difficulty_grid[m.snap(w.b() * c.H * c.T)];
        std::string got;
        try {
            const auto [d_a, d_b] = concentration_point(solve_value_iteration(m), m);
            ok = ok && d_a == want_A && d_b == want_B;
            got = "(" + fmt("%g", d_a) + ", " + fmt("%g", d_b) + ")";
        } catch (const Error& e) {
            ok = false;
            got = e.what();
        }
        detail += fmt("%g", ra) + ":" + fmt("%g", rb) + " -> " + got + " want (" + fmt("%g", want_A) + ", " +
                  fmt("%g", want_B) + "); ";
    }
    return {ok, detail + "half-step actions, fixed tail rate 1/T"};
}

// Integer actions with the hash-ratio tail, reported for reference only.
std::string mdp_integer_grid_note() {
    using namespace mdp;
    std::string out;
    for (auto [ra, rb] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}, {5.0, 1.0}}) {
        const MdpModel m(MdpConfig::with_rewards(ra, rb));
        const auto st = stationary_states(solve_value_iteration(m), m);
        out += fmt("%g", ra) + ":" + fmt("%g", rb) + " {";
        for (std::size_t i = 0; i < st.size(); ++i)
            out += (i ? " " : "") + std::string("(") + fmt("%g", st[i].first) + "," + fmt("%g", st[i].second) + ")";
        out += "} ";
    }
    return out;
}

// ---------------------------------------------------------------- market

Verdict no_arbitrage() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> V(0.1, 10.0), T(1.0, 1000.0), u(0.01, 0.99), e(1.0, 100.0);
    int failures = 0;
    double worst_eq = 0.0, worst_price = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double va = V(rng), vb = V(rng), ta = T(rng), tb = T(rng);
        const Pair pi = payoff_vector(va, vb, ta, tb);
        const double norm = std::abs(pi.a) + std::abs(pi.b);
        const Allocation eq = equilibrium_allocation(ta, tb, relative_reward(va, vb));

        // At equilibrium every symmetric rebalancing pays nothing.
        const double room = std::min(eq.a(), eq.b());
        const double eps_eq = (2.0 * u(rng) - 1.0) * room;
        const Pair dc_eq = rebalancing_claims(eq, {eps_eq, -eps_eq});
        const double at_eq = std::abs(rebalancing_payoff(dc_eq, pi)) / norm;
        worst_eq = std::max(worst_eq, at_eq);
        if (!(at_eq < 1e-9)) ++failures;

        // Off equilibrium: toward pays, away costs, and at rest the price is zero.
        const Allocation w = Allocation::from_share_a(u(rng));
        const double gap = eq.a() - w.a();
        if (std::abs(gap) < 1e-6) continue;
        const double toward = gap * u(rng);
        const double away = -std::copysign(std::min(w.a(), w.b()) * u(rng), gap);
        const Pair dc_t = rebalancing_claims(w, {toward, -toward});
        const Pair dc_a = rebalancing_claims(w, {away, -away});
        if (!(rebalancing_payoff(dc_t, pi) > 0.0)) ++failures;
        if (!(rebalancing_payoff(dc_a, pi) < 0.0)) ++failures;
        const Pair p = portfolio_price_at_rest(e(rng), w);
        const double price = std::max(std::abs(rebalancing_price(dc_t, p)), std::abs(rebalancing_price(dc_a, p)));
        worst_price = std::max(worst_price, price);
        if (!(price <= 1e-12)) ++failures;
    }
    return {failures == 0, std::to_string(failures) + " failures over 1000 random (V, T); worst |payoff|/|pi|_1 at w_eq " +
                               fmt("%.2e", worst_eq) + ", worst |price| at rest " + fmt("%.2e", worst_price)};
}

Verdict nash() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> V(0.1, 10.0), T(1.0, 1000.0);
    std::uniform_int_distribution<int> Ns(2, 100);
    int fixed_fail = 0, grid_fail = 0;
    double worst = 0.0;
    const std::size_t cells = 4000;
    for (int i = 0; i < 500; ++i) {
        const double va = V(rng), vb = V(rng), ta = T(rng), tb = T(rng);
        const int N = Ns(rng);
        const double c = equilibrium_allocation(ta, tb, relative_reward(va, vb)).a();
        const double others = c * (N - 1.0) / N;
        const double err = std::abs(best_response(others, N, va, vb, ta, tb) - c / N);
        worst = std::max(worst, err);
        if (!(err <= 1e-10)) ++fixed_fail;

        const Pair pi = payoff_vector(va, vb, ta, tb);
        double best = -INFINITY, arg = 0.0;
        for (std::size_t k = 0; k <= cells; ++k) {
            const double w = static_cast<double>(k) / static_cast<double>(cells) / N;
            const double y = game_payoff(w, others, N, pi);
            if (y > best) best = y, arg = w;
        }
        if (!(std::abs(arg - c / N) <= 1.0 / N / cells + 1e-15)) ++grid_fail;
    }
    return {fixed_fail == 0 && grid_fail == 0,
            "500 games: best-response misses " + std::to_string(fixed_fail) + " (worst " + fmt("%.1e", worst) +
                "), grid argmax off by more than one cell " + std::to_string(grid_fail)};
}

// ------------------------------------------------------------- simulator

sim::SimConfig two_chains(double P_A, double P_B, std::vector<sim::MinerConfig> miners) {
    sim::SimConfig c;
    c.chains[0].params = {"A", 600.0, 1.0, "sha256d"};
    c.chains[1].params = {"B", 600.0, 1.0, "sha256d"};
    c.miners = std::move(miners);
    c.prices = sim::PricePath::constant(P_A, P_B);
    c.horizon_blocks = 10000;
    c.sample_interval = 3600.0;
    return c;
}

Verdict attractor() {
    using namespace sim;
    const auto cfg = two_chains(2, 1, {{"g", 0.1, Greedy{0.002}, 0.5}, {"f", 0.9, Fixed{0.65}, 0.65}});
    double worst = 0.0, slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = run_simulation(cfg, seed);
        slowest = std::max(slowest, seconds_since(t0));
        worst = std::max(worst, r.steady.mean_distance);
    }
    auto offset_cfg = two_chains(1, 1, {{"g0", 0.25, Greedy{0.002}, 0.5}, {"g1", 0.25, Greedy{0.002}, 0.5},
                                        {"la", 0.2, Loyal{0}, std::nullopt}, {"f", 0.3, Fixed{0.5}, 0.5}});
    const auto rep = loyal_offset_experiment(offset_cfg);
    const bool ok = worst < 0.02 && slowest < 120.0 && rep.absorbable && std::abs(rep.delta) < 0.01;
    return {ok, "10% greedy, 1e4 blocks, 10 seeds: worst mean |w - w_eq| " + fmt("%.2e", worst) + " (< 0.02), slowest run " +
                    fmt("%.2f", slowest) + " s; loyal offset bias " + fmt("%.2f", rep.bias) + " -> |dw_A| " +
                    fmt("%.2e", std::abs(rep.delta)) + " (< 0.01)"};
}

// ---------------------------------------------------------------- oracle

Verdict oracle_accuracy() {
    double worst = 0.0;
    std::string detail;
    for (double ratio : {0.5, 0.25, 0.1}) {
        auto cfg = sim::motivating_preset();
        cfg.prices = sim::PricePath::constant(1.0, ratio);
        cfg.horizon_blocks = 4000;
        cfg.epoch = 1'600'000'000;
        const auto run = sim::run_simulation(cfg);
        const auto pair = mine_header_pair(cfg, run, HashSpace::test(24), 64.0, 11);
        const Oracle o({cfg.chains[0].params.k, cfg.chains[1].params.k}, pair.b);
        double sum = 0.0;
        int n = 0;
        for (std::uint64_t h = pair.a.height() / 2; h <= pair.a.height(); h += 7) {
            sum += o.query(pair.a, h, height_at(pair.b, pair.a.at(h)->timestamp), 1.0);
            ++n;
        }
        const double err = std::abs(sum / n / ratio - 1.0);
        worst = std::max(worst, err);
        detail += fmt("%g", ratio) + " -> " + fmt("%.4f", sum / n) + "; ";
    }

    const auto dir = testing::scratch("acc-eq");
    const int rc = testing::run_cli("equilibrium --config " + testing::data_dir() + "/synthetic/equilibrium.json --out " +
                                        (dir / "out").string(),
                                    dir / "log");
    double rmse = INFINITY;
    std::ifstream in(dir / "out" / "metrics.txt");
    for (std::string line; std::getline(in, line);)
        if (line.starts_with("all,")) rmse = std::stod(line.substr(4));
    return {worst < 0.02 && rc == 0 && rmse < 0.01,
            "P_B/P_A " + detail + "worst error " + fmt("%.2f", 100 * worst) + "% (< 2%); synthetic equilibrium RMSE " +
                fmt("%.4f", rmse) + " (< 0.01)"};
}

Verdict psnr() {
    const double a = psnr_from_rmse(0.0021), b = psnr_from_rmse(0.0091);
    return {std::abs(a - 53.55) <= 0.15 && std::abs(b - 40.87) <= 0.15,
            "RMSE 0.0021 -> " + fmt("%.2f", a) + " dB, RMSE 0.0091 -> " + fmt("%.2f", b) + " dB"};
}

// ------------------------------------------------------------------ spot

Verdict spot() {
    const SpotParams p;
    const auto base = manipulation_epochs(p, 1u << 18, 16, 200, 8);
    const auto doubled = manipulation_epochs(p, 1u << 18, 32, 200, 8);
    const bool mono = doubled.mean_rounds < base.mean_rounds && doubled.mean_reported > base.mean_reported;

    SpotParams rp;
    rp.R = 8.0;
    const double rho = 2.37;
    const auto epochs = rational_miner_epochs(rp, rho, 50, 2);
    int within = 0;
    for (const auto& e : epochs)
        if (e.solved >= e.threshold && e.solved < e.threshold + e.step) ++within;
    const double last = epochs.back().reported;
    return {mono && within == static_cast<int>(epochs.size()),
            "200 epochs: rounds " + fmt("%.3f", base.mean_rounds) + " -> " + fmt("%.3f", doubled.mean_rounds) +
                ", reported " + fmt("%.3f", base.mean_reported) + " -> " + fmt("%.3f", doubled.mean_reported) +
                " when hash doubles; rational miner " + std::to_string(within) + "/" + std::to_string(epochs.size()) +
                " within one step, last report " + fmt("%.3f", last) + " (true " + fmt("%.2f", rho) + ")"};
}

// ------------------------------------------------------------- causality

TimeSeries hourly(const std::vector<double>& v) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < v.size(); ++i) pts.push_back({static_cast<std::int64_t>(i) * 3600, v[i]});
    return TimeSeries(std::move(pts));
}

Verdict granger() {
    using namespace causality;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto pair = [&](double coupling) {
        std::vector<double> x(500), y(500);
        for (std::size_t t = 0; t < 500; ++t) {
            x[t] = z(rng);
            y[t] = (t ? coupling * x[t - 1] : 0.0) + z(rng);
        }
        return std::pair{hourly(x), hourly(y)};
    };
    int strong = 0;
    for (int s = 0; s < 100; ++s) {
        const auto [x, y] = pair(0.5);
        if (granger_test(x, y).strength == Strength::Strong) ++strong;
    }
    int flagged = 0;
    const int nulls = 400;
    for (int s = 0; s < nulls; ++s) {
        const auto [x, y] = pair(0.0);
        if (granger_test(x, y).p_value <= 0.05) ++flagged;
    }
    const double rate = static_cast<double>(flagged) / nulls;

    const auto cfg = *sim::preset("price-shocks");
    const auto run = sim::run_simulation(cfg);
    const auto [actual, eq] = sim::trace_allocations(cfg, run);
    int fwd = 0, fwd_hit = 0, back = 0, back_absent = 0;
    for (const auto& r : granger_grid(actual, eq, Bucket::month())) {
        if (!r.result) continue;
        if (r.direction == kPriceToSecurity) {
            ++fwd;
            if (r.result->strength >= Strength::Moderate) ++fwd_hit;
        } else {
            ++back;
            if (r.result->strength == Strength::Absent) ++back_absent;
        }
    }
    const bool asym = fwd > 0 && back > 0 && 2 * fwd_hit > fwd && 2 * back_absent > back;
    return {strong >= 95 && std::abs(rate - 0.05) <= 0.03 && asym,
            "strong in " + std::to_string(strong) + "/100 (>= 95); null flagged " + fmt("%.3f", rate) +
                " (0.05 +/- 0.03); price shocks: price->security moderate+ " + std::to_string(fwd_hit) + "/" +
                std::to_string(fwd) + ", security->price absent " + std::to_string(back_absent) + "/" + std::to_string(back)};
}

Verdict adf() {
    using namespace causality;
    std::mt19937_64 rng(10);
    std::normal_distribution<double> z(0.0, 1.0);
    int level_keep = 0, diff_reject = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> w(1000), d(999);
        double acc = 0.0;
        for (auto& v : w) v = acc += z(rng);
        for (std::size_t t = 1; t < w.size(); ++t) d[t - 1] = w[t] - w[t - 1];
        const auto lv = adf_test(w).bucket;
        if (lv != "<=0.05" && lv != "<=0.01") ++level_keep;
        if (adf_test(d).bucket == "<=0.01") ++diff_reject;
    }
    return {level_keep >= 85 && diff_reject >= 95,
            "random-walk levels not rejected at 5% in " + std::to_string(level_keep) + "/100 (>= 85); differences at <=0.01 in " +
                std::to_string(diff_reject) + "/100 (>= 95)"};
}

// ------------------------------------------------------------- contracts

Verdict contracts() {
    const auto bad = fixtures::transition_failures();
    const int leaks = fixtures::conservation_failures(1000, 12);

    // Oracle: a random submission log with stale and tampered headers.
    std::mt19937_64 rng(13);
    std::vector<double> diffs;
    for (int i = 0; i < 12; ++i) diffs.push_back(6.0 + static_cast<double>(rng() % 8));
    const auto b = fixtures::chain_with(diffs, 5);
    const auto genesis = fixtures::genesis_of(b);
    Oracle live({1, 1}, genesis);
    std::vector<BlockHeader> log;
    for (int i = 0; i < 200; ++i) {
        BlockHeader h = (rng() % 3 == 0) ? *b.at(1 + rng() % b.height())
                                         : *b.at(std::min(live.headers_b().height() + 1, b.height()));
        if (rng() % 7 == 0) h.nonce ^= 1;
        log.push_back(h);
        live.update(h);
    }
    const bool oracle_same = replay_oracle({1, 1}, genesis, log) == live;

    // Spot: host blocks, solves and queries.
    const auto host = HeaderChain::with_genesis(fixtures::kSpace, DaaRule::fixed(), fixtures::kSpace.size() / 4);
    SpotParams sp;
    sp.initial_target = 1u << 18;
    SpotSession session(host, sp, fixtures::kSpace);
    for (int blk = 1; blk <= 300; ++blk) {
        session.advance_host(blk, rng() & 0xffffffff);
        if (rng() % 3 == 0) session.grind("m" + std::to_string(rng() % 3), rng(), 64);
        if (rng() % 5 == 0) session.apply(SpotSession::Query{0.01 * static_cast<double>(rng() % 10)});
    }
    const bool spot_same = SpotSession::replay(host, sp, fixtures::kSpace, session.log).same_state(session);

    std::string detail = std::to_string(bad.size()) + " transition violations";
    if (!bad.empty()) detail += " (first: " + bad.front() + ")";
    detail += "; " + std::to_string(leaks) + "/1000 lifecycles leaked coins; replay reproduces oracle " +
              (oracle_same ? "yes" : "no") + ", spot " + (spot_same ? "yes" : "no") + " (" +
              std::to_string(session.spot.solves()) + " solves)";
    return {bad.empty() && leaks == 0 && oracle_same && spot_same, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
        {1, mdp_cli},      {2, mdp_cross_method}, {3, no_arbitrage}, {4, nash}, {5, attractor}, {6, oracle_accuracy},
        {7, psnr},         {8, spot},             {9, granger},      {10, adf}, {11, contracts}};
    int failed = 0;
    for (const auto& [n, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << v.detail << std::endl;
        if (n == 2) std::cout << "     integer actions, hash-ratio tail (not scored): " << mdp_integer_grid_note() << std::endl;
        if (!v.pass) ++failed;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failed ? 1 : 0;
}
