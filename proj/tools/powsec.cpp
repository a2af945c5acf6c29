// powsec: command-line front end for the security-allocation toolkit.
//
// Exit status: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "config.hpp"
#include "powsec/causality.hpp"
#include "powsec/csv.hpp"
#include "powsec/equilibrium.hpp"
#include "powsec/futures.hpp"
#include "powsec/header_chain.hpp"
#include "powsec/market.hpp"
#include "powsec/mdp.hpp"
#include "powsec/oracle.hpp"
#include "powsec/roundtrip.hpp"
#include "powsec/simulator.hpp"
#include "powsec/spot.hpp"

namespace fs = std::filesystem;
using namespace powsec;
using namespace powsec::cli;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string out = "powsec-out";
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON config file; flags override its values");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_set = true; }, "random seed");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
}

fs::path prepare_out(const Common& c) {
    fs::create_directories(c.out);
    return c.out;
}

std::string fixed4(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- metrics

int utc_year(std::int64_t tau) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_seconds{seconds(tau)})};
    return static_cast<int>(ymd.year());
}

void write_metrics(const fs::path& path, const AllocationSeries& actual, const AllocationSeries& predicted) {
    std::map<int, std::pair<AllocationSeries, AllocationSeries>> by_year;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        auto& slot = by_year[utc_year(actual[i].tau)];
        slot.first.push_back(actual[i]);
        slot.second.push_back(predicted[i]);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    const auto row = [&](const std::string& label, const FitMetrics& m) {
        out << label << ',' << fixed4(m.rmse) << ',' << fixed4(m.mae) << ',' << fixed4(m.me) << ',' << fixed4(m.psnr) << ','
            << m.n << '\n';
    };
    out << "period,RMSE,MAE,ME,PSNR,n\n";
    row("all", fit_metrics(actual, predicted));
    if (by_year.size() > 1)
        for (const auto& [year, series] : by_year) row(std::to_string(year), fit_metrics(series.first, series.second));
}

std::pair<AllocationSeries, AllocationSeries> align(const AllocationSeries& a, const AllocationSeries& b) {
    const TimeSeries sa = share_a(a), sb = share_a(b);
    const auto taus = common_timestamps({&sa, &sb});
    if (taus.empty()) throw Error("allocation series share no timestamps");
    return {allocation_series_from_share(restrict_to(sa, taus)), allocation_series_from_share(restrict_to(sb, taus))};
}

void print_metrics_file(const fs::path& path) {
    std::ifstream in(path);
    std::cout << in.rdbuf();
}

// ------------------------------------------------------------ equilibrium

struct EquilibriumArgs {
    std::string chain_a, chain_b, prices, sigma;
    double T_a = 600, T_b = 600, k_a = 6.25, k_b = 6.25;
    double half_life = 96 * 3600.0;
    double pool_scale = 1.0;
    bool check_arbitrage = false;
};

// Per timestamp, the symmetric move an arbitrageur would make from the actual
// allocation and its payoff. Payoffs come from the relative reward implied by
// the equilibrium share.
void write_arbitrage(const fs::path& path, const AllocationSeries& actual, const AllocationSeries& eq, double T_a,
                     double T_b) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "tau,w_A,w_eq_A,dw_A,payoff\n";
    std::size_t moves = 0, positive = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double w = eq[i].w.a();
        const double R = w * T_a / (w * T_a + (1.0 - w) * T_b);
        const Pair pi = payoff_vector(R, 1.0 - R, T_a, T_b);
        const Allocation& now = actual[i].w;
        double dw = 0.0, payoff = 0.0;
        if (now.a() > 0.0 && now.b() > 0.0) {
            if (const auto move = find_arbitrage(now, pi, T_a, T_b, 0.01)) {
                dw = move->dw.a;
                payoff = rebalancing_payoff(move->dc, pi);
                ++moves;
                positive += payoff > 0.0;
            }
        }
        out << actual[i].tau << ',' << csv::format_real(now.a()) << ',' << csv::format_real(w) << ','
            << csv::format_real(dw) << ',' << csv::format_real(payoff) << '\n';
    }
    std::cout << "arbitrage: " << moves << " of " << actual.size() << " timestamps off equilibrium, " << positive
              << " with positive payoff\n";
}

int cmd_equilibrium(const Common& c, EquilibriumArgs args, const CLI::App& sub) {
    fs::path base = ".";
    if (!c.config.empty()) {
        const json j = load_json(c.config);
        check_keys(j, {"chain_a", "chain_b", "prices", "sigma", "T_a", "T_b", "k_a", "k_b", "half_life", "pool_scale"},
                   "equilibrium config");
        base = fs::path(c.config).parent_path();
        const auto path_or = [&](const char* key, std::string& dst, const char* flag) {
            if (j.contains(key) && sub.count(flag) == 0) dst = (base / j[key].get<std::string>()).string();
        };
        const auto num_or = [&](const char* key, double& dst, const char* flag) {
            if (j.contains(key) && sub.count(flag) == 0) dst = j[key].get<double>();
        };
        path_or("chain_a", args.chain_a, "--chain-a");
        path_or("chain_b", args.chain_b, "--chain-b");
        path_or("prices", args.prices, "--prices");
        path_or("sigma", args.sigma, "--sigma");
        num_or("T_a", args.T_a, "--T-a");
        num_or("T_b", args.T_b, "--T-b");
        num_or("k_a", args.k_a, "--k-a");
        num_or("k_b", args.k_b, "--k-b");
        num_or("half_life", args.half_life, "--half-life");
        num_or("pool_scale", args.pool_scale, "--pool-scale");
    }
    if (args.chain_a.empty() || args.chain_b.empty() || args.prices.empty())
        throw UsageError("equilibrium needs --chain-a, --chain-b and --prices (or a config naming them)");

    const ChainParams pa{"A", args.T_a, args.k_a, ""}, pb{"B", args.T_b, args.k_b, ""};
    pa.validate();
    pb.validate();
    const auto obs_a = ChainObservations::from_csv(args.chain_a, args.pool_scale);
    const auto obs_b = ChainObservations::from_csv(args.chain_b, args.pool_scale);
    const csv::Table prices = csv::read(args.prices);
    const auto p_taus = prices.integers("tau");
    const TimeSeries P_A = TimeSeries::from_columns(p_taus, prices.reals("P_A"));
    const TimeSeries P_B = TimeSeries::from_columns(p_taus, prices.reals("P_B"));
    TimeSeries s_A, s_B;
    if (args.sigma.empty()) {
        s_A = s_B = obs_a.difficulty.transformed([](double) { return 1.0; });
    } else {
        const csv::Table sig = csv::read(args.sigma);
        const auto s_taus = sig.integers("tau");
        s_A = TimeSeries::from_columns(s_taus, sig.reals("sigma_A"));
        s_B = TimeSeries::from_columns(s_taus, sig.reals("sigma_B"));
    }

    const auto actual = actual_allocation_series(obs_a, obs_b, pa, pb, s_A, s_B, args.half_life);
    const auto eq = equilibrium_series(P_A, P_B, obs_a.fees, obs_b.fees, pa, pb, args.half_life);
    const auto [act, pred] = align(actual, eq);

    const fs::path out = prepare_out(c);
    csv::write_allocations(out / "actual.csv", act);
    csv::write_allocations(out / "equilibrium.csv", pred);
    write_metrics(out / "metrics.txt", act, pred);
    if (args.check_arbitrage) write_arbitrage(out / "arbitrage.csv", act, pred, args.T_a, args.T_b);
    write_json(out / "config.resolved.json",
               {{"chain_a", args.chain_a}, {"chain_b", args.chain_b}, {"prices", args.prices}, {"sigma", args.sigma},
                {"T_a", args.T_a}, {"T_b", args.T_b}, {"k_a", args.k_a}, {"k_b", args.k_b},
                {"half_life", args.half_life}, {"pool_scale", args.pool_scale}, {"seed", c.seed}});
    print_metrics_file(out / "metrics.txt");
    return 0;
}

int cmd_metrics(const Common& c, const std::string& actual_path, const std::string& predicted_path) {
    const auto [act, pred] = align(csv::read_allocations(actual_path), csv::read_allocations(predicted_path));
    const fs::path out = prepare_out(c);
    write_metrics(out / "metrics.txt", act, pred);
    write_json(out / "config.resolved.json", {{"actual", actual_path}, {"predicted", predicted_path}, {"seed", c.seed}});
    print_metrics_file(out / "metrics.txt");
    return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string preset = "motivating";
    std::int64_t horizon = 0;
    bool observations = false;
    bool headers = false;
    bool allocations = false;
    double warmup = 0.0;
    double header_difficulty = 64.0;
};

sim::SimConfig resolve_sim(const Common& c, const SimulateArgs& a) {
    auto base = sim::preset(a.preset);
    if (!base) {
        std::string names;
        for (const auto& n : sim::preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw UsageError("unknown preset '" + a.preset + "' (" + names + ")");
    }
    sim::SimConfig cfg = *base;
    if (!c.config.empty()) cfg = sim_config_from_json(load_json(c.config), cfg, fs::path(c.config).parent_path());
    if (c.seed_set) cfg.seed = c.seed;
    if (a.horizon > 0) cfg.horizon_blocks = a.horizon;
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

void write_observations(const fs::path& out, const sim::SimConfig& cfg, const sim::SimResult& r, double warmup) {
    const auto obs = sim::hourly_observations(cfg, r);
    const std::int64_t cutoff = cfg.epoch + static_cast<std::int64_t>(warmup);
    const char* names[2] = {"chain_a.csv", "chain_b.csv"};
    for (int x = 0; x < 2; ++x) {
        std::ofstream f(out / names[x]);
        f << "tau,difficulty,block_time,fees\n";
        for (std::size_t i = 0; i < obs.difficulty[x].size(); ++i) {
            const auto& d = obs.difficulty[x][i];
            if (d.tau < cutoff) continue;
            f << d.tau << ',' << csv::format_real(d.value) << ',' << csv::format_real(obs.block_time[x][i].value) << ",0\n";
        }
    }
    std::ofstream p(out / "prices.csv"), s(out / "sigma.csv");
    p << "tau,P_A,P_B\n";
    s << "tau,sigma_A,sigma_B\n";
    for (std::size_t i = 0; i < obs.price[0].size(); ++i) {
        const std::int64_t tau = obs.price[0][i].tau;
        if (tau < cutoff) continue;
        p << tau << ',' << csv::format_real(obs.price[0][i].value) << ',' << csv::format_real(obs.price[1][i].value) << '\n';
        s << tau << ",1,1\n";
    }
}

int cmd_simulate(const Common& c, const SimulateArgs& a) {
    const sim::SimConfig cfg = resolve_sim(c, a);
    const sim::SimResult r = sim::run_simulation(cfg);
    const fs::path out = prepare_out(c);
    sim::write_trace_csv(out / "trace.csv", r.trace);
    json resolved = to_json(cfg);
    resolved["preset"] = a.preset;
    write_json(out / "config.resolved.json", resolved);

    const auto& last = r.trace.back();
    std::ofstream summary(out / "summary.txt");
    summary << "end_time " << fixed4(r.end_time) << "\nblocks_A " << r.blocks[0].size() << "\nblocks_B " << r.blocks[1].size()
            << "\nterminal_D_A " << fixed4(last.D_A) << "\nterminal_D_B " << fixed4(last.D_B) << "\nsteady_mean_distance "
            << fixed4(r.steady.mean_distance) << "\nsteady_mean_w_A " << fixed4(r.steady.mean_w_A) << "\nsteady_mean_w_eq_A "
            << fixed4(r.steady.mean_w_eq_A) << "\nsteady_mean_D_ratio " << fixed4(r.steady.mean_D_ratio) << '\n';
    for (const auto& w : r.warnings) summary << "warning " << w << '\n';

    if (a.observations) write_observations(out, cfg, r, a.warmup);
    if (a.allocations) {
        const auto [actual, eq] = sim::trace_allocations(cfg, r);
        csv::write_allocations(out / "actual.csv", actual);
        csv::write_allocations(out / "equilibrium.csv", eq);
    }
    if (a.headers) {
        const HeaderPair pair = mine_header_pair(cfg, r, HashSpace::test(24), a.header_difficulty, cfg.seed);
        write_headers_jsonl(out / "headers_a.jsonl", pair.a.headers());
        write_headers_jsonl(out / "headers_b.jsonl", pair.b.headers());
        summary << "header_difficulty_scale " << csv::format_real(pair.scale) << '\n';
    }
    std::cout << "terminal: D_A=" << fixed4(last.D_A) << " D_B=" << fixed4(last.D_B) << '\n'
              << "steady mean |w - w_eq|: " << fixed4(r.steady.mean_distance) << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

// -------------------------------------------------------------------- mdp

struct MdpArgs {
    std::string preset = "motivating";
    double discount = 0.0;
    std::string tail;
    double tail_rate = 0.0;
    double action_step = 0.0;
    double tol = 1e-10;
};

int cmd_mdp(const Common& c, const MdpArgs& a) {
    mdp::MdpConfig cfg = mdp_preset(a.preset);
    if (!c.config.empty()) cfg = mdp_config_from_json(load_json(c.config), cfg);
    if (a.discount > 0.0) cfg.discount = a.discount;
    if (!a.tail.empty()) cfg = mdp_config_from_json(json{{"tail", a.tail}}, cfg);
    if (a.tail_rate > 0.0) cfg.tail_rate = a.tail_rate;
    if (a.action_step > 0.0) cfg.action_grid = grid(0.0, cfg.H, a.action_step);
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    const auto t0 = std::chrono::steady_clock::now();
    const mdp::MdpModel model = mdp::build_mdp(cfg);
    const mdp::Policy policy = mdp::solve_value_iteration(model, a.tol);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path out = prepare_out(c);
    json resolved = to_json(cfg);
    resolved["preset"] = a.preset;
    resolved["tolerance"] = a.tol;
    resolved["seed"] = c.seed;
    write_json(out / "config.resolved.json", resolved);

    const auto stationary = mdp::stationary_states(policy, model);
    const std::set<std::pair<double, double>> marks(stationary.begin(), stationary.end());
    std::ofstream csv_out(out / "policy.csv");
    csv_out << "D_A,D_B,action,is_stationary\n";
    const auto& g = cfg.difficulty_grid;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            csv_out << csv::format_real(g[i]) << ',' << csv::format_real(g[j]) << ','
                    << csv::format_real(policy.action_at(i, j)) << ',' << (marks.contains({g[i], g[j]}) ? 1 : 0) << '\n';
    csv_out.close();

    std::cerr << "value iteration: " << policy.iterations << " sweeps, " << fixed4(secs) << " s, "
              << kernels::isa_name(kernels::active_isa()) << '\n';
    const auto [d_a, d_b] = mdp::concentration_point(policy, model);
    std::cout << "concentration: D_A=" << csv::format_real(d_a) << " D_B=" << csv::format_real(d_b) << '\n';
    return 0;
}

// ---------------------------------------------------------- oracle-replay

DaaRule parse_daa_rule(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    try {
        if (parts.size() == 1 && parts[0] == "fixed") return DaaRule::fixed();
        if (!parts.empty() && parts[0] == "bounded" && parts.size() <= 2)
            return DaaRule::bounded(parts.size() == 2 ? std::stoull(parts[1]) : 4);
        if (!parts.empty() && parts[0] == "window" && (parts.size() == 3 || parts.size() == 4))
            return DaaRule::window(static_cast<std::uint32_t>(std::stoul(parts[1])), std::stoll(parts[2]),
                                   parts.size() == 4 ? std::stoull(parts[3]) : 4);
    } catch (const std::exception&) {
    }
    throw UsageError("DAA rule must be fixed, bounded[:clamp] or window:<n>:<T>[:clamp], got '" + s + "'");
}

struct ReplayArgs {
    std::string headers_a, headers_b;
    double sigma_delta = 1.0;
    std::vector<std::string> queries;
    std::string hash = "test";
    unsigned bits = 24;
    std::string daa_a = "bounded", daa_b = "bounded";
    double k_a = 1.0, k_b = 1.0;
};

HeaderChain load_chain(const std::vector<BlockHeader>& headers, HashSpace space, DaaRule rule, const char* label) {
    if (headers.empty()) throw UsageError(std::string("chain ") + label + ": header file is empty");
    return HeaderChain(space, rule, headers.front());
}

int cmd_oracle_replay(const Common& c, const ReplayArgs& a) {
    if (a.hash != "test" && a.hash != "sha256") throw UsageError("--hash must be test or sha256");
    const HashSpace space(a.hash == "test" ? HashSpace::Kind::Test : HashSpace::Kind::Sha256, a.bits);
    const auto ha = read_headers_jsonl(a.headers_a);
    const auto hb = read_headers_jsonl(a.headers_b);

    HeaderChain host = load_chain(ha, space, parse_daa_rule(a.daa_a), "A");
    for (std::size_t i = 1; i < ha.size(); ++i)
        if (const auto r = host.append(ha[i]); r != UpdateResult::Appended)
            throw Error("chain A height " + std::to_string(ha[i].height) + ": " + to_string(r));
    Oracle oracle({a.k_a, a.k_b}, load_chain(hb, space, parse_daa_rule(a.daa_b), "B"));
    for (std::size_t i = 1; i < hb.size(); ++i)
        if (const auto r = oracle.update(hb[i]); r != UpdateResult::Appended)
            throw Error("chain B height " + std::to_string(hb[i].height) + ": " + to_string(r));

    std::vector<std::pair<std::uint64_t, std::uint64_t>> qs;
    for (const auto& q : a.queries) {
        const auto colon = q.find(':');
        try {
            if (colon == std::string::npos) throw std::invalid_argument(q);
            qs.emplace_back(std::stoull(q.substr(0, colon)), std::stoull(q.substr(colon + 1)));
        } catch (const std::exception&) {
            throw UsageError("--query takes <height_A>:<height_B>, got '" + q + "'");
        }
    }
    if (qs.empty()) qs.emplace_back(host.height(), oracle.headers_b().height());

    const fs::path out = prepare_out(c);
    std::ofstream csv_out(out / "ratios.csv");
    csv_out << "b_A,b_B,ratio\n";
    std::cout << "chain A: " << host.height() << " headers, chain B: " << oracle.headers_b().height() << " headers accepted\n";
    for (const auto& [b_a, b_b] : qs) {
        const double ratio = oracle.query(host, b_a, b_b, a.sigma_delta);
        csv_out << b_a << ',' << b_b << ',' << csv::format_real(ratio) << '\n';
        std::cout << "P_B/P_A at (" << b_a << ", " << b_b << "): " << csv::format_real(ratio) << '\n';
    }
    write_json(out / "config.resolved.json",
               {{"headers_a", a.headers_a}, {"headers_b", a.headers_b}, {"sigma_delta", a.sigma_delta},
                {"queries", a.queries}, {"hash", a.hash}, {"bits", a.bits}, {"daa_a", a.daa_a}, {"daa_b", a.daa_b},
                {"k_a", a.k_a}, {"k_b", a.k_b}, {"seed", c.seed}});
    return 0;
}

// --------------------------------------------------------------- spot-sim

struct SpotArgs {
    SpotParams params{16, 0.5, 10, 8.0, 1.0, 0};
    double rho = 2.37;
    std::size_t epochs = 20;
    std::uint64_t attacker_hash = 16;
    std::size_t attack_epochs = 200;
};

int cmd_spot_sim(const Common& c, SpotArgs a) {
    if (!c.config.empty()) {
        const json j = load_json(c.config);
        check_keys(j, {"j", "alpha", "N", "R", "k_A", "rho", "epochs", "attacker_hash", "attack_epochs"}, "spot config");
        a.params.j = j.value("j", a.params.j);
        a.params.alpha = j.value("alpha", a.params.alpha);
        a.params.N = j.value("N", a.params.N);
        a.params.R = j.value("R", a.params.R);
        a.params.k_A = j.value("k_A", a.params.k_A);
        a.rho = j.value("rho", a.rho);
        a.epochs = j.value("epochs", a.epochs);
        a.attacker_hash = j.value("attacker_hash", a.attacker_hash);
        a.attack_epochs = j.value("attack_epochs", a.attack_epochs);
    }
    try {
        a.params.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const fs::path out = prepare_out(c);

    const auto epochs = rational_miner_epochs(a.params, a.rho, a.epochs, c.seed);
    std::ofstream r(out / "rational.csv");
    r << "epoch,threshold,solved_target,step,reported_sigma_delta\n";
    std::size_t within = 0;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        const auto& e = epochs[i];
        r << i << ',' << e.threshold << ',' << e.solved << ',' << e.step << ',' << csv::format_real(e.reported) << '\n';
        within += e.solved >= e.threshold && e.solved - e.threshold < e.step;
    }

    const std::uint64_t S = std::uint64_t{1} << 24;
    const std::uint64_t reference = S / (a.attacker_hash * (a.params.N + 1));
    const auto base = manipulation_epochs(a.params, reference, a.attacker_hash, a.attack_epochs, c.seed);
    const auto doubled = manipulation_epochs(a.params, reference, 2 * a.attacker_hash, a.attack_epochs, c.seed);
    std::ofstream m(out / "manipulation.csv");
    m << "attacker_hash_per_block,mean_rounds,mean_reported_sigma_delta\n"
      << a.attacker_hash << ',' << csv::format_real(base.mean_rounds) << ',' << csv::format_real(base.mean_reported) << '\n'
      << 2 * a.attacker_hash << ',' << csv::format_real(doubled.mean_rounds) << ',' << csv::format_real(doubled.mean_reported)
      << '\n';

    write_json(out / "config.resolved.json",
               {{"j", a.params.j}, {"alpha", a.params.alpha}, {"N", a.params.N}, {"R", a.params.R}, {"k_A", a.params.k_A},
                {"rho", a.rho}, {"epochs", a.epochs}, {"attacker_hash", a.attacker_hash},
                {"attack_epochs", a.attack_epochs}, {"seed", c.seed}});
    std::cout << "rational miner: " << within << "/" << epochs.size() << " epochs solved within one target step; "
              << "last reported sigma_A/sigma_B = " << fixed4(epochs.back().reported) << " (true " << fixed4(a.rho) << ")\n"
              << "attacker h=" << a.attacker_hash << ": mean rounds " << fixed4(base.mean_rounds) << ", mean report "
              << fixed4(base.mean_reported) << "\nattacker h=" << 2 * a.attacker_hash << ": mean rounds "
              << fixed4(doubled.mean_rounds) << ", mean report " << fixed4(doubled.mean_reported) << '\n';
    return 0;
}

// ------------------------------------------------------------ future-demo

// Same economy twice: flat prices, and P_B/P_A doubling halfway through.
sim::SimConfig demo_economy(bool doubling, std::uint64_t seed) {
    sim::SimConfig cfg = sim::motivating_preset();
    cfg.prices = doubling ? sim::PricePath::scripted({{0.0, 4.0, 1.0}, {5000.0, 2.0, 1.0}})
                          : sim::PricePath::constant(4.0, 1.0);
    cfg.horizon_blocks = 6000;
    cfg.seed = seed;
    cfg.epoch = 1577836800;
    return cfg;
}

int cmd_future_demo(const Common& c) {
    const fs::path out = prepare_out(c);
    std::ofstream report(out / "future_demo.txt");
    const auto say = [&](const std::string& line) {
        std::cout << line << '\n';
        report << line << '\n';
    };

    std::array<Amount, 2> payouts{};
    for (int scenario = 0; scenario < 2; ++scenario) {
        const sim::SimConfig cfg = demo_economy(scenario == 1, c.seed);
        const sim::SimResult run = sim::run_simulation(cfg);
        HeaderPair pair = mine_header_pair(cfg, run, HashSpace::test(24), 64.0, c.seed);
        const Oracle oracle({cfg.chains[0].params.k, cfg.chains[1].params.k}, pair.b);

        Ledger ledger;
        ledger.mint("guarantor", Coin::A, 10 * kCoin);
        ledger.mint("beneficiary", Coin::A, kCoin);
        Future f("future", "guarantor", "beneficiary");
        f.deposit(ledger, {"guarantor"}, 2 * kCoin);
        const std::int64_t t_issue = cfg.epoch + 1000, t_expiry = cfg.epoch + static_cast<std::int64_t>(run.end_time) - 500;
        f.issue(ledger, {"guarantor", "beneficiary"}, height_at(pair.a, t_issue), height_at(pair.b, t_issue),
                height_at(pair.a, t_expiry), height_at(pair.b, t_expiry), kCoin / 100);
        payouts[scenario] = f.redeem(ledger, {"beneficiary"}, oracle, pair.a, 1.0);
        say(std::string(scenario == 0 ? "flat prices" : "P_B/P_A doubles") + ": beneficiary receives " +
            fixed4(static_cast<double>(payouts[scenario]) / kCoin) + " A for one B; guarantor keeps " +
            fixed4(static_cast<double>(ledger.balance("guarantor", Coin::A)) / kCoin) + " A");

        if (scenario == 1) {
            MarginTerms terms;
            terms.long_b = "alice";
            terms.short_b = "bob";
            terms.c_B = 4 * kCoin;
            terms.c_A = kCoin;
            terms.m = 0.5;
            terms.z = 6;
            const std::uint64_t start_a = height_at(pair.a, t_issue), start_b = height_at(pair.b, t_issue);
            const std::uint64_t end_a = height_at(pair.a, t_expiry) - 10, end_b = height_at(pair.b, t_expiry) - 10;
            terms.length_A = end_a - start_a;
            terms.length_B = end_b - start_b;
            terms.height_tolerance = std::nullopt;
            const auto prefix = [](const HeaderChain& ch, std::uint64_t h) {
                return HeaderChain(ch.space(), ch.rule(), *ch.at(h));
            };
            Ledger margin_ledger;
            margin_ledger.mint("alice", Coin::A, 5 * kCoin);
            margin_ledger.mint("bob", Coin::B, 5 * kCoin);
            MarginFuture mf("margin", terms, prefix(pair.a, start_a), prefix(pair.b, start_b));
            mf.open(margin_ledger, {"alice", "bob"});
            const auto ha = pair.a.headers().subspan(start_a + 1);
            const auto hb = pair.b.headers().subspan(start_b + 1);
            mf.submit_headers(margin_ledger, ha, hb);
            if (mf.phase() == MarginFuture::Phase::Open) mf.settle(margin_ledger);
            say(std::string("margin future (alice long B, margins ") + fixed4(static_cast<double>(terms.margin_A()) / kCoin) +
                " A / " + fixed4(static_cast<double>(terms.margin_B()) / kCoin) + " B): phase " + to_string(mf.phase()) +
                "; alice " + fixed4(static_cast<double>(margin_ledger.balance("alice", Coin::A)) / kCoin) + " A + " +
                fixed4(static_cast<double>(margin_ledger.balance("alice", Coin::B)) / kCoin) + " B, bob " +
                fixed4(static_cast<double>(margin_ledger.balance("bob", Coin::A)) / kCoin) + " A + " +
                fixed4(static_cast<double>(margin_ledger.balance("bob", Coin::B)) / kCoin) + " B");
        }
    }
    say("payout ratio doubling/flat: " + fixed4(static_cast<double>(payouts[1]) / static_cast<double>(payouts[0])));
    write_json(out / "config.resolved.json", {{"seed", c.seed}, {"economy", to_json(demo_economy(true, c.seed))}});
    return 0;
}

// ---------------------------------------------------------------- granger

int cmd_granger(const Common& c, const std::string& actual, const std::string& eq, const std::string& bucket_text,
                std::size_t lag) {
    causality::Bucket bucket;
    try {
        bucket = causality::Bucket::parse(bucket_text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto rows = causality::granger_grid(csv::read_allocations(actual), csv::read_allocations(eq), bucket, lag);
    bool any = false;
    for (const auto& r : rows) any = any || r.result.has_value();
    if (!any) throw Error("no bucket has enough data for a Granger test");
    const fs::path out = prepare_out(c);
    causality::write_grid_csv((out / "granger.csv").string(), rows);
    write_json(out / "config.resolved.json",
               {{"actual", actual}, {"equilibrium", eq}, {"bucket", bucket_text}, {"lag", lag}, {"seed", c.seed}});
    std::map<std::string, std::map<std::string, int>> tally;
    for (const auto& r : rows) tally[r.direction][r.result ? causality::to_string(r.result->strength) : r.marker]++;
    for (const auto& [dir, counts] : tally) {
        std::cout << dir << ':';
        for (const auto& [label, n] : counts) std::cout << ' ' << label << '=' << n;
        std::cout << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proof-of-work security allocation toolkit"};
    app.require_subcommand(1);
    Common common;

    auto* eq = app.add_subcommand("equilibrium", "actual vs equilibrium allocation from chain observations");
    EquilibriumArgs eq_args;
    add_common(eq, common);
    eq->add_option("--chain-a", eq_args.chain_a, "tau,difficulty,block_time,fees for chain A");
    eq->add_option("--chain-b", eq_args.chain_b, "tau,difficulty,block_time,fees for chain B");
    eq->add_option("--prices", eq_args.prices, "tau,P_A,P_B");
    eq->add_option("--sigma", eq_args.sigma, "tau,sigma_A,sigma_B (default: equal hash prices)");
    eq->add_option("--T-a", eq_args.T_a, "target block time of A, seconds");
    eq->add_option("--T-b", eq_args.T_b, "target block time of B, seconds");
    eq->add_option("--k-a", eq_args.k_a, "coinbase reward of A, coins");
    eq->add_option("--k-b", eq_args.k_b, "coinbase reward of B, coins");
    eq->add_option("--half-life", eq_args.half_life, "EWMA half-life, seconds");
    eq->add_option("--pool-scale", eq_args.pool_scale, "1, or 2^32 for pool-share difficulties");
    eq->add_flag("--check-arbitrage", eq_args.check_arbitrage, "write arbitrage.csv: the arbitrage move at each timestamp");

    auto* metrics = app.add_subcommand("metrics", "RMSE/MAE/ME/PSNR between two allocation files");
    std::string m_actual, m_predicted;
    add_common(metrics, common);
    metrics->add_option("--actual", m_actual, "tau,w_A")->required();
    metrics->add_option("--predicted", m_predicted, "tau,w_A")->required();

    auto* simulate = app.add_subcommand("simulate", "discrete-event two-chain mining simulation");
    SimulateArgs sim_args;
    add_common(simulate, common);
    simulate->add_option("--preset", sim_args.preset, "motivating, equal, btc-bch-like, btc-ltc-like, price-shocks")->capture_default_str();
    simulate->add_option("--horizon", sim_args.horizon, "total blocks across both chains");
    simulate->add_flag("--emit-observations", sim_args.observations, "write hourly chain_a/chain_b/prices/sigma CSVs");
    simulate->add_option("--warmup", sim_args.warmup, "seconds of observations to drop from the start");
    simulate->add_flag("--emit-allocations", sim_args.allocations, "write sampled actual.csv and equilibrium.csv");
    simulate->add_flag("--emit-headers", sim_args.headers, "mine JSON-lines header chains for both chains");
    simulate->add_option("--header-difficulty", sim_args.header_difficulty, "largest mined difficulty, hashes");

    auto* mdp_cmd = app.add_subcommand("mdp", "value iteration for the single-miner allocation MDP");
    MdpArgs mdp_args;
    add_common(mdp_cmd, common);
    mdp_cmd->add_option("--preset", mdp_args.preset, "motivating, equal, ratio-3-1, ratio-5-1, ratio-1-2")->capture_default_str();
    mdp_cmd->add_option("--discount", mdp_args.discount, "discount factor in (0,1)");
    mdp_cmd->add_option("--tail", mdp_args.tail, "hash-ratio or fixed");
    mdp_cmd->add_option("--tail-rate", mdp_args.tail_rate, "blocks/sec after the first when --tail fixed");
    mdp_cmd->add_option("--action-step", mdp_args.action_step, "spacing of the action grid 0..H");
    mdp_cmd->add_option("--tol", mdp_args.tol, "sup-norm convergence tolerance")->capture_default_str();

    auto* replay = app.add_subcommand("oracle-replay", "replay header dumps through the price-ratio oracle");
    ReplayArgs replay_args;
    add_common(replay, common);
    replay->add_option("--headers-a", replay_args.headers_a, "JSON-lines headers of host chain A")->required();
    replay->add_option("--headers-b", replay_args.headers_b, "JSON-lines headers of chain B")->required();
    replay->add_option("--sigma-delta", replay_args.sigma_delta, "hash price ratio sigma_B/sigma_A");
    replay->add_option("--query", replay_args.queries, "<height_A>:<height_B>, repeatable (default: both tips)");
    replay->add_option("--hash", replay_args.hash, "test or sha256")->capture_default_str();
    replay->add_option("--bits", replay_args.bits, "hash-space bits")->capture_default_str();
    replay->add_option("--daa-a", replay_args.daa_a, "fixed | bounded[:clamp] | window:<n>:<T>[:clamp]")->capture_default_str();
    replay->add_option("--daa-b", replay_args.daa_b, "fixed | bounded[:clamp] | window:<n>:<T>[:clamp]")->capture_default_str();
    replay->add_option("--k-a", replay_args.k_a, "coins per block A");
    replay->add_option("--k-b", replay_args.k_b, "coins per block B");

    auto* spot = app.add_subcommand("spot-sim", "spot hash-price contract: rational miner and manipulation runs");
    SpotArgs spot_args;
    add_common(spot, common);
    spot->add_option("--rho", spot_args.rho, "true sigma_A/sigma_B")->capture_default_str();
    spot->add_option("--epochs", spot_args.epochs, "rational-miner epochs")->capture_default_str();
    spot->add_option("--reward", spot_args.params.R, "coins A per solve")->capture_default_str();
    spot->add_option("--j", spot_args.params.j, "target step divisor")->capture_default_str();
    spot->add_option("--alpha", spot_args.params.alpha, "epoch restart factor")->capture_default_str();
    spot->add_option("--N", spot_args.params.N, "host blocks per round")->capture_default_str();
    spot->add_option("--attacker-hash", spot_args.attacker_hash, "attacker puzzle hashes per host block")->capture_default_str();
    spot->add_option("--attack-epochs", spot_args.attack_epochs, "paired epochs per hash rate")->capture_default_str();

    auto* future = app.add_subcommand("future-demo", "oracle-settled future and margin future on simulated chains");
    add_common(future, common);

    auto* granger = app.add_subcommand("granger", "bucketed Granger tests between two allocation series");
    std::string g_actual, g_eq, g_bucket = "month";
    std::size_t g_lag = 1;
    add_common(granger, common);
    granger->add_option("--actual", g_actual, "tau,w_A actual allocation")->required();
    granger->add_option("--equilibrium", g_eq, "tau,w_A equilibrium allocation")->required();
    granger->add_option("--bucket", g_bucket, "month or a width in seconds")->capture_default_str();
    granger->add_option("--lag", g_lag, "lag order")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (eq->parsed()) return cmd_equilibrium(common, eq_args, *eq);
        if (metrics->parsed()) return cmd_metrics(common, m_actual, m_predicted);
        if (simulate->parsed()) return cmd_simulate(common, sim_args);
        if (mdp_cmd->parsed()) return cmd_mdp(common, mdp_args);
        if (replay->parsed()) return cmd_oracle_replay(common, replay_args);
        if (spot->parsed()) return cmd_spot_sim(common, spot_args);
        if (future->parsed()) return cmd_future_demo(common);
        if (granger->parsed()) return cmd_granger(common, g_actual, g_eq, g_bucket, g_lag);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
