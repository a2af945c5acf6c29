#include "powsec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "powsec/csv.hpp"
#include "powsec/equilibrium.hpp"
#include "powsec/market.hpp"

namespace powsec::sim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform in [0, 1) from the top 53 bits, so the stream is portable.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng, double rate) { return -std::log1p(-uniform(rng)) / rate; }

double normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform(rng);  // (0, 1]
    const double u2 = uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double initial_allocation(const MinerConfig& m) {
    if (m.initial_w_A) return *m.initial_w_A;
    if (const auto* l = std::get_if<Loyal>(&m.strategy)) return l->chain == 0 ? 1.0 : 0.0;
    if (const auto* f = std::get_if<Fixed>(&m.strategy)) return f->w_A;
    return 0.5;
}

class PriceClock {
  public:
    PriceClock(const PricePath& path, std::uint64_t seed) : path_(path), rng_(seed ^ 0x9e3779b97f4a7c15ULL) {
        switch (path_.kind) {
            case PricePath::Kind::Constant:
                P_ = {path_.P_A, path_.P_B};
                next_ = kInf;
                break;
            case PricePath::Kind::Scripted:
                P_ = {path_.steps.front().P_A, path_.steps.front().P_B};
                idx_ = 1;
                next_ = idx_ < path_.steps.size() ? path_.steps[idx_].time : kInf;
                break;
            case PricePath::Kind::RandomWalk:
                P_ = {path_.P_A, path_.P_B};
                next_ = path_.step_seconds;
                break;
        }
    }

    double next_change() const noexcept { return next_; }
    std::array<double, 2> prices() const noexcept { return P_; }

    void advance() {
        if (path_.kind == PricePath::Kind::Scripted) {
            P_ = {path_.steps[idx_].P_A, path_.steps[idx_].P_B};
            ++idx_;
            next_ = idx_ < path_.steps.size() ? path_.steps[idx_].time : kInf;
        } else if (path_.kind == PricePath::Kind::RandomWalk) {
            const double dt = path_.step_seconds;
            const double mu = (path_.drift - 0.5 * path_.volatility * path_.volatility) * dt;
            const double sd = path_.volatility * std::sqrt(dt);
            for (double& p : P_) p *= std::exp(mu + sd * normal(rng_));
            next_ += dt;
        }
    }

  private:
    const PricePath& path_;
    std::mt19937_64 rng_;
    std::array<double, 2> P_{};
    std::size_t idx_ = 0;
    double next_ = kInf;
};

}  // namespace

double daa_adjust(double S, double mean_block_time, double T, DaaKind kind, double clamp) {
    if (!(S > 0.0) || !(mean_block_time > 0.0) || !(T > 0.0)) throw Error("daa_adjust: inputs must be > 0");
    if (kind.type == DaaKind::Type::Window && kind.n_blocks < 1) throw Error("daa_adjust: window must be >= 1");
    double next = S * (T / mean_block_time);
    if (clamp > 0.0) next = std::clamp(next, S / clamp, S * clamp);
    return next;
}

PricePath PricePath::constant(double P_A, double P_B) {
    PricePath p;
    p.kind = Kind::Constant;
    p.P_A = P_A;
    p.P_B = P_B;
    return p;
}

PricePath PricePath::scripted(std::vector<PriceStep> steps) {
    if (steps.empty()) throw Error("scripted price path needs at least one step");
    PricePath p;
    p.kind = Kind::Scripted;
    p.steps = std::move(steps);
    p.P_A = p.steps.front().P_A;
    p.P_B = p.steps.front().P_B;
    return p;
}

PricePath PricePath::random_walk(double P_A, double P_B, double drift, double volatility, double step_seconds) {
    PricePath p;
    p.kind = Kind::RandomWalk;
    p.P_A = P_A;
    p.P_B = P_B;
    p.drift = drift;
    p.volatility = volatility;
    p.step_seconds = step_seconds;
    return p;
}

PricePath PricePath::from_csv(const std::filesystem::path& path) {
    csv::Table t = csv::read(path);
    const auto taus = t.integers("tau");
    const auto a = t.reals("P_A");
    const auto b = t.reals("P_B");
    std::vector<PriceStep> steps;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(a[i] > 0.0)) throw InputError(path.string(), i + 2, "P_A", "price must be > 0");
        if (!(b[i] > 0.0)) throw InputError(path.string(), i + 2, "P_B", "price must be > 0");
        if (i > 0 && taus[i] <= taus[i - 1]) throw InputError(path.string(), i + 2, "tau", "must increase");
        steps.push_back({static_cast<double>(taus[i]), a[i], b[i]});
    }
    return scripted(std::move(steps));
}

void SimConfig::validate() const {
    for (const auto& c : chains) {
        c.params.validate();
        if (c.initial_S < 0.0) throw Error("initial_S must be >= 0");
        if (c.daa.type == DaaKind::Type::Window && c.daa.n_blocks < 1) throw Error("DAA window must be >= 1 block");
        if (c.clamp < 0.0 || (c.clamp > 0.0 && c.clamp < 1.0)) throw Error("DAA clamp must be 0 or >= 1");
    }
    if (miners.empty()) throw Error("simulation needs at least one miner");
    for (const auto& m : miners) {
        if (!(m.hash_rate > 0.0)) throw Error("miner " + m.id + ": hash rate must be > 0");
        const double w = initial_allocation(m);
        if (!(w >= 0.0 && w <= 1.0)) throw Error("miner " + m.id + ": initial allocation outside [0,1]");
        if (const auto* g = std::get_if<Greedy>(&m.strategy); g && !(g->step_cap > 0.0))
            throw Error("miner " + m.id + ": step_cap must be > 0");
        if (const auto* l = std::get_if<Loyal>(&m.strategy); l && l->chain != 0 && l->chain != 1)
            throw Error("miner " + m.id + ": loyal chain must be A or B");
    }
    if (prices.kind == PricePath::Kind::Scripted && prices.steps.empty()) throw Error("empty scripted price path");
    if (!(prices.P_A > 0.0) || !(prices.P_B > 0.0)) throw Error("prices must be > 0");
    if (prices.kind == PricePath::Kind::RandomWalk && !(prices.step_seconds > 0.0))
        throw Error("random-walk step must be > 0");
    if (horizon_blocks < 1) throw Error("horizon must be >= 1 block");
    if (!(sample_interval > 0.0)) throw Error("sample interval must be > 0");
}

SimResult run_simulation(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    PriceClock clock(config.prices, seed);

    const std::size_t n_miners = config.miners.size();
    std::vector<double> w(n_miners), hash(n_miners);
    double H = 0.0;
    for (std::size_t m = 0; m < n_miners; ++m) {
        w[m] = initial_allocation(config.miners[m]);
        hash[m] = config.miners[m].hash_rate;
        H += hash[m];
    }
    std::array<double, 2> rate_hash{};  // aggregate hash per chain, updated incrementally
    for (std::size_t m = 0; m < n_miners; ++m) {
        rate_hash[0] += w[m] * hash[m];
        rate_hash[1] += (1.0 - w[m]) * hash[m];
    }

    std::array<double, 2> T{config.chains[0].params.T, config.chains[1].params.T};
    std::array<double, 2> k{config.chains[0].params.k, config.chains[1].params.k};
    std::array<double, 2> S{};
    for (int x = 0; x < 2; ++x) {
        S[x] = config.chains[x].initial_S > 0.0 ? config.chains[x].initial_S
                                                : T[x] * std::max(rate_hash[x], 1e-6 * H);
    }

    SimResult res;
    double t = 0.0;
    std::array<double, 2> last_block{0.0, 0.0};
    std::array<double, 2> hash_integral{0.0, 0.0};  // since the last adjustment
    std::array<double, 2> adjust_start{0.0, 0.0};
    std::array<std::vector<double>, 2> window;
    std::array<bool, 2> warned{false, false};

    auto w_eq_A = [&] {
        const auto P = clock.prices();
        return equilibrium_allocation(T[0], T[1], relative_reward(k[0] * P[0], k[1] * P[1])).a();
    };
    double eq_A = w_eq_A();

    double next_sample = 0.0;
    std::int64_t blocks = 0;
    const std::int64_t half = config.horizon_blocks / 2;
    bool steady = false;
    double acc_dt = 0.0, acc_dist = 0.0, acc_w = 0.0, acc_eq = 0.0, acc_ratio = 0.0;

    auto check_conservation = [&] {
        double sum = 0.0;
        for (std::size_t m = 0; m < n_miners; ++m) sum += w[m] * hash[m];
        res.max_conservation_error = std::max(res.max_conservation_error, std::abs(sum - rate_hash[0]) / H);
    };

    while (blocks < config.horizon_blocks) {
        std::array<double, 2> dt{kInf, kInf};
        for (int x = 0; x < 2; ++x) {
            const double r = rate_hash[x] / S[x];
            if (r > 0.0) {
                dt[x] = exponential(rng, r);
            } else if (!warned[x]) {
                warned[x] = true;
                res.warnings.push_back(std::string("chain ") + (x == 0 ? "A" : "B") +
                                       " has zero hash rate and stalls at t=" + std::to_string(t));
            }
        }
        const int winner = dt[0] <= dt[1] ? 0 : 1;
        const double t_block = t + dt[winner];
        const double t_price = clock.next_change();
        const double t_next = std::min({t_block, t_price, next_sample});
        if (t_next == kInf) {
            res.warnings.push_back("both chains stalled");
            break;
        }

        const double span = t_next - t;
        const double w_act = rate_hash[0] / H;
        for (int x = 0; x < 2; ++x) hash_integral[x] += rate_hash[x] * span;
        if (steady) {
            acc_dt += span;
            acc_dist += 2.0 * std::abs(w_act - eq_A) * span;
            acc_w += w_act * span;
            acc_eq += eq_A * span;
            acc_ratio += S[0] / S[1] * span;
        }
        t = t_next;

        if (t == next_sample) {
            const auto P = clock.prices();
            res.trace.push_back({t, S[0], S[1], w_act, eq_A, P[0], P[1]});
            next_sample += config.sample_interval;
            continue;
        }
        if (t == t_price && t_price < t_block) {
            clock.advance();
            eq_A = w_eq_A();
            continue;
        }

        // Block on chain `winner`.
        const int x = winner;
        BlockEvent ev;
        ev.time = t;
        ev.interarrival = t - last_block[x];
        ev.difficulty = S[x];
        last_block[x] = t;
        {
            double u = uniform(rng) * rate_hash[x];
            std::size_t chosen = 0;
            for (std::size_t m = 0; m < n_miners; ++m) {
                const double share = (x == 0 ? w[m] : 1.0 - w[m]) * hash[m];
                if (share <= 0.0) continue;
                chosen = m;
                if (u < share) break;
                u -= share;
            }
            ev.miner = chosen;
        }

        const ChainConfig& cc = config.chains[x];
        if (cc.daa.type == DaaKind::Type::PerBlock) {
            // Full adjustment to the hash applied since the last block.
            const double applied = hash_integral[x] / (t - adjust_start[x]);
            if (applied > 0.0) S[x] = daa_adjust(S[x], S[x] / applied, T[x], cc.daa, cc.clamp);
            hash_integral[x] = 0.0;
            adjust_start[x] = t;
        } else {
            window[x].push_back(ev.interarrival);
            if (static_cast<int>(window[x].size()) == cc.daa.n_blocks) {
                double sum = 0.0;
                for (double v : window[x]) sum += v;
                const double mean = sum / static_cast<double>(window[x].size());
                if (mean > 0.0) S[x] = daa_adjust(S[x], mean, T[x], cc.daa, cc.clamp);
                window[x].clear();
            }
        }
        ev.next_difficulty = S[x];
        if (config.record_blocks) res.blocks[x].push_back(ev);

        ++blocks;
        if (blocks == half && !steady) {
            steady = true;
            res.steady.start_time = t;
        }

        // Greedy miners react to every block using the difficulty-implied allocation.
        const auto P = clock.prices();
        const Pair pi = payoff_vector(k[0] * P[0], k[1] * P[1], T[0], T[1]);
        const Allocation perceived = allocation_from_security(S[0] / T[0], S[1] / T[1]);
        for (std::size_t m = 0; m < n_miners; ++m) {
            const auto* g = std::get_if<Greedy>(&config.miners[m].strategy);
            if (!g) continue;
            const auto move = find_arbitrage(perceived, pi, T[0], T[1], g->step_cap);
            if (!move) continue;
            const double next_w = std::clamp(w[m] + move->dw.a, 0.0, 1.0);
            const double d = (next_w - w[m]) * hash[m];
            rate_hash[0] += d;
            rate_hash[1] -= d;
            w[m] = next_w;
        }
        // Incremental sums drift; keep them non-negative.
        rate_hash[0] = std::max(0.0, rate_hash[0]);
        rate_hash[1] = std::max(0.0, rate_hash[1]);
        check_conservation();
    }

    res.end_time = t;
    res.final_S = S;
    res.final_w = w;
    if (acc_dt > 0.0) {
        res.steady.duration = acc_dt;
        res.steady.mean_distance = acc_dist / acc_dt;
        res.steady.mean_w_A = acc_w / acc_dt;
        res.steady.mean_w_eq_A = acc_eq / acc_dt;
        res.steady.mean_D_ratio = acc_ratio / acc_dt;
    }
    return res;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "sim_time,D_A,D_B,w_actual_A,w_eq_A,P_A,P_B\n";
    for (const auto& r : trace) {
        out << csv::format_real(r.sim_time) << ',' << csv::format_real(r.D_A) << ',' << csv::format_real(r.D_B)
            << ',' << csv::format_real(r.w_actual_A) << ',' << csv::format_real(r.w_eq_A) << ','
            << csv::format_real(r.P_A) << ',' << csv::format_real(r.P_B) << '\n';
    }
}

LoyalOffsetReport loyal_offset_experiment(const SimConfig& config) {
    config.validate();
    const auto& T0 = config.chains[0].params;
    const auto& T1 = config.chains[1].params;
    const double eq =
        equilibrium_allocation(T0.T, T1.T, relative_reward(T0.k * config.prices.P_A, T1.k * config.prices.P_B)).a();

    SimConfig baseline = config;
    double H = 0.0, greedy = 0.0, fixed_part = 0.0, bias = 0.0;
    for (std::size_t m = 0; m < config.miners.size(); ++m) {
        const auto& miner = config.miners[m];
        H += miner.hash_rate;
        if (std::holds_alternative<Greedy>(miner.strategy)) {
            greedy += miner.hash_rate;
            continue;
        }
        const double w = initial_allocation(miner);
        fixed_part += w * miner.hash_rate;
        if (std::holds_alternative<Loyal>(miner.strategy)) {
            bias += (w - eq) * miner.hash_rate;
            baseline.miners[m].strategy = Fixed{eq};
            baseline.miners[m].initial_w_A = eq;
        }
    }

    LoyalOffsetReport rep;
    rep.bias = bias / H;
    rep.greedy_share = greedy / H;
    if (greedy > 0.0) {
        rep.required_greedy_w_A = (eq * H - fixed_part) / greedy;
        rep.absorbable = rep.required_greedy_w_A >= 0.0 && rep.required_greedy_w_A <= 1.0;
        const double clamped = std::clamp(rep.required_greedy_w_A, 0.0, 1.0);
        rep.unabsorbed = (rep.required_greedy_w_A - clamped) * rep.greedy_share * -1.0;
    } else {
        rep.required_greedy_w_A = std::numeric_limits<double>::quiet_NaN();
        rep.absorbable = rep.bias == 0.0;
        rep.unabsorbed = rep.bias;
    }

    const SimResult with = run_simulation(config, config.seed);
    const SimResult base = run_simulation(baseline, config.seed);
    rep.w_A_with_loyal = with.steady.mean_w_A;
    rep.w_A_baseline = base.steady.mean_w_A;
    rep.delta = rep.w_A_with_loyal - rep.w_A_baseline;
    return rep;
}

ObservationSet hourly_observations(const SimConfig& config, const SimResult& result, double bucket) {
    if (!(bucket > 0.0)) throw Error("bucket must be > 0");
    ObservationSet out;
    const auto n_buckets = static_cast<std::int64_t>(std::floor(result.end_time / bucket));
    for (int x = 0; x < 2; ++x) {
        const auto& blocks = result.blocks[x];
        std::vector<Point> diff, bt, price;
        std::size_t j = 0;
        double last_mean = config.chains[x].params.T;
        double D = blocks.empty() ? 0.0 : blocks.front().difficulty;
        std::size_t trace_j = 0;
        for (std::int64_t b = 1; b <= n_buckets; ++b) {
            const double end = static_cast<double>(b) * bucket;
            double sum = 0.0;
            int count = 0;
            while (j < blocks.size() && blocks[j].time <= end) {
                sum += blocks[j].interarrival;
                D = blocks[j].next_difficulty;
                ++count;
                ++j;
            }
            if (count > 0) last_mean = sum / count;
            if (!(D > 0.0)) continue;
            while (trace_j + 1 < result.trace.size() && result.trace[trace_j + 1].sim_time <= end) ++trace_j;
            const std::int64_t tau = config.epoch + static_cast<std::int64_t>(end);
            diff.push_back({tau, D});
            bt.push_back({tau, last_mean});
            const auto& row = result.trace[trace_j];
            price.push_back({tau, x == 0 ? row.P_A : row.P_B});
        }
        out.difficulty[x] = TimeSeries(std::move(diff));
        out.block_time[x] = TimeSeries(std::move(bt));
        out.price[x] = TimeSeries(std::move(price));
    }
    return out;
}

SimConfig motivating_preset() {
    SimConfig c;
    c.chains[0].params = {"A", 2.0, 1.0, "sha256d"};
    c.chains[1].params = {"B", 2.0, 1.0, "sha256d"};
    c.miners.push_back({"m0", 6.0, Greedy{0.01}, 0.5});
    c.prices = PricePath::constant(2.0, 1.0);
    c.horizon_blocks = 10000;
    c.sample_interval = 10.0;
    return c;
}

namespace {

// Hour-scale price wander with a mix of greedy and loyal hash, 600 s blocks.
SimConfig long_run(ChainParams a, ChainParams b, double P_A, double P_B, std::vector<MinerConfig> miners) {
    SimConfig c;
    c.chains[0].params = std::move(a);
    c.chains[1].params = std::move(b);
    c.miners = std::move(miners);
    c.prices = PricePath::random_walk(P_A, P_B, 0.0, 0.01 / 60.0, 3600.0);
    c.horizon_blocks = 20000;
    c.sample_interval = 600.0;
    c.epoch = 1577836800;  // 2020-01-01T00:00:00Z
    return c;
}

}  // namespace

PricePath shock_path(std::uint64_t seed, double horizon, double mean_gap, double jump_sd, double start, double lo,
                     double hi) {
    if (!(mean_gap > 0.0) || !(jump_sd >= 0.0) || !(lo > 0.0) || !(hi >= lo) || !(start >= lo && start <= hi))
        throw Error("shock_path: invalid parameters");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(1.0 / mean_gap);
    std::normal_distribution<double> jump(0.0, jump_sd);
    const double log_lo = std::log(lo), log_hi = std::log(hi);
    std::vector<PriceStep> steps{{0.0, start, 1.0}};
    double t = 0.0, x = std::log(start);
    while ((t += gap(rng)) < horizon) {
        x += jump(rng);
        if (x > log_hi) x = 2.0 * log_hi - x;
        if (x < log_lo) x = 2.0 * log_lo - x;
        x = std::clamp(x, log_lo, log_hi);
        steps.push_back({t, std::exp(x), 1.0});
    }
    return PricePath::scripted(std::move(steps));
}

std::pair<AllocationSeries, AllocationSeries> trace_allocations(const SimConfig& config, const SimResult& result) {
    AllocationSeries actual, eq;
    for (const auto& row : result.trace) {
        const std::int64_t tau = config.epoch + std::llround(row.sim_time);
        if (!actual.empty() && tau <= actual.back().tau) continue;
        actual.push_back({tau, Allocation::from_share_a(row.w_actual_A)});
        eq.push_back({tau, Allocation::from_share_a(row.w_eq_A)});
    }
    return {actual, eq};
}

std::optional<SimConfig> preset(const std::string& name) {
    if (name == "motivating") return motivating_preset();
    if (name == "equal") {
        SimConfig c = motivating_preset();
        c.prices = PricePath::constant(1.0, 1.0);
        return c;
    }
    if (name == "btc-bch-like")
        return long_run({"A", 600.0, 6.25, "sha256d"}, {"B", 600.0, 6.25, "sha256d"}, 9.0, 1.0,
                        {{"g0", 0.25, Greedy{0.002}, 0.5},
                         {"g1", 0.2, Greedy{0.002}, 0.5},
                         {"g2", 0.2, Greedy{0.002}, 0.5},
                         {"la", 0.3, Loyal{0}, std::nullopt},
                         {"lb", 0.05, Loyal{1}, std::nullopt}});
    if (name == "btc-ltc-like")
        return long_run({"A", 600.0, 6.25, "sha256d"}, {"B", 150.0, 12.5, "sha256d"}, 100.0, 1.0,
                        {{"g0", 0.3, Greedy{0.002}, 0.5},
                         {"g1", 0.3, Greedy{0.002}, 0.5},
                         {"g2", 0.3, Greedy{0.002}, 0.5},
                         {"la", 0.1, Loyal{0}, std::nullopt}});
    if (name == "price-shocks") {
        SimConfig c = long_run({"A", 600.0, 6.25, "sha256d"}, {"B", 600.0, 6.25, "sha256d"}, 2.0, 1.0,
                               {{"g0", 0.3, Greedy{0.002}, 0.66},
                                {"g1", 0.3, Greedy{0.002}, 0.66},
                                {"g2", 0.3, Greedy{0.002}, 0.66},
                                {"la", 0.05, Loyal{0}, std::nullopt},
                                {"lb", 0.05, Loyal{1}, std::nullopt}});
        c.prices = shock_path(1, 200 * 86400.0, 12 * 3600.0, 0.15, 2.0, 1.0, 4.0);
        c.horizon_blocks = 40000;
        c.sample_interval = 3600.0;
        return c;
    }
    return std::nullopt;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"motivating", "equal", "btc-bch-like", "btc-ltc-like",
                                                   "price-shocks"};
    return names;
}

}  // namespace powsec::sim
