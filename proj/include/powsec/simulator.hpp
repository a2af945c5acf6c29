#pragma once

// Event-driven two-chain mining simulator. Chains share one PoW (hash price
// 1 on both), so security shares equal hash shares.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "powsec/core.hpp"

namespace powsec::sim {

struct DaaKind {
    enum class Type { PerBlock, Window } type = Type::PerBlock;
    int n_blocks = 1;

    static DaaKind per_block() { return {Type::PerBlock, 1}; }
    static DaaKind window(int n) { return {Type::Window, n}; }
};

/// S' = S * T / mean_block_time, clamped to [S / clamp, S * clamp] when
/// clamp > 0. The kind only decides when the simulator calls this.
double daa_adjust(double S, double mean_block_time, double T, DaaKind kind, double clamp = 4.0);

struct Greedy {
    double step_cap = 0.002;
};
struct Loyal {
    int chain = 0;  ///< 0 = A, 1 = B
};
struct Fixed {
    double w_A = 0.5;
};
using Strategy = std::variant<Greedy, Loyal, Fixed>;

struct MinerConfig {
    std::string id;
    double hash_rate = 1.0;
    Strategy strategy = Greedy{};
    std::optional<double> initial_w_A;  ///< defaults to the strategy's natural start (0.5 for greedy)
};

struct ChainConfig {
    ChainParams params;
    double initial_S = 0.0;  ///< 0 means "at rest for the initial allocation"
    DaaKind daa = DaaKind::per_block();
    double clamp = 4.0;  ///< 0 disables
};

struct PriceStep {
    double time = 0.0;
    double P_A = 1.0;
    double P_B = 1.0;
};

struct PricePath {
    enum class Kind { Constant, Scripted, RandomWalk } kind = Kind::Constant;
    double P_A = 1.0, P_B = 1.0;  ///< constant value or random-walk start
    std::vector<PriceStep> steps;  ///< scripted, sorted by time
    double drift = 0.0;            ///< per second, log scale
    double volatility = 0.0;       ///< per sqrt(second), log scale
    double step_seconds = 3600.0;  ///< random-walk update cadence

    static PricePath constant(double P_A, double P_B);
    static PricePath scripted(std::vector<PriceStep> steps);
    static PricePath random_walk(double P_A, double P_B, double drift, double volatility, double step_seconds);
    static PricePath from_csv(const std::filesystem::path& path);  ///< `tau,P_A,P_B`
};

struct SimConfig {
    std::array<ChainConfig, 2> chains;
    std::vector<MinerConfig> miners;
    PricePath prices;
    std::int64_t horizon_blocks = 10000;  ///< total across both chains
    double sample_interval = 600.0;       ///< trace cadence, seconds
    std::uint64_t seed = 1;
    std::int64_t epoch = 0;  ///< tau of sim_time 0 for emitted observations
    bool record_blocks = true;

    void validate() const;
};

struct BlockEvent {
    double time = 0.0;
    double interarrival = 0.0;
    std::size_t miner = 0;
    double difficulty = 0.0;       ///< difficulty the block was mined at
    double next_difficulty = 0.0;  ///< after the DAA ran
};

struct TraceRow {
    double sim_time = 0.0;
    double D_A = 0.0, D_B = 0.0;
    double w_actual_A = 0.0;
    double w_eq_A = 0.0;
    double P_A = 0.0, P_B = 0.0;
};

/// Time integrals over the second half of the run (by block count).
struct SteadyStats {
    double start_time = 0.0;
    double duration = 0.0;
    double mean_distance = 0.0;  ///< time-average L1 distance |w - w_eq|
    double mean_w_A = 0.0;
    double mean_w_eq_A = 0.0;
    double mean_D_ratio = 0.0;   ///< D_A / D_B
};

struct SimResult {
    std::vector<TraceRow> trace;
    std::array<std::vector<BlockEvent>, 2> blocks;
    SteadyStats steady;
    double end_time = 0.0;
    std::array<double, 2> final_S{};
    std::vector<double> final_w;  ///< per miner
    std::vector<std::string> warnings;
    /// Largest deviation between the aggregate allocation and the hash-weighted
    /// sum of per-miner allocations seen at any event.
    double max_conservation_error = 0.0;
};

SimResult run_simulation(const SimConfig& config, std::uint64_t seed);
inline SimResult run_simulation(const SimConfig& config) { return run_simulation(config, config.seed); }

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

struct LoyalOffsetReport {
    double w_A_with_loyal = 0.0;
    double w_A_baseline = 0.0;
    double delta = 0.0;          ///< with - baseline
    double bias = 0.0;           ///< shift loyal miners would cause with nobody offsetting
    double greedy_share = 0.0;
    double required_greedy_w_A = 0.0;  ///< greedy allocation needed to restore w_eq
    bool absorbable = true;
    double unabsorbed = 0.0;     ///< bias the greedy miners cannot offset
};

/// Paired runs with the same seed: as configured, and with every loyal
/// miner replaced by a fixed miner at the initial equilibrium allocation.
LoyalOffsetReport loyal_offset_experiment(const SimConfig& config);

/// Hourly chain observations (`tau,difficulty,block_time,fees`) and prices
/// (`tau,price`) derived from a finished run, for the estimator pipeline.
struct ObservationSet {
    std::array<TimeSeries, 2> difficulty;
    std::array<TimeSeries, 2> block_time;
    std::array<TimeSeries, 2> price;
};
ObservationSet hourly_observations(const SimConfig& config, const SimResult& result, double bucket = 3600.0);

/// Two equal-period chains (T = 2) with coins worth 2:1 and one greedy miner
/// holding H = 6.
SimConfig motivating_preset();

/// P_A jumps at Poisson times (mean gap `mean_gap` seconds) by lognormal
/// factors with log-sd `jump_sd`, reflected into [lo, hi]; P_B stays 1.
PricePath shock_path(std::uint64_t seed, double horizon, double mean_gap, double jump_sd, double start, double lo,
                     double hi);

/// Sampled actual and equilibrium allocations from the trace, stamped with
/// config.epoch + rounded sim time.
std::pair<AllocationSeries, AllocationSeries> trace_allocations(const SimConfig& config, const SimResult& result);

/// Named presets: motivating, equal, btc-bch-like, btc-ltc-like, price-shocks.
std::optional<SimConfig> preset(const std::string& name);
const std::vector<std::string>& preset_names();

}  // namespace powsec::sim
