#pragma once

// Relative reward, the no-arbitrage allocation, allocation inferred from
// on-chain difficulty, and fit metrics between observed and predicted series.

#include <filesystem>
#include <limits>

#include "powsec/core.hpp"

namespace powsec {

inline constexpr double kPoolDifficultyScale = 4294967296.0;  // 2^32

struct ChainObservations {
    TimeSeries difficulty;   ///< D, expected hashes per block (before scaling)
    TimeSeries block_times;  ///< t, seconds
    TimeSeries fees;         ///< coins per block
    double pool_difficulty_scale = 1.0;

    void validate() const;

    /// Reads `tau,difficulty,block_time,fees`.
    static ChainObservations from_csv(const std::filesystem::path& path, double scale = 1.0);
};

struct FitMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double me = 0.0;
    double psnr = std::numeric_limits<double>::infinity();
    std::size_t n = 0;
};

double relative_reward(double V_A, double V_B);

Allocation equilibrium_allocation(double T_A, double T_B, double R);

/// Security investment implied by difficulty: sigma * D / T (fiat/sec).
double infer_security(double sigma, double D, double T);

/// H(tau) = ewma(scale * D / T)(tau) / ewma(t)(tau) * T.
TimeSeries estimate_hash_rate(const ChainObservations& obs, const ChainParams& params, double half_life);

AllocationSeries actual_allocation_series(const ChainObservations& obs_A, const ChainObservations& obs_B,
                                          const ChainParams& params_A, const ChainParams& params_B,
                                          const TimeSeries& sigma_A, const TimeSeries& sigma_B,
                                          double half_life);

/// Per timestamp: V_X = (k_X + ewma(fees_X)) * P_X, then equilibrium_allocation.
AllocationSeries equilibrium_series(const TimeSeries& price_A, const TimeSeries& price_B,
                                    const TimeSeries& fees_A, const TimeSeries& fees_B,
                                    const ChainParams& params_A, const ChainParams& params_B, double half_life);

/// Errors are predicted - actual on the A component. Timestamps must match.
FitMetrics fit_metrics(const AllocationSeries& actual, const AllocationSeries& predicted);

/// -20 log10(rmse) with unit peak; +inf when rmse is zero.
double psnr_from_rmse(double rmse);

/// Price ratio P_B / P_A implied by the two difficulties at equilibrium.
double oracle_price_ratio(double k_A, double k_B, double D_A, double D_B, double sigma_delta);

}  // namespace powsec
