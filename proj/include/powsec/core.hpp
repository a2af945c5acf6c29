#pragma once

// Shared domain types: chain constants, timestamped series, security
// allocations, and the EWMA smoother used throughout the estimators.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powsec/error.hpp"

namespace powsec {

/// Static protocol constants of one chain.
struct ChainParams {
    std::string chain_id;
    double T = 0.0;  ///< target block inter-arrival time, seconds
    double k = 0.0;  ///< coins paid per block (base reward + average fees)
    std::string pow_alg;

    void validate() const;
};

struct Point {
    std::int64_t tau = 0;  ///< seconds since epoch
    double value = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered samples with strictly increasing timestamps and finite values.
class TimeSeries {
  public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<Point> points);

    static TimeSeries from_columns(std::span<const std::int64_t> taus, std::span<const double> values);

    std::span<const Point> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    const Point& front() const { return points_.front(); }
    const Point& back() const { return points_.back(); }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    std::vector<std::int64_t> taus() const;
    std::vector<double> values() const;

    /// Exact-timestamp lookup.
    std::optional<double> at(std::int64_t tau) const;

    TimeSeries transformed(const std::function<double(double)>& f) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

  private:
    std::vector<Point> points_;
};

/// Two-component security allocation (w_A, w_B) summing to one.
class Allocation {
  public:
    static constexpr double kSumTolerance = 1e-12;

    Allocation() = default;
    Allocation(double a, double b);

    static Allocation from_share_a(double a) { return Allocation(a, 1.0 - a); }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    friend bool operator==(const Allocation&, const Allocation&) = default;

  private:
    double a_ = 0.5;
    double b_ = 0.5;
};

struct TimedAllocation {
    std::int64_t tau = 0;
    Allocation w;
};

using AllocationSeries = std::vector<TimedAllocation>;

/// Prices observed at one instant. V_X = k_X * P_X.
struct MarketSnapshot {
    std::int64_t tau = 0;
    double P_A = 0.0, P_B = 0.0;          ///< fiat per coin
    double sigma_A = 1.0, sigma_B = 1.0;  ///< fiat per hash
    double V_A = 0.0, V_B = 0.0;          ///< fiat per block

    static MarketSnapshot make(std::int64_t tau, double k_A, double k_B, double P_A, double P_B,
                               double sigma_A = 1.0, double sigma_B = 1.0);
};

/// Exponentially weighted mean with continuous-time decay 2^(-dt/half_life),
/// seeded with the first observation.
TimeSeries ewma(const TimeSeries& series, double half_life);

Allocation allocation_from_security(double s_A, double s_B);

/// L1 distance between two allocations.
double allocation_distance(const Allocation& w1, const Allocation& w2);

/// Resample onto a regular grid [start, end] with spacing `step` using the
/// last observation at or before each grid point. Grid points before the
/// first observation are skipped.
TimeSeries resample_locf(const TimeSeries& series, std::int64_t start, std::int64_t end, std::int64_t step);

/// Timestamps present in every series, ascending.
std::vector<std::int64_t> common_timestamps(std::initializer_list<const TimeSeries*> series);

/// Restrict a series to the given (sorted) timestamps, all of which must exist.
TimeSeries restrict_to(const TimeSeries& series, std::span<const std::int64_t> taus);

AllocationSeries allocation_series_from_share(const TimeSeries& w_a);
TimeSeries share_a(const AllocationSeries& series);

}  // namespace powsec
