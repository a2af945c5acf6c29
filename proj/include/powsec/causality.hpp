#pragma once

// Least squares, Granger F-tests and augmented Dickey-Fuller tests for the
// question "does security follow price, or the other way round".

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powsec/core.hpp"
#include "powsec/error.hpp"

namespace powsec::causality {

class CausalityError : public Error {
  public:
    enum class Code { InsufficientData, InsufficientVariance };
    CausalityError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const noexcept { return code_; }

  private:
    Code code_;
};

/// Point i is value(i+1) - value(i), stamped at the later time.
TimeSeries first_difference(const TimeSeries& series);

struct RegressionFit {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    double rss = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
};

/// Design matrix stored column by column; include the intercept column
/// yourself.
using Columns = std::vector<std::vector<double>>;

/// Normal equations solved by Cholesky. Throws InsufficientVariance when a
/// column is (numerically) a combination of the others and InsufficientData
/// when n_obs <= n_params.
RegressionFit ols_fit(std::span<const double> y, const Columns& X);

enum class Strength { Absent, Marginal, Weak, Moderate, Strong };

const char* to_string(Strength s) noexcept;
/// Thresholds are closed on the small side: p = 0.05 is weak.
Strength classify(double p) noexcept;

struct GrangerResult {
    double F = 0.0;
    double p_value = 1.0;
    Strength strength = Strength::Absent;
    std::string direction;
    std::size_t n_obs = 0;
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
};

/// Does `cause` help predict `effect` beyond effect's own lags? Rows missing
/// in either series are dropped before lagging.
GrangerResult granger_test(const TimeSeries& cause, const TimeSeries& effect, std::size_t lag = 1,
                           std::string direction = "cause->effect");

struct Bucket {
    enum class Kind { CalendarMonth, Fixed } kind = Kind::CalendarMonth;
    std::int64_t seconds = 0;  ///< width for Fixed buckets

    static Bucket month() { return {}; }
    static Bucket fixed(std::int64_t seconds) { return {Kind::Fixed, seconds}; }
    /// "month" or a positive number of seconds.
    static Bucket parse(const std::string& text);

    /// Start of the bucket containing tau (UTC for calendar months).
    std::int64_t start_of(std::int64_t tau) const;
};

struct GridRow {
    std::int64_t bucket_start = 0;
    std::string direction;
    std::optional<GrangerResult> result;
    std::string marker;  ///< empty, "insufficient data" or "insufficient variance"
};

inline constexpr const char* kPriceToSecurity = "price->security";
inline constexpr const char* kSecurityToPrice = "security->price";

/// Per bucket, tests both directions on first-differenced w_A. Rows come out
/// sorted by bucket start, price->security first.
std::vector<GridRow> granger_grid(const AllocationSeries& w_actual, const AllocationSeries& w_eq, Bucket bucket,
                                  std::size_t lag = 1);

void write_grid_csv(const std::string& path, std::span<const GridRow> rows);

struct AdfResult {
    double statistic = 0.0;
    std::string bucket;  ///< ">0.1", "<=0.1", "<=0.05" or "<=0.01"
    std::size_t n_obs = 0;
};

/// Regression dy_t = a + gamma y_{t-1} + sum phi_i dy_{t-i}; statistic is the
/// t-ratio of gamma against asymptotic constant-only critical values.
AdfResult adf_test(const TimeSeries& series, std::size_t lags = 1);
AdfResult adf_test(std::span<const double> values, std::size_t lags = 1);

}  // namespace powsec::causality
