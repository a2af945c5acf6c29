#include "powsec/causality.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "powsec/csv.hpp"
#include "powsec/fdist.hpp"
#include "powsec/kernels.hpp"

namespace powsec::causality {
namespace {

using Code = CausalityError::Code;

// In-place lower Cholesky factor of a symmetric positive definite matrix
// stored row-major. Pivots that lose all but a 1e-12 fraction of their
// diagonal mean the columns are dependent.
void cholesky(std::vector<double>& g, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
        const double diag = g[j * k + j];
        double d = diag;
        for (std::size_t p = 0; p < j; ++p) d -= g[j * k + p] * g[j * k + p];
        if (!(diag > 0.0) || !(d > 1e-12 * diag))
            throw CausalityError(Code::InsufficientVariance, "design matrix is rank deficient (column " + std::to_string(j) + ")");
        const double l = std::sqrt(d);
        g[j * k + j] = l;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = g[i * k + j];
            for (std::size_t p = 0; p < j; ++p) s -= g[i * k + p] * g[j * k + p];
            g[i * k + j] = s / l;
        }
    }
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t k, std::vector<double> b) {
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t p = 0; p < i; ++p) b[i] -= l[i * k + p] * b[p];
        b[i] /= l[i * k + i];
    }
    for (std::size_t i = k; i-- > 0;) {
        for (std::size_t p = i + 1; p < k; ++p) b[i] -= l[p * k + i] * b[p];
        b[i] /= l[i * k + i];
    }
    return b;
}

std::vector<double> slice(const std::vector<double>& v, std::size_t from, std::size_t count) {
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(from + count)};
}

}  // namespace

TimeSeries first_difference(const TimeSeries& series) {
    if (series.size() < 2) throw CausalityError(Code::InsufficientData, "first difference needs at least 2 points");
    std::vector<Point> out;
    out.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) out.push_back({series[i].tau, series[i].value - series[i - 1].value});
    return TimeSeries(std::move(out));
}

RegressionFit ols_fit(std::span<const double> y, const Columns& X) {
    const std::size_t n = y.size(), k = X.size();
    if (k == 0) throw Error("ols: design matrix has no columns");
    for (const auto& c : X)
        if (c.size() != n) throw Error("ols: column length differs from response length");
    if (n <= k) throw CausalityError(Code::InsufficientData, "ols: need more observations than parameters");

    std::vector<double> g(k * k), xty(k);
    for (std::size_t i = 0; i < k; ++i) {
        xty[i] = kernels::dot(X[i], y);
        for (std::size_t j = 0; j <= i; ++j) g[i * k + j] = g[j * k + i] = kernels::dot(X[i], X[j]);
    }
    std::vector<double> l = g;
    cholesky(l, k);

    RegressionFit fit;
    fit.coefficients = cholesky_solve(l, k, xty);
    fit.n_obs = n;
    fit.n_params = k;
    for (std::size_t r = 0; r < n; ++r) {
        double pred = 0.0;
        for (std::size_t j = 0; j < k; ++j) pred += X[j][r] * fit.coefficients[j];
        const double e = y[r] - pred;
        fit.rss += e * e;
    }
    const double sigma2 = fit.rss / static_cast<double>(n - k);
    fit.std_errors.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> e(k, 0.0);
        e[j] = 1.0;
        fit.std_errors[j] = std::sqrt(sigma2 * cholesky_solve(l, k, std::move(e))[j]);
    }
    return fit;
}

const char* to_string(Strength s) noexcept {
    switch (s) {
        case Strength::Absent: return "absent";
        case Strength::Marginal: return "marginal";
        case Strength::Weak: return "weak";
        case Strength::Moderate: return "moderate";
        case Strength::Strong: return "strong";
    }
    return "unknown";
}

Strength classify(double p) noexcept {
    if (p <= 0.001) return Strength::Strong;
    if (p <= 0.01) return Strength::Moderate;
    if (p <= 0.05) return Strength::Weak;
    if (p <= 0.1) return Strength::Marginal;
    return Strength::Absent;
}

GrangerResult granger_test(const TimeSeries& cause, const TimeSeries& effect, std::size_t lag, std::string direction) {
    if (lag < 1) throw Error("granger: lag must be >= 1");
    const auto taus = common_timestamps({&cause, &effect});
    const auto x = restrict_to(cause, taus).values();
    const auto y = restrict_to(effect, taus).values();
    const std::size_t n = y.size();
    if (n <= 3 + lag)
        throw CausalityError(Code::InsufficientData, "granger: need more than " + std::to_string(3 + lag) + " aligned points, got " + std::to_string(n));

    const std::size_t m = n - lag;
    const std::vector<double> response = slice(y, lag, m);
    Columns restricted{std::vector<double>(m, 1.0)};
    for (std::size_t i = 1; i <= lag; ++i) restricted.push_back(slice(y, lag - i, m));
    Columns unrestricted = restricted;
    for (std::size_t i = 1; i <= lag; ++i) unrestricted.push_back(slice(x, lag - i, m));
    if (m <= unrestricted.size())
        throw CausalityError(Code::InsufficientData, "granger: too few observations for the unrestricted model");

    const RegressionFit r = ols_fit(response, restricted);
    const RegressionFit u = ols_fit(response, unrestricted);

    GrangerResult out;
    out.direction = std::move(direction);
    out.n_obs = m;
    out.rss_restricted = r.rss;
    out.rss_unrestricted = std::min(u.rss, r.rss);
    const double q = static_cast<double>(lag);
    const double dof = static_cast<double>(m - unrestricted.size());
    const double gain = std::max(0.0, r.rss - u.rss);
    if (u.rss > 0.0) {
        out.F = (gain / q) / (u.rss / dof);
    } else {
        out.F = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    out.p_value = stats::f_sf(out.F, q, dof);
    out.strength = classify(out.p_value);
    return out;
}

Bucket Bucket::parse(const std::string& text) {
    if (text == "month") return month();
    std::int64_t s = 0;
    try {
        std::size_t used = 0;
        s = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw Error("bucket must be 'month' or a number of seconds, got '" + text + "'");
    }
    if (s <= 0) throw Error("bucket width must be positive");
    return fixed(s);
}

std::int64_t Bucket::start_of(std::int64_t tau) const {
    using namespace std::chrono;
    if (kind == Kind::Fixed) {
        const std::int64_t q = tau / seconds - (tau % seconds < 0 ? 1 : 0);
        return q * seconds;
    }
    const sys_seconds t{std::chrono::seconds(tau)};
    const year_month_day ymd{floor<days>(t)};
    const sys_days first{ymd.year() / ymd.month() / 1};
    return duration_cast<std::chrono::seconds>(first.time_since_epoch()).count();
}

std::vector<GridRow> granger_grid(const AllocationSeries& w_actual, const AllocationSeries& w_eq, Bucket bucket,
                                  std::size_t lag) {
    const TimeSeries actual = share_a(w_actual);
    const TimeSeries eq = share_a(w_eq);
    const auto taus = common_timestamps({&actual, &eq});

    std::map<std::int64_t, std::vector<std::int64_t>> groups;
    for (std::int64_t t : taus) groups[bucket.start_of(t)].push_back(t);

    std::vector<GridRow> rows;
    for (const auto& [start, members] : groups) {
        const auto run = [&](const char* direction, bool price_causes) {
            GridRow row{start, direction, std::nullopt, ""};
            try {
                const TimeSeries da = first_difference(restrict_to(actual, members));
                const TimeSeries de = first_difference(restrict_to(eq, members));
                row.result = price_causes ? granger_test(de, da, lag, direction) : granger_test(da, de, lag, direction);
            } catch (const CausalityError& e) {
                row.marker = e.code() == Code::InsufficientData ? "insufficient data" : "insufficient variance";
            }
            rows.push_back(std::move(row));
        };
        run(kPriceToSecurity, true);
        run(kSecurityToPrice, false);
    }
    return rows;
}

void write_grid_csv(const std::string& path, std::span<const GridRow> rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "bucket_start,direction,F,p,classification\n";
    for (const auto& r : rows) {
        out << r.bucket_start << ',' << r.direction << ',';
        if (r.result)
            out << csv::format_real(r.result->F) << ',' << csv::format_real(r.result->p_value) << ',' << to_string(r.result->strength);
        else
            out << ",," << r.marker;
        out << '\n';
    }
}

AdfResult adf_test(std::span<const double> y, std::size_t lags) {
    const std::size_t n = y.size();
    if (n <= 10 + lags)
        throw CausalityError(Code::InsufficientData, "adf: need more than " + std::to_string(10 + lags) + " points");
    std::vector<double> dy(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) dy[t] = y[t] - y[t - 1];

    const std::size_t first = lags + 1;
    const std::size_t m = n - first;
    const std::vector<double> response(dy.begin() + static_cast<std::ptrdiff_t>(first), dy.end());
    Columns X{std::vector<double>(m, 1.0), std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(first - 1), y.end() - 1)};
    for (std::size_t i = 1; i <= lags; ++i) X.push_back(slice(dy, first - i, m));

    const RegressionFit fit = ols_fit(response, X);
    AdfResult out;
    out.n_obs = m;
    out.statistic = fit.coefficients[1] / fit.std_errors[1];
    if (out.statistic <= -3.43) out.bucket = "<=0.01";
    else if (out.statistic <= -2.86) out.bucket = "<=0.05";
    else if (out.statistic <= -2.57) out.bucket = "<=0.1";
    else out.bucket = ">0.1";
    return out;
}

AdfResult adf_test(const TimeSeries& series, std::size_t lags) { return adf_test(series.values(), lags); }

}  // namespace powsec::causality
