#include "powsec/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace powsec {

void ChainParams::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error("chain " + chain_id + ": block time T must be > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw Error("chain " + chain_id + ": block reward k must be > 0");
}

TimeSeries::TimeSeries(std::vector<Point> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].value)) {
            std::ostringstream os;
            os << "non-finite value at tau=" << points_[i].tau;
            throw Error(os.str());
        }
        if (i > 0 && points_[i].tau <= points_[i - 1].tau) {
            std::ostringstream os;
            os << "timestamps must be strictly increasing (tau=" << points_[i].tau << " after " << points_[i - 1].tau
               << ")";
            throw Error(os.str());
        }
    }
}

TimeSeries TimeSeries::from_columns(std::span<const std::int64_t> taus, std::span<const double> values) {
    if (taus.size() != values.size()) throw Error("column length mismatch");
    std::vector<Point> pts(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) pts[i] = {taus[i], values[i]};
    return TimeSeries(std::move(pts));
}

std::vector<std::int64_t> TimeSeries::taus() const {
    std::vector<std::int64_t> out(points_.size());
    std::transform(points_.begin(), points_.end(), out.begin(), [](const Point& p) { return p.tau; });
    return out;
}

std::vector<double> TimeSeries::values() const {
    std::vector<double> out(points_.size());
    std::transform(points_.begin(), points_.end(), out.begin(), [](const Point& p) { return p.value; });
    return out;
}

std::optional<double> TimeSeries::at(std::int64_t tau) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), tau,
                               [](const Point& p, std::int64_t t) { return p.tau < t; });
    if (it == points_.end() || it->tau != tau) return std::nullopt;
    return it->value;
}

TimeSeries TimeSeries::transformed(const std::function<double(double)>& f) const {
    std::vector<Point> pts = points_;
    for (auto& p : pts) p.value = f(p.value);
    return TimeSeries(std::move(pts));
}

Allocation::Allocation(double a, double b) : a_(a), b_(b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw Error("allocation components must be finite and >= 0");
    if (std::abs(a + b - 1.0) > kSumTolerance) throw Error("allocation components must sum to 1");
}

MarketSnapshot MarketSnapshot::make(std::int64_t tau, double k_A, double k_B, double P_A, double P_B,
                                    double sigma_A, double sigma_B) {
    if (!(P_A > 0.0) || !(P_B > 0.0) || !(sigma_A > 0.0) || !(sigma_B > 0.0))
        throw Error("market prices must be > 0");
    return MarketSnapshot{tau, P_A, P_B, sigma_A, sigma_B, k_A * P_A, k_B * P_B};
}

TimeSeries ewma(const TimeSeries& series, double half_life) {
    if (series.empty()) throw Error("empty input");
    if (!(half_life > 0.0)) throw Error("half_life must be > 0");

    std::vector<Point> out;
    out.reserve(series.size());
    // Running mean m and total weight W; each new point has weight 1 and old
    // weight decays by 2^(-dt/h). The incremental form keeps m inside the
    // range of inputs seen so far.
    double mean = series.front().value;
    double weight = 1.0;
    out.push_back(series.front());
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double dt = static_cast<double>(series[i].tau - series[i - 1].tau);
        const double decay = std::exp2(-dt / half_life);
        weight = weight * decay + 1.0;
        mean += (series[i].value - mean) / weight;
        out.push_back({series[i].tau, mean});
    }
    return TimeSeries(std::move(out));
}

Allocation allocation_from_security(double s_A, double s_B) {
    if (!(s_A >= 0.0) || !(s_B >= 0.0)) throw Error("security investment must be >= 0");
    const double total = s_A + s_B;
    if (!(total > 0.0)) throw Error("degenerate allocation");
    const double a = s_A / total;
    return Allocation(a, 1.0 - a);
}

double allocation_distance(const Allocation& w1, const Allocation& w2) {
    return std::abs(w1.a() - w2.a()) + std::abs(w1.b() - w2.b());
}

TimeSeries resample_locf(const TimeSeries& series, std::int64_t start, std::int64_t end, std::int64_t step) {
    if (step <= 0) throw Error("resample step must be > 0");
    if (series.empty()) throw Error("empty input");
    std::vector<Point> out;
    std::size_t j = 0;
    for (std::int64_t t = start; t <= end; t += step) {
        while (j + 1 < series.size() && series[j + 1].tau <= t) ++j;
        if (series[j].tau > t) continue;
        out.push_back({t, series[j].value});
    }
    return TimeSeries(std::move(out));
}

std::vector<std::int64_t> common_timestamps(std::initializer_list<const TimeSeries*> series) {
    std::vector<std::int64_t> out;
    bool first = true;
    for (const TimeSeries* s : series) {
        std::vector<std::int64_t> t = s->taus();
        if (first) {
            out = std::move(t);
            first = false;
            continue;
        }
        std::vector<std::int64_t> merged;
        std::set_intersection(out.begin(), out.end(), t.begin(), t.end(), std::back_inserter(merged));
        out = std::move(merged);
    }
    return out;
}

TimeSeries restrict_to(const TimeSeries& series, std::span<const std::int64_t> taus) {
    std::vector<Point> out;
    out.reserve(taus.size());
    for (std::int64_t t : taus) {
        auto v = series.at(t);
        if (!v) throw Error("timestamp " + std::to_string(t) + " missing from series");
        out.push_back({t, *v});
    }
    return TimeSeries(std::move(out));
}

AllocationSeries allocation_series_from_share(const TimeSeries& w_a) {
    AllocationSeries out;
    out.reserve(w_a.size());
    for (const auto& p : w_a) out.push_back({p.tau, Allocation::from_share_a(p.value)});
    return out;
}

TimeSeries share_a(const AllocationSeries& series) {
    std::vector<Point> pts;
    pts.reserve(series.size());
    for (const auto& s : series) pts.push_back({s.tau, s.w.a()});
    return TimeSeries(std::move(pts));
}

}  // namespace powsec
