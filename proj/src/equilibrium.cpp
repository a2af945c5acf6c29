#include "powsec/equilibrium.hpp"

#include <cmath>

#include "powsec/csv.hpp"

namespace powsec {
namespace {

void require_positive(const TimeSeries& s, const char* what) {
    for (const auto& p : s)
        if (!(p.value > 0.0)) throw Error(std::string(what) + " must be > 0 (tau=" + std::to_string(p.tau) + ")");
}

// Throws naming the first timestamp present in one series but not the other.
void require_aligned(const TimeSeries& a, const TimeSeries& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i].tau != b[i].tau)
            throw Error("misaligned series at tau=" + std::to_string(std::min(a[i].tau, b[i].tau)));
    if (a.size() != b.size()) {
        const auto& longer = a.size() > b.size() ? a : b;
        throw Error("misaligned series at tau=" + std::to_string(longer[n].tau));
    }
}

}  // namespace

void ChainObservations::validate() const {
    if (difficulty.empty() || block_times.empty()) throw Error("empty input");
    require_positive(difficulty, "difficulty");
    require_positive(block_times, "block time");
    if (pool_difficulty_scale != 1.0 && pool_difficulty_scale != kPoolDifficultyScale)
        throw Error("pool difficulty scale must be 1 or 2^32");
}

ChainObservations ChainObservations::from_csv(const std::filesystem::path& path, double scale) {
    csv::Table t = csv::read(path);
    const auto taus = t.integers("tau");
    const auto d = t.reals("difficulty");
    const auto bt = t.reals("block_time");
    const auto fees = t.reals("fees");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) throw InputError(path.string(), i + 2, "difficulty", "must be > 0");
        if (!(bt[i] > 0.0)) throw InputError(path.string(), i + 2, "block_time", "must be > 0");
    }
    try {
        ChainObservations obs{TimeSeries::from_columns(taus, d), TimeSeries::from_columns(taus, bt),
                              TimeSeries::from_columns(taus, fees), scale};
        obs.validate();
        return obs;
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(path.string(), 0, "tau", e.what());
    }
}

double relative_reward(double V_A, double V_B) {
    if (!(V_A >= 0.0) || !(V_B >= 0.0)) throw Error("block rewards must be >= 0");
    if (!(V_A + V_B > 0.0)) throw Error("both block rewards are zero");
    return V_A / (V_A + V_B);
}

Allocation equilibrium_allocation(double T_A, double T_B, double R) {
    if (!(T_A > 0.0) || !(T_B > 0.0)) throw Error("block times must be > 0");
    if (!(R >= 0.0 && R <= 1.0)) throw Error("relative reward must lie in [0,1]");
    if (T_A == T_B) return Allocation(R, 1.0 - R);
    // T_B R + T_A (1 - R) is a convex combination of positive numbers.
    const double a = T_B * R / (T_B * R - T_A * R + T_A);
    return Allocation::from_share_a(a);
}

double infer_security(double sigma, double D, double T) {
    if (!(sigma > 0.0) || !(D > 0.0) || !(T > 0.0)) throw Error("infer_security: inputs must be > 0");
    return sigma * D / T;
}

TimeSeries estimate_hash_rate(const ChainObservations& obs, const ChainParams& params, double half_life) {
    obs.validate();
    params.validate();
    require_aligned(obs.difficulty, obs.block_times);
    const double scale = obs.pool_difficulty_scale;
    const double T = params.T;
    const TimeSeries nominal = obs.difficulty.transformed([&](double d) { return scale * d / T; });
    const TimeSeries h = ewma(nominal, half_life);
    const TimeSeries t = ewma(obs.block_times, half_life);
    std::vector<Point> out;
    out.reserve(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out.push_back({h[i].tau, h[i].value / t[i].value * T});
    return TimeSeries(std::move(out));
}

AllocationSeries actual_allocation_series(const ChainObservations& obs_A, const ChainObservations& obs_B,
                                          const ChainParams& params_A, const ChainParams& params_B,
                                          const TimeSeries& sigma_A, const TimeSeries& sigma_B,
                                          double half_life) {
    const TimeSeries h_A = estimate_hash_rate(obs_A, params_A, half_life);
    const TimeSeries h_B = estimate_hash_rate(obs_B, params_B, half_life);
    require_positive(sigma_A, "hash price");
    require_positive(sigma_B, "hash price");
    const TimeSeries s_A = ewma(sigma_A, half_life);
    const TimeSeries s_B = ewma(sigma_B, half_life);

    const auto taus = common_timestamps({&h_A, &h_B, &s_A, &s_B});
    if (taus.empty()) throw Error("no overlapping timestamps");
    AllocationSeries out;
    out.reserve(taus.size());
    for (std::int64_t tau : taus) {
        const double sec_A = *s_A.at(tau) * *h_A.at(tau);
        const double sec_B = *s_B.at(tau) * *h_B.at(tau);
        out.push_back({tau, allocation_from_security(sec_A, sec_B)});
    }
    return out;
}

AllocationSeries equilibrium_series(const TimeSeries& price_A, const TimeSeries& price_B,
                                    const TimeSeries& fees_A, const TimeSeries& fees_B,
                                    const ChainParams& params_A, const ChainParams& params_B, double half_life) {
    params_A.validate();
    params_B.validate();
    require_positive(price_A, "price");
    require_positive(price_B, "price");
    const TimeSeries f_A = ewma(fees_A, half_life);
    const TimeSeries f_B = ewma(fees_B, half_life);

    const auto taus = common_timestamps({&price_A, &price_B, &f_A, &f_B});
    if (taus.empty()) throw Error("no overlapping timestamps");
    AllocationSeries out;
    out.reserve(taus.size());
    for (std::int64_t tau : taus) {
        const double V_A = (params_A.k + *f_A.at(tau)) * *price_A.at(tau);
        const double V_B = (params_B.k + *f_B.at(tau)) * *price_B.at(tau);
        out.push_back({tau, equilibrium_allocation(params_A.T, params_B.T, relative_reward(V_A, V_B))});
    }
    return out;
}

FitMetrics fit_metrics(const AllocationSeries& actual, const AllocationSeries& predicted) {
    if (actual.empty() || predicted.empty()) throw Error("empty input");
    if (actual.size() != predicted.size()) throw Error("series lengths differ");
    double sq = 0.0, ab = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i].tau != predicted[i].tau)
            throw Error("timestamps differ at index " + std::to_string(i) + " (tau=" + std::to_string(actual[i].tau) +
                        ")");
        const double e = predicted[i].w.a() - actual[i].w.a();
        sq += e * e;
        ab += std::abs(e);
        sum += e;
    }
    const double n = static_cast<double>(actual.size());
    FitMetrics m;
    m.n = actual.size();
    m.rmse = std::sqrt(sq / n);
    m.mae = ab / n;
    m.me = sum / n;
    m.psnr = psnr_from_rmse(m.rmse);
    return m;
}

double psnr_from_rmse(double rmse) {
    if (!(rmse >= 0.0)) throw Error("rmse must be >= 0");
    if (rmse == 0.0) return std::numeric_limits<double>::infinity();
    return -20.0 * std::log10(rmse);
}

double oracle_price_ratio(double k_A, double k_B, double D_A, double D_B, double sigma_delta) {
    if (!(k_A > 0.0) || !(k_B > 0.0) || !(D_A > 0.0) || !(D_B > 0.0) || !(sigma_delta > 0.0))
        throw Error("oracle_price_ratio: inputs must be > 0");
    return sigma_delta * (k_A / k_B) * (D_B / D_A);
}

}  // namespace powsec
