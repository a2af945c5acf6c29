#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <fstream>
#include <random>

#include "powsec/causality.hpp"
#include "powsec/fdist.hpp"
#include "support.hpp"

using namespace powsec;
using namespace powsec::causality;

namespace {

TimeSeries hourly(const std::vector<double>& v, std::int64_t start = 0) {
    std::vector<Point> p;
    for (std::size_t i = 0; i < v.size(); ++i) p.push_back({start + static_cast<std::int64_t>(i) * 3600, v[i]});
    return TimeSeries(std::move(p));
}

// x is white noise; y follows x with one step of delay plus its own noise.
std::pair<TimeSeries, TimeSeries> lagged_pair(std::mt19937_64& rng, std::size_t n, double coupling) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(n), y(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = z(rng);
        y[t] = (t > 0 ? 0.3 * y[t - 1] + coupling * x[t - 1] : 0.0) + z(rng);
    }
    return {hourly(x), hourly(y)};
}

std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) x = s += z(rng);
    return v;
}

AllocationSeries shares(const TimeSeries& s) {
    AllocationSeries out;
    for (const auto& p : s) out.push_back({p.tau, Allocation::from_share_a(p.value)});
    return out;
}

}  // namespace

TEST_CASE("first difference") {
    const auto d = first_difference(hourly({1, 4, 2}));
    REQUIRE(d.size() == 2);
    CHECK(d[0] == Point{3600, 3.0});
    CHECK(d[1] == Point{7200, -2.0});
    CHECK_THROWS_AS(first_difference(hourly({1})), CausalityError);
}

TEST_CASE("ols agrees with a QR solve") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 30 + trial * 7, k = 1 + trial % 5;
        Columns X(k, std::vector<double>(n));
        Eigen::MatrixXd M(n, k);
        Eigen::VectorXd Y(n);
        std::vector<double> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < k; ++c) M(r, c) = X[c][r] = c == 0 ? 1.0 : z(rng);
            Y(r) = y[r] = z(rng) + 0.5 * M(r, k - 1);
        }
        const auto fit = ols_fit(y, X);
        const Eigen::VectorXd beta = M.colPivHouseholderQr().solve(Y);
        const double rss = (Y - M * beta).squaredNorm();
        const Eigen::MatrixXd cov = (M.transpose() * M).inverse() * (rss / static_cast<double>(n - k));
        for (std::size_t c = 0; c < k; ++c) {
            CHECK(fit.coefficients[c] == doctest::Approx(beta(c)).epsilon(1e-9));
            CHECK(fit.std_errors[c] == doctest::Approx(std::sqrt(cov(c, c))).epsilon(1e-9));
        }
        CHECK(fit.rss == doctest::Approx(rss).epsilon(1e-9));
    }
}

TEST_CASE("ols rejects degenerate designs") {
    const std::vector<double> y{1, 2, 3, 4};
    CHECK_THROWS_AS(ols_fit(y, {{1, 1, 1, 1}, {2, 2, 2, 2}}), CausalityError);
    CHECK_THROWS_AS(ols_fit(std::vector<double>{1, 2}, {{1, 1}, {1, 2}}), CausalityError);
}

TEST_CASE("F distribution tails agree with boost") {
    for (auto [d1, d2] : {std::pair{1.0, 10.0}, {2.0, 50.0}, {3.0, 7.0}, {1.0, 500.0}, {5.0, 5.0}}) {
        const boost::math::fisher_f_distribution<double> dist(d1, d2);
        for (double p : {0.5, 0.95}) {
            const double f = boost::math::quantile(dist, p);
            CHECK(stats::f_cdf(f, d1, d2) == doctest::Approx(p).epsilon(1e-6));
            CHECK(stats::f_sf(f, d1, d2) == doctest::Approx(1.0 - p).epsilon(1e-6));
        }
    }
    CHECK(stats::f_sf(0.0, 2, 10) == 1.0);
    CHECK(stats::incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(stats::incomplete_beta(2, 3, 1.0) == 1.0);
    CHECK(stats::incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("classification thresholds are closed on the small side") {
    CHECK(classify(0.0005) == Strength::Strong);
    CHECK(classify(0.001) == Strength::Strong);
    CHECK(classify(0.005) == Strength::Moderate);
    CHECK(classify(0.01) == Strength::Moderate);
    CHECK(classify(0.05) == Strength::Weak);
    CHECK(classify(0.07) == Strength::Marginal);
    CHECK(classify(0.1) == Strength::Marginal);
    CHECK(classify(0.2) == Strength::Absent);
    CHECK(std::string(to_string(Strength::Moderate)) == "moderate");
}

TEST_CASE("granger detects a lagged driver") {
    std::mt19937_64 rng(5);
    int strong = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const auto [x, y] = lagged_pair(rng, 300, 0.5);
        if (granger_test(x, y).strength == Strength::Strong) ++strong;
    }
    CHECK(strong >= 95);
}

TEST_CASE("granger rejects at the nominal rate under the null") {
    std::mt19937_64 rng(6);
    int rejected = 0;
    const int trials = 400;
    for (int i = 0; i < trials; ++i) {
        const auto [x, y] = lagged_pair(rng, 200, 0.0);
        if (granger_test(x, y).p_value <= 0.05) ++rejected;
    }
    const double rate = static_cast<double>(rejected) / trials;
    MESSAGE("null rejection rate " << rate);
    CHECK(std::abs(rate - 0.05) <= 0.03);
}

TEST_CASE("granger properties") {
    std::mt19937_64 rng(7);
    const auto [x, y] = lagged_pair(rng, 200, 0.3);
    const auto base = granger_test(x, y, 2);
    CHECK(base.rss_unrestricted <= base.rss_restricted);
    CHECK(base.n_obs == 198);

    // Affine maps of either series leave F unchanged.
    const auto x2 = x.transformed([](double v) { return 3.0 * v - 7.0; });
    const auto y2 = y.transformed([](double v) { return -0.5 * v + 2.0; });
    CHECK(granger_test(x2, y2, 2).F == doctest::Approx(base.F).epsilon(1e-8));

    std::vector<double> xs(50), ys(50);
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t t = 0; t < 50; ++t) {
        xs[t] = z(rng);
        ys[t] = t ? xs[t - 1] : 0.0;
    }
    const auto exact = granger_test(hourly(xs), hourly(ys));
    CHECK(std::isinf(exact.F));
    CHECK(exact.strength == Strength::Strong);

    CHECK_THROWS_AS(granger_test(hourly({1, 2, 3, 4}), hourly({1, 3, 2, 4})), CausalityError);
    CHECK_THROWS_AS(granger_test(hourly(std::vector<double>(40, 1.0)), hourly(ys)), CausalityError);
}

TEST_CASE("calendar month buckets") {
    const Bucket m = Bucket::month();
    CHECK(m.start_of(1700000000) == 1698796800);  // 2023-11-14 falls in November 2023
    CHECK(m.start_of(1698796800) == 1698796800);
    CHECK(m.start_of(1698796799) == 1696118400);
    CHECK(Bucket::fixed(100).start_of(250) == 200);
    CHECK(Bucket::fixed(100).start_of(-1) == -100);
    CHECK(Bucket::parse("3600").seconds == 3600);
    CHECK(Bucket::parse("month").kind == Bucket::Kind::CalendarMonth);
    CHECK_THROWS_AS(Bucket::parse("weekly"), Error);
    CHECK_THROWS_AS(Bucket::parse("0"), Error);
}

TEST_CASE("granger grid") {
    std::mt19937_64 rng(9);
    const auto [x, y] = lagged_pair(rng, 2000, 0.5);
    const auto squash = [](double v) { return 0.5 + 0.001 * v; };
    // Integrate so the grid's first differences recover the pair.
    std::vector<double> ia, ie;
    double sa = 0.0, se = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ie.push_back(squash(se += x[i].value));
        ia.push_back(squash(sa += y[i].value));
    }
    const auto actual = shares(hourly(ia, 1'700'000'000));
    const auto eq = shares(hourly(ie, 1'700'000'000));
    const auto rows = granger_grid(actual, eq, Bucket::fixed(86400 * 30));
    REQUIRE(rows.size() >= 4);
    CHECK(rows[0].direction == kPriceToSecurity);
    CHECK(rows[1].direction == kSecurityToPrice);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].bucket_start >= rows[i - 1].bucket_start);
    int forward = 0, backward = 0;
    for (const auto& r : rows)
        if (r.result && r.result->strength == Strength::Strong) (r.direction == kPriceToSecurity ? forward : backward)++;
    CHECK(forward >= 2);
    CHECK(backward == 0);

    // Swapping the inputs swaps the directions.
    const auto swapped = granger_grid(eq, actual, Bucket::fixed(86400 * 30));
    REQUIRE(swapped.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        REQUIRE(rows[i].result);
        CHECK(swapped[i + 1].result->F == doctest::Approx(rows[i].result->F));
    }

    const auto flat = shares(hourly(std::vector<double>(100, 0.4), 1'700'000'000));
    const auto flat_rows = granger_grid(flat, flat, Bucket::month());
    REQUIRE_FALSE(flat_rows.empty());
    CHECK(flat_rows[0].marker == "insufficient variance");

    const auto dir = testing::scratch("grid");
    write_grid_csv((dir / "g.csv").string(), flat_rows);
    std::ifstream in(dir / "g.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "bucket_start,direction,F,p,classification");
    CHECK(first.ends_with(",,insufficient variance"));
}

TEST_CASE("adf separates unit roots from stationary series") {
    std::mt19937_64 rng(10);
    int walk_high = 0, diff_low = 0;
    for (int i = 0; i < 100; ++i) {
        const auto w = random_walk(rng, 2000);
        if (adf_test(w).bucket == ">0.1") ++walk_high;
        std::vector<double> d(w.size() - 1);
        for (std::size_t t = 1; t < w.size(); ++t) d[t - 1] = w[t] - w[t - 1];
        if (adf_test(d).bucket == "<=0.01") ++diff_low;
    }
    CHECK(walk_high >= 85);
    CHECK(diff_low >= 95);

    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> ar(500);
    for (std::size_t t = 1; t < ar.size(); ++t) ar[t] = 0.2 * ar[t - 1] + z(rng);
    const auto r = adf_test(hourly(ar));
    CHECK(r.bucket == "<=0.01");
    CHECK(r.statistic < -3.43);
    CHECK(r.n_obs == 498);
    CHECK_THROWS_AS(adf_test(std::vector<double>(5, 1.0)), CausalityError);
}
