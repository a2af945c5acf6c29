#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "powsec/csv.hpp"
#include "powsec/header_chain.hpp"
#include "support.hpp"

using testing::run_cli;
using testing::scratch;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// RMSE column of the "all" row of metrics.txt.
double overall_rmse(const std::filesystem::path& metrics) {
    std::ifstream in(metrics);
    std::string line;
    while (std::getline(in, line))
        if (line.starts_with("all,")) return std::stod(line.substr(4, line.find(',', 4) - 4));
    FAIL("no 'all' row in " << metrics);
    return -1.0;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    const auto dir = scratch("cli-usage");
    CHECK(run_cli("", dir / "log") == 2);
    CHECK(run_cli("simulate --preset nonesuch --out " + (dir / "o").string(), dir / "log") == 2);
    CHECK(slurp(dir / "log").find("unknown preset") != std::string::npos);
    CHECK(run_cli("mdp --preset nonesuch --out " + (dir / "o").string(), dir / "log") == 2);
    CHECK(run_cli("granger --actual x.csv --equilibrium y.csv --bucket weekly --out " + (dir / "o").string(), dir / "log") == 2);

    {
        std::ofstream f(dir / "cfg.json");
        f << R"({"chain_a": "a.csv", "colour": 3})";
    }
    CHECK(run_cli("equilibrium --config " + (dir / "cfg.json").string(), dir / "log") == 2);
    CHECK(slurp(dir / "log").find("colour") != std::string::npos);

    {
        std::ofstream f(dir / "a.csv");
        f << "tau,w\n0,0.5\n";
    }
    CHECK(run_cli("metrics --actual " + (dir / "a.csv").string() + " --predicted " + (dir / "a.csv").string() + " --out " +
                      (dir / "o").string(),
                  dir / "log") == 2);
    CHECK(slurp(dir / "log").find("w_A") != std::string::npos);
}

TEST_CASE("mdp reports the concentration point") {
    const auto dir = scratch("cli-mdp");
    REQUIRE(run_cli("mdp --preset motivating --out " + (dir / "m").string(), dir / "log") == 0);
    CHECK(slurp(dir / "log").find("concentration: D_A=8 D_B=4") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "m" / "policy.csv"));
    CHECK(std::filesystem::exists(dir / "m" / "config.resolved.json"));
    REQUIRE(run_cli("mdp --preset equal --out " + (dir / "e").string(), dir / "log") == 0);
    CHECK(slurp(dir / "log").find("concentration: D_A=6 D_B=6") != std::string::npos);
}

TEST_CASE("simulate is reproducible from its seed") {
    const auto dir = scratch("cli-sim");
    const std::string args = "simulate --preset equal --horizon 2000 --seed 7 --emit-allocations --out ";
    REQUIRE(run_cli(args + (dir / "a").string(), dir / "log") == 0);
    REQUIRE(run_cli(args + (dir / "b").string(), dir / "log") == 0);
    const auto trace = slurp(dir / "a" / "trace.csv");
    CHECK(trace.size() > 100);
    CHECK(trace == slurp(dir / "b" / "trace.csv"));

    const auto a = (dir / "a").string();
    REQUIRE(run_cli("metrics --actual " + a + "/actual.csv --predicted " + a + "/actual.csv --out " + (dir / "m").string(),
                    dir / "log") == 0);
    CHECK(overall_rmse(dir / "m" / "metrics.txt") == 0.0);
    CHECK(slurp(dir / "log").find("all,0.0000,0.0000,0.0000,inf") != std::string::npos);
}

TEST_CASE("equilibrium on the bundled synthetic dataset") {
    const auto dir = scratch("cli-eq");
    REQUIRE(run_cli("equilibrium --config " + testing::data_dir() + "/synthetic/equilibrium.json --check-arbitrage --out " +
                        (dir / "o").string(),
                    dir / "log") == 0);
    const double rmse = overall_rmse(dir / "o" / "metrics.txt");
    MESSAGE("synthetic RMSE " << rmse);
    CHECK(rmse < 0.01);
    CHECK(std::filesystem::exists(dir / "o" / "arbitrage.csv"));
    const auto actual = powsec::csv::read_allocations(dir / "o" / "actual.csv");
    CHECK(actual.size() > 100);
}

TEST_CASE("oracle replay accepts a mined pair and rejects a tampered header") {
    const auto dir = scratch("cli-oracle");
    REQUIRE(run_cli("simulate --preset motivating --horizon 600 --emit-headers --out " + (dir / "s").string(), dir / "log") == 0);
    const auto a = (dir / "s" / "headers_a.jsonl").string(), b = (dir / "s" / "headers_b.jsonl").string();
    REQUIRE(run_cli("oracle-replay --headers-a " + a + " --headers-b " + b + " --query 5:5 --out " + (dir / "o").string(),
                    dir / "log") == 0);
    CHECK(slurp(dir / "log").find("P_B/P_A at (5, 5)") != std::string::npos);

    CHECK(run_cli("oracle-replay --headers-a " + a + " --headers-b " + b + " --query 5:999999 --out " + (dir / "o").string(),
                  dir / "log") == 1);

    auto headers = powsec::read_headers_jsonl(b);
    REQUIRE(headers.size() > 3);
    headers[2].nonce ^= 1;
    powsec::write_headers_jsonl(dir / "bad.jsonl", headers);
    CHECK(run_cli("oracle-replay --headers-a " + a + " --headers-b " + (dir / "bad.jsonl").string() + " --out " +
                      (dir / "o").string(),
                  dir / "log") == 1);
    const auto log = slurp(dir / "log");
    CHECK((log.find("BadPoW") != std::string::npos || log.find("BadLink") != std::string::npos));
}

TEST_CASE("granger marks constant input") {
    const auto dir = scratch("cli-granger");
    {
        std::ofstream f(dir / "flat.csv");
        f << "tau,w_A\n";
        for (int i = 0; i < 50; ++i) f << 1'700'000'000 + i * 3600 << ",0.4\n";
    }
    const auto flat = (dir / "flat.csv").string();
    CHECK(run_cli("granger --actual " + flat + " --equilibrium " + flat + " --out " + (dir / "o").string(), dir / "log") == 1);
    CHECK(slurp(dir / "log").find("no bucket") != std::string::npos);
}

TEST_CASE("spot-sim and future-demo run") {
    const auto dir = scratch("cli-contracts");
    REQUIRE(run_cli("spot-sim --epochs 5 --attack-epochs 10 --out " + (dir / "s").string(), dir / "log") == 0);
    CHECK(slurp(dir / "log").find("rational miner: 5/5") != std::string::npos);
    REQUIRE(run_cli("future-demo --out " + (dir / "f").string(), dir / "log") == 0);
    CHECK(slurp(dir / "log").find("payout ratio doubling/flat") != std::string::npos);
}
