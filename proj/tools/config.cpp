#include "config.hpp"

#include <cmath>
#include <fstream>

namespace powsec::cli {
namespace {

template <class T>
T get(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

std::string daa_to_string(const sim::DaaKind& d) {
    return d.type == sim::DaaKind::Type::PerBlock ? "per-block" : "window:" + std::to_string(d.n_blocks);
}

sim::DaaKind daa_from_string(const std::string& s) {
    if (s == "per-block") return sim::DaaKind::per_block();
    if (s.rfind("window:", 0) == 0) {
        try {
            return sim::DaaKind::window(std::stoi(s.substr(7)));
        } catch (const std::exception&) {
        }
    }
    throw UsageError("daa must be 'per-block' or 'window:<blocks>', got '" + s + "'");
}

json miner_to_json(const sim::MinerConfig& m) {
    json j = {{"id", m.id}, {"hash_rate", m.hash_rate}};
    if (const auto* g = std::get_if<sim::Greedy>(&m.strategy)) {
        j["strategy"] = "greedy";
        j["step_cap"] = g->step_cap;
    } else if (const auto* l = std::get_if<sim::Loyal>(&m.strategy)) {
        j["strategy"] = l->chain == 0 ? "loyal-a" : "loyal-b";
    } else {
        j["strategy"] = "fixed";
        j["w_A"] = std::get<sim::Fixed>(m.strategy).w_A;
    }
    if (m.initial_w_A) j["initial_w_A"] = *m.initial_w_A;
    return j;
}

sim::MinerConfig miner_from_json(const json& j, std::size_t index) {
    const std::string where = "miners[" + std::to_string(index) + "]";
    check_keys(j, {"id", "hash_rate", "strategy", "step_cap", "w_A", "initial_w_A"}, where);
    sim::MinerConfig m;
    m.id = get<std::string>(j, "id", "m" + std::to_string(index));
    m.hash_rate = get<double>(j, "hash_rate", 1.0);
    const auto strategy = get<std::string>(j, "strategy", "greedy");
    if (strategy == "greedy") m.strategy = sim::Greedy{get<double>(j, "step_cap", 0.002)};
    else if (strategy == "loyal-a") m.strategy = sim::Loyal{0};
    else if (strategy == "loyal-b") m.strategy = sim::Loyal{1};
    else if (strategy == "fixed") m.strategy = sim::Fixed{get<double>(j, "w_A", 0.5)};
    else throw UsageError(where + ": unknown strategy '" + strategy + "'");
    if (j.contains("initial_w_A")) m.initial_w_A = get<double>(j, "initial_w_A", 0.5);
    return m;
}

json prices_to_json(const sim::PricePath& p) {
    using K = sim::PricePath::Kind;
    switch (p.kind) {
        case K::Constant: return {{"kind", "constant"}, {"P_A", p.P_A}, {"P_B", p.P_B}};
        case K::RandomWalk:
            return {{"kind", "random_walk"}, {"P_A", p.P_A}, {"P_B", p.P_B}, {"drift", p.drift},
                    {"volatility", p.volatility}, {"step_seconds", p.step_seconds}};
        case K::Scripted: {
            json steps = json::array();
            for (const auto& s : p.steps) steps.push_back({s.time, s.P_A, s.P_B});
            return {{"kind", "scripted"}, {"steps", steps}};
        }
    }
    return {};
}

sim::PricePath prices_from_json(const json& j, const std::filesystem::path& dir) {
    check_keys(j, {"kind", "P_A", "P_B", "drift", "volatility", "step_seconds", "steps", "path"}, "prices");
    const auto kind = get<std::string>(j, "kind", "constant");
    if (kind == "constant") return sim::PricePath::constant(get<double>(j, "P_A", 1.0), get<double>(j, "P_B", 1.0));
    if (kind == "random_walk")
        return sim::PricePath::random_walk(get<double>(j, "P_A", 1.0), get<double>(j, "P_B", 1.0), get<double>(j, "drift", 0.0),
                                           get<double>(j, "volatility", 0.0), get<double>(j, "step_seconds", 3600.0));
    if (kind == "scripted") {
        std::vector<sim::PriceStep> steps;
        for (const auto& s : j.at("steps")) {
            if (!s.is_array() || s.size() != 3) throw UsageError("prices.steps entries must be [time, P_A, P_B]");
            steps.push_back({s[0].get<double>(), s[1].get<double>(), s[2].get<double>()});
        }
        return sim::PricePath::scripted(std::move(steps));
    }
    if (kind == "csv") {
        std::filesystem::path p = get<std::string>(j, "path", "");
        return sim::PricePath::from_csv(p.is_relative() ? dir / p : p);
    }
    throw UsageError("prices.kind must be constant, random_walk, scripted or csv");
}

}  // namespace

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw UsageError(where + ": unknown key '" + key + "'");
    }
}

json to_json(const sim::SimConfig& c) {
    json chains = json::array();
    for (const auto& ch : c.chains)
        chains.push_back({{"id", ch.params.chain_id}, {"T", ch.params.T}, {"k", ch.params.k}, {"pow_alg", ch.params.pow_alg},
                          {"initial_S", ch.initial_S}, {"daa", daa_to_string(ch.daa)}, {"clamp", ch.clamp}});
    json miners = json::array();
    for (const auto& m : c.miners) miners.push_back(miner_to_json(m));
    return {{"chains", chains},          {"miners", miners},
            {"prices", prices_to_json(c.prices)}, {"horizon_blocks", c.horizon_blocks},
            {"sample_interval", c.sample_interval}, {"seed", c.seed},
            {"epoch", c.epoch}};
}

sim::SimConfig sim_config_from_json(const json& j, sim::SimConfig base, const std::filesystem::path& dir) {
    check_keys(j, {"chains", "miners", "prices", "horizon_blocks", "sample_interval", "seed", "epoch"}, "simulation config");
    if (j.contains("chains")) {
        const auto& chains = j.at("chains");
        if (!chains.is_array() || chains.size() != 2) throw UsageError("chains must be an array of two objects");
        for (std::size_t x = 0; x < 2; ++x) {
            const auto& cj = chains[x];
            check_keys(cj, {"id", "T", "k", "pow_alg", "initial_S", "daa", "clamp"}, "chains[" + std::to_string(x) + "]");
            auto& ch = base.chains[x];
            ch.params.chain_id = get<std::string>(cj, "id", ch.params.chain_id);
            ch.params.T = get<double>(cj, "T", ch.params.T);
            ch.params.k = get<double>(cj, "k", ch.params.k);
            ch.params.pow_alg = get<std::string>(cj, "pow_alg", ch.params.pow_alg);
            ch.initial_S = get<double>(cj, "initial_S", ch.initial_S);
            if (cj.contains("daa")) ch.daa = daa_from_string(get<std::string>(cj, "daa", ""));
            ch.clamp = get<double>(cj, "clamp", ch.clamp);
        }
    }
    if (j.contains("miners")) {
        base.miners.clear();
        std::size_t i = 0;
        for (const auto& m : j.at("miners")) base.miners.push_back(miner_from_json(m, i++));
    }
    if (j.contains("prices")) base.prices = prices_from_json(j.at("prices"), dir);
    base.horizon_blocks = get<std::int64_t>(j, "horizon_blocks", base.horizon_blocks);
    base.sample_interval = get<double>(j, "sample_interval", base.sample_interval);
    base.seed = get<std::uint64_t>(j, "seed", base.seed);
    base.epoch = get<std::int64_t>(j, "epoch", base.epoch);
    return base;
}

json to_json(const mdp::MdpConfig& c) {
    return {{"H", c.H},
            {"T", c.T},
            {"reward_A", c.reward_A},
            {"reward_B", c.reward_B},
            {"difficulty_grid", c.difficulty_grid},
            {"action_grid", c.action_grid},
            {"discount", c.discount},
            {"max_extra_blocks", c.max_extra_blocks},
            {"tail", c.tail == mdp::TailRate::HashRatio ? "hash-ratio" : "fixed"},
            {"tail_rate", c.tail_rate}};
}

mdp::MdpConfig mdp_config_from_json(const json& j, mdp::MdpConfig base) {
    check_keys(j, {"H", "T", "reward_A", "reward_B", "difficulty_grid", "action_grid", "difficulty_step", "action_step",
                   "discount", "max_extra_blocks", "tail", "tail_rate"},
               "mdp config");
    base.H = get<double>(j, "H", base.H);
    base.T = get<double>(j, "T", base.T);
    base.reward_A = get<double>(j, "reward_A", base.reward_A);
    base.reward_B = get<double>(j, "reward_B", base.reward_B);
    base.discount = get<double>(j, "discount", base.discount);
    base.max_extra_blocks = get<int>(j, "max_extra_blocks", base.max_extra_blocks);
    base.tail_rate = get<double>(j, "tail_rate", base.tail_rate);
    if (j.contains("tail")) {
        const auto t = get<std::string>(j, "tail", "");
        if (t == "hash-ratio") base.tail = mdp::TailRate::HashRatio;
        else if (t == "fixed") base.tail = mdp::TailRate::Fixed;
        else throw UsageError("tail must be 'hash-ratio' or 'fixed'");
    }
    const double total = base.H * base.T;
    if (j.contains("difficulty_step")) base.difficulty_grid = grid(get<double>(j, "difficulty_step", 1.0), total, get<double>(j, "difficulty_step", 1.0));
    if (j.contains("action_step")) base.action_grid = grid(0.0, base.H, get<double>(j, "action_step", 1.0));
    base.difficulty_grid = get<std::vector<double>>(j, "difficulty_grid", base.difficulty_grid);
    base.action_grid = get<std::vector<double>>(j, "action_grid", base.action_grid);
    return base;
}

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw UsageError("grid needs step > 0 and hi >= lo");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

mdp::MdpConfig mdp_preset(const std::string& name) {
    if (name == "motivating") return mdp::MdpConfig::motivating();
    if (name == "equal") return mdp::MdpConfig::with_rewards(1.0, 1.0);
    if (name == "ratio-3-1") return mdp::MdpConfig::with_rewards(3.0, 1.0);
    if (name == "ratio-5-1") return mdp::MdpConfig::with_rewards(5.0, 1.0);
    if (name == "ratio-1-2") return mdp::MdpConfig::with_rewards(1.0, 2.0);
    throw UsageError("unknown mdp preset '" + name + "' (motivating, equal, ratio-3-1, ratio-5-1, ratio-1-2)");
}

}  // namespace powsec::cli
