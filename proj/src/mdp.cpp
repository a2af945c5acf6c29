#include "powsec/mdp.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "powsec/error.hpp"

namespace powsec::mdp {

void MdpConfig::validate() const {
    if (!(H > 0.0) || !(T > 0.0)) throw Error("mdp: H and T must be > 0");
    if (!(reward_A >= 0.0) || !(reward_B >= 0.0)) throw Error("mdp: rewards must be >= 0");
    if (difficulty_grid.empty() || action_grid.empty()) throw Error("mdp: empty grid");
    if (!std::is_sorted(difficulty_grid.begin(), difficulty_grid.end()) ||
        std::adjacent_find(difficulty_grid.begin(), difficulty_grid.end()) != difficulty_grid.end())
        throw Error("mdp: difficulty grid must be strictly increasing");
    if (!(difficulty_grid.front() > 0.0)) throw Error("mdp: difficulties must be > 0");
    for (double a : action_grid)
        if (!(a >= 0.0 && a <= H)) throw Error("mdp: actions must lie in [0, H]");
    if (!(discount > 0.0 && discount < 1.0)) throw Error("mdp: discount must lie in (0,1)");
    if (max_extra_blocks < 0) throw Error("mdp: max_extra_blocks must be >= 0");
    if (tail == TailRate::Fixed && !(tail_rate > 0.0)) throw Error("mdp: tail rate must be > 0");
}

MdpConfig MdpConfig::motivating() { return with_rewards(2.0, 1.0); }

MdpConfig MdpConfig::with_rewards(double reward_A, double reward_B) {
    MdpConfig c;
    c.reward_A = reward_A;
    c.reward_B = reward_B;
    for (int d = 1; d <= 12; ++d) c.difficulty_grid.push_back(d);
    for (int a = 0; a <= 6; ++a) c.action_grid.push_back(a);
    return c;
}

double block_probability(double D, double x) {
    if (!(D > 0.0)) throw Error("block_probability: D must be > 0");
    if (!(x >= 0.0)) throw Error("block_probability: x must be >= 0");
    if (x == 0.0) return 0.0;
    return -std::expm1(-x / D);
}

double block_count(double D, double x, int max_extra, TailRate tail, double tail_rate) {
    if (!(D > 0.0)) throw Error("block_count: D must be > 0");
    if (!(x > 0.0)) throw Error("block_count: x must be > 0");
    const double lambda = x / D;
    const double rate = tail == TailRate::HashRatio ? lambda : tail_rate;

    // sum_{i<=max_extra} i * Poisson(i; mu)
    const auto truncated_mean = [max_extra](double mu) {
        double pmf = std::exp(-mu);
        double s = 0.0;
        for (int i = 1; i <= max_extra; ++i) {
            pmf *= mu / i;
            s += i * pmf;
        }
        return s;
    };
    const auto integrand = [&](double t) { return lambda * std::exp(-lambda * t) * truncated_mean((1.0 - t) * rate); };
    const double extra =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, 0.0, 1.0, 15, 1e-12);
    return 1.0 + extra / block_probability(D, x);
}

MdpModel::MdpModel(MdpConfig config) : config_(std::move(config)), grid_(config_.difficulty_grid.size()) {
    config_.validate();
    const auto& g = config_.difficulty_grid;
    const std::size_t n_act = actions();
    outcomes_.resize(states() * n_act);

    // Per-chain success probability and conditional block count depend only on
    // (difficulty index, hash), so cache them across the bit copies.
    struct ChainTerms {
        double p = 0.0;
        double c = 0.0;
    };
    const auto terms = [&](double D, double x) {
        if (x == 0.0) return ChainTerms{};
        return ChainTerms{block_probability(D, x),
                          block_count(D, x, config_.max_extra_blocks, config_.tail, config_.tail_rate)};
    };
    std::vector<ChainTerms> on_A(grid_ * n_act), on_B(grid_ * n_act);
    for (std::size_t i = 0; i < grid_; ++i)
        for (std::size_t k = 0; k < n_act; ++k) {
            const double a = config_.action_grid[k];
            on_A[i * n_act + k] = terms(g[i], a);
            on_B[i * n_act + k] = terms(g[i], config_.H - a);
        }

    for (std::size_t s = 0; s < states(); ++s) {
        const MdpState st = state(s);
        for (std::size_t k = 0; k < n_act; ++k) {
            const double a = config_.action_grid[k];
            const double b = config_.H - a;
            const ChainTerms ta = on_A[st.i_A * n_act + k];
            const ChainTerms tb = on_B[st.i_B * n_act + k];
            const std::size_t next_A = a > 0.0 ? snap(config_.T * a) : st.i_A;
            const std::size_t next_B = b > 0.0 ? snap(config_.T * b) : st.i_B;
            const double r_A = config_.reward_A * ta.c;
            const double r_B = config_.reward_B * tb.c;

            std::array<Outcome, 4> o;
            o[BothSuccess] = {index({next_A, next_B, 1 - st.beta_A, 1 - st.beta_B}), ta.p * tb.p, r_A + r_B};
            o[ASuccess] = {index({next_A, st.i_B, 1 - st.beta_A, st.beta_B}), ta.p * (1.0 - tb.p), r_A};
            o[BSuccess] = {index({st.i_A, next_B, st.beta_A, 1 - st.beta_B}), (1.0 - ta.p) * tb.p, r_B};
            o[NoneSuccess] = {s, (1.0 - ta.p) * (1.0 - tb.p), 0.0};
            outcomes_[s * n_act + k] = o;

            double expected = 0.0;
            std::array<double, 4> p{};
            std::array<std::int32_t, 4> nx{};
            for (std::size_t c = 0; c < 4; ++c) {
                expected += o[c].prob * o[c].reward;
                p[c] = o[c].prob;
                nx[c] = static_cast<std::int32_t>(o[c].next);
            }
            batch_.push(expected, p, nx);
        }
    }
}

std::size_t MdpModel::index(const MdpState& s) const noexcept {
    return ((s.i_A * grid_ + s.i_B) * 2 + static_cast<std::size_t>(s.beta_A)) * 2 + static_cast<std::size_t>(s.beta_B);
}

MdpState MdpModel::state(std::size_t index) const noexcept {
    MdpState s;
    s.beta_B = static_cast<int>(index % 2);
    index /= 2;
    s.beta_A = static_cast<int>(index % 2);
    index /= 2;
    s.i_B = index % grid_;
    s.i_A = index / grid_;
    return s;
}

std::size_t MdpModel::snap(double v) const {
    const auto& g = config_.difficulty_grid;
    std::size_t best = 0;
    for (std::size_t i = 1; i < g.size(); ++i)
        if (std::abs(g[i] - v) < std::abs(g[best] - v)) best = i;
    return best;
}

MdpModel build_mdp(const MdpConfig& config) { return MdpModel(config); }

Policy solve_value_iteration(const MdpModel& model, double tol, int max_iters, kernels::Isa isa) {
    const std::size_t n_states = model.states();
    const std::size_t n_act = model.actions();
    const double gamma = model.config().discount;
    std::vector<double> v(n_states, 0.0), next(n_states);
    std::vector<double> q(model.batch().size());

    Policy pol;
    double residual = 0.0;
    int it = 0;
    do {
        if (it >= max_iters) {
            std::ostringstream os;
            os << "value iteration did not converge in " << max_iters << " sweeps (residual " << residual << ")";
            throw Error(os.str());
        }
        kernels::bellman_q(isa, model.batch(), v, gamma, q);
        residual = 0.0;
        for (std::size_t s = 0; s < n_states; ++s) {
            const double* row = q.data() + s * n_act;
            next[s] = *std::max_element(row, row + n_act);
            residual = std::max(residual, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        pol.residuals.push_back(residual);
        ++it;
    } while (residual >= tol);

    // Final greedy policy against the converged values.
    kernels::bellman_q(isa, model.batch(), v, gamma, q);
    const std::size_t grid = model.config().difficulty_grid.size();
    pol.grid = grid;
    pol.difficulty_grid = model.config().difficulty_grid;
    pol.action.resize(grid * grid);
    pol.action_index.resize(grid * grid);
    for (std::size_t i = 0; i < grid; ++i)
        for (std::size_t j = 0; j < grid; ++j) {
            const std::size_t s = model.index({i, j, 0, 0});
            const double* row = q.data() + s * n_act;
            const double best = *std::max_element(row, row + n_act);
            const double slack = 1e-12 * std::max(1.0, std::abs(best));
            std::size_t k_best = 0;
            for (std::size_t k = 0; k < n_act; ++k) {
                const double a = model.config().action_grid[k];
                const double cur = model.config().action_grid[k_best];
                if (row[k] >= best - slack && (row[k_best] < best - slack || a < cur)) k_best = k;
            }
            pol.action_index[i * grid + j] = k_best;
            pol.action[i * grid + j] = model.config().action_grid[k_best];
        }
    pol.value = std::move(v);
    pol.iterations = it;
    return pol;
}

std::vector<std::pair<double, double>> stationary_states(const Policy& policy, const MdpModel& model) {
    const auto& cfg = model.config();
    const auto& g = cfg.difficulty_grid;
    const double diag = cfg.H * cfg.T;
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (std::abs(g[i] + g[j] - diag) > 1e-9 * diag) continue;
            const double a = policy.action_at(i, j);
            const double b = cfg.H - a;
            if (a <= 0.0 || b <= 0.0) continue;
            if (model.snap(cfg.T * a) == i && model.snap(cfg.T * b) == j) out.emplace_back(g[i], g[j]);
        }
    return out;
}

std::pair<double, double> concentration_point(const Policy& policy, const MdpModel& model) {
    const auto pts = stationary_states(policy, model);
    if (pts.size() == 1) return pts.front();
    std::ostringstream os;
    if (pts.empty()) {
        os << "no stationary state on the diagonal D_A + D_B = " << model.config().H * model.config().T
           << "; the grids may be too coarse";
    } else {
        os << "multiple stationary states:";
        for (const auto& [a, b] : pts) os << " (" << a << ", " << b << ")";
    }
    throw Error(os.str());
}

}  // namespace powsec::mdp
