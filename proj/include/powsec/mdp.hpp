#pragma once

// Single-miner hash allocation MDP over difficulty pairs. Each step is one
// second; a chain that mines at least one block retargets its difficulty to
// T times the hash applied to it.

#include <cstdint>
#include <utility>
#include <vector>

#include "powsec/kernels.hpp"

namespace powsec::mdp {

/// Rate of the Poisson process for blocks after the first one in a step.
enum class TailRate {
    HashRatio,  ///< x / D, the same rate as the first block
    Fixed,      ///< a constant rate (e.g. 1/T once the DAA has caught up)
};

struct MdpConfig {
    double H = 6.0;  ///< hashes/sec
    double T = 2.0;  ///< target block time, sec
    double reward_A = 2.0;
    double reward_B = 1.0;
    std::vector<double> difficulty_grid;
    std::vector<double> action_grid;  ///< hash applied to A; B gets H - a
    double discount = 0.97;
    int max_extra_blocks = 10;
    TailRate tail = TailRate::HashRatio;
    double tail_rate = 0.5;  ///< used when tail == Fixed

    void validate() const;

    /// H = 6, T = 2, rewards 2:1, difficulties 1..12, integer actions 0..6.
    static MdpConfig motivating();
    /// Same instance with the given rewards.
    static MdpConfig with_rewards(double reward_A, double reward_B);
};

/// Probability that at least one block is found within one second.
double block_probability(double D, double x);

/// Expected number of blocks in one second given at least one is found.
double block_count(double D, double x, int max_extra = 10, TailRate tail = TailRate::HashRatio,
                   double tail_rate = 0.5);

struct MdpState {
    std::size_t i_A = 0;  ///< index into difficulty_grid
    std::size_t i_B = 0;
    int beta_A = 0;
    int beta_B = 0;

    friend bool operator==(const MdpState&, const MdpState&) = default;
};

/// One of the four outcomes of a (state, action) pair.
struct Outcome {
    std::size_t next = 0;
    double prob = 0.0;
    double reward = 0.0;
};

enum Case : std::size_t { BothSuccess = 0, ASuccess = 1, BSuccess = 2, NoneSuccess = 3 };

class MdpModel {
  public:
    explicit MdpModel(MdpConfig config);

    const MdpConfig& config() const noexcept { return config_; }
    std::size_t states() const noexcept { return 4 * grid_ * grid_; }
    std::size_t actions() const noexcept { return config_.action_grid.size(); }

    std::size_t index(const MdpState& s) const noexcept;
    MdpState state(std::size_t index) const noexcept;

    /// Grid index nearest to v; ties go to the smaller grid value.
    std::size_t snap(double v) const;

    /// Outcomes indexed by Case.
    const std::array<Outcome, 4>& outcomes(std::size_t state, std::size_t action) const {
        return outcomes_[state * actions() + action];
    }
    /// Expected immediate reward.
    double expected_reward(std::size_t state, std::size_t action) const {
        return batch_.reward[state * actions() + action];
    }

    const kernels::BellmanBatch& batch() const noexcept { return batch_; }

  private:
    MdpConfig config_;
    std::size_t grid_;
    std::vector<std::array<Outcome, 4>> outcomes_;
    kernels::BellmanBatch batch_;
};

MdpModel build_mdp(const MdpConfig& config);

struct Policy {
    std::size_t grid = 0;
    std::vector<double> difficulty_grid;
    std::vector<double> action;           ///< per (i_A, i_B), bits collapsed
    std::vector<std::size_t> action_index;
    std::vector<double> value;            ///< per full state, MdpModel::index order
    std::vector<double> residuals;        ///< sup-norm change per sweep
    int iterations = 0;

    double action_at(std::size_t i_A, std::size_t i_B) const { return action[i_A * grid + i_B]; }
    std::size_t action_index_at(std::size_t i_A, std::size_t i_B) const { return action_index[i_A * grid + i_B]; }
};

/// Jacobi value iteration until the sup-norm change is below tol. The greedy
/// policy breaks near-ties (relative 1e-12) toward the smallest action.
Policy solve_value_iteration(const MdpModel& model, double tol = 1e-10, int max_iters = 200000,
                             kernels::Isa isa = kernels::active_isa());

/// Diagonal states (D_A + D_B = H T) whose optimal action retargets both
/// chains to their current difficulty.
std::vector<std::pair<double, double>> stationary_states(const Policy& policy, const MdpModel& model);

/// The unique stationary state; throws listing the candidates otherwise.
std::pair<double, double> concentration_point(const Policy& policy, const MdpModel& model);

}  // namespace powsec::mdp
