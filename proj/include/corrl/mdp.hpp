#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "corrl/adversary.hpp"
#include "corrl/errors.hpp"
#include "corrl/rng.hpp"

namespace corrl {

/// Finite-horizon tabular MDP with stage-indexed transitions and known,
/// normalized rewards (every reachable trajectory's reward sum is in [0,1]).
struct EpisodicMdp {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    /// transitions[h][x*A + a] is a probability row over next states.
    std::vector<std::vector<std::vector<double>>> transitions;
    /// rewards[h][x*A + a]
    std::vector<std::vector<double>> rewards;
    int initial_state = 0;
    /// Optional per-episode initial-state distribution; empty means the
    /// fixed initial_state is used.
    std::vector<double> initial_dist;

    int sa(int x, int a) const { return x * num_actions + a; }
    const std::vector<double>& row(int h, int x, int a) const {
        return transitions[h][sa(x, a)];
    }
    double reward(int h, int x, int a) const { return rewards[h][sa(x, a)]; }

    /// Throws on malformed shapes, non-stochastic rows, probabilities outside
    /// [0,1], or reachable reward sums outside [0,1].
    void validate() const;
};

/// Deterministic Markov policy: actions[h][x].
struct Policy {
    std::vector<std::vector<int>> actions;
};

/// Stochastic Markov policy (data-collection only): probs[h][x] is a row
/// over actions.
struct StochasticPolicy {
    std::vector<std::vector<std::vector<double>>> probs;
};

struct Step {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
};

struct Trajectory {
    std::vector<Step> steps;
    long episode_index = 0;
};

/// q[h][x*A+a] for h in [0,H); v[h][x] for h in [0,H], v[H] = 0.
struct ValueTables {
    std::vector<std::vector<double>> q;
    std::vector<std::vector<double>> v;
};

/// Finite list of candidate transition models sharing (S, A, H, r) and
/// per-row supports, together with the index of the true model.
struct ModelClass {
    std::vector<EpisodicMdp> models;
    int true_index = 0;
    double ratio_bound = 1.0;

    const EpisodicMdp& true_model() const { return models[true_index]; }
    int size() const { return static_cast<int>(models.size()); }

    /// Shared dimensions/rewards/supports; throws SupportMismatch or
    /// DimensionMismatch. Does not recompute ratio_bound.
    void validate() const;
};

/// Exact backward induction. The greedy overload maximizes over actions;
/// the policy overload evaluates the given policy.
ValueTables value_functions(const EpisodicMdp& model);
ValueTables value_functions(const EpisodicMdp& model, const Policy& policy);

/// Greedy policy of the model's optimal Q, ties to the lowest action index.
Policy greedy_policy(const EpisodicMdp& model);
Policy greedy_policy(const EpisodicMdp& model, const ValueTables& values);

/// E^M[V_M^{h+1} | x,a] - E^*[V_M^{h+1} | x,a] with V_M the greedy value of
/// `model`. The overload taking precomputed greedy values avoids the DP.
double bellman_error(const EpisodicMdp& model, const EpisodicMdp& true_model,
                     int h, int x, int a);
double bellman_error(const EpisodicMdp& model, const EpisodicMdp& true_model,
                     const ValueTables& model_values, int h, int x, int a);

/// Stage-wise state-action occupancy of a policy under a model, started
/// from the model's initial state/distribution: mu[h][x*A+a].
std::vector<std::vector<double>> occupancy(const EpisodicMdp& model,
                                           const Policy& policy);
std::vector<std::vector<double>> occupancy(const EpisodicMdp& model,
                                           const StochasticPolicy& policy);

/// Value of a policy at the instance's initial state (expectation under the
/// initial distribution when one is declared).
double initial_value(const EpisodicMdp& model, const ValueTables& values);

struct SimCallbacks {
    /// Called once per stage with the true and emitted rows and the computed
    /// corruption magnitude.
    std::function<void(long t, int h, const std::vector<double>& true_row,
                       const std::vector<double>& corrupted_row, double c)>
        on_corruption;
};

struct EpisodeResult {
    Trajectory trajectory;
    std::vector<double> corruption; // c_t^h per stage
};

/// Roll one episode of `policy` through the true model with the adversary
/// between the agent and the sampler. Per-stage randomness comes from
/// Rng::stream(root_seed, t, h+1); the initial-state draw (when the instance
/// declares a distribution) uses stage 0. `forced_initial` >= 0 overrides the
/// initial state (used when the caller already drew it).
EpisodeResult simulate_episode(const EpisodicMdp& true_model,
                               const Policy& policy, Adversary& adversary,
                               uint64_t root_seed, long t,
                               SimCallbacks* callbacks = nullptr,
                               int forced_initial = -1);
EpisodeResult simulate_episode(const EpisodicMdp& true_model,
                               const StochasticPolicy& policy,
                               Adversary& adversary, uint64_t root_seed, long t,
                               SimCallbacks* callbacks = nullptr,
                               int forced_initial = -1);

/// Draw the episode's initial state the same way simulate_episode would.
int draw_initial_state(const EpisodicMdp& model, uint64_t root_seed, long t);

} // namespace corrl
