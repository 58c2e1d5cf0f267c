#pragma once

#include <cstdint>
#include <vector>

#include "corrl/mdp.hpp"

namespace corrl {

/// Canonical state layout of the 4-state chain instances.
inline constexpr int kChainStart = 0;
inline constexpr int kChainDecision = 1; // x_1
inline constexpr int kChainGoal = 2;     // x_2, pays 1 at the last stage
inline constexpr int kChainSink = 3;     // x_3

/// 4-state chain with d actions: from the start state, move to the decision
/// state w.p. 1/H (any action); from the decision state, reach the goal w.p.
/// 3/4 under the stage's optimal action and 1/4 otherwise; goal and sink
/// absorb. Reward 1 in the goal state at the final stage. Optimal actions
/// are drawn per stage from the seed.
struct OnlineHardInstance {
    EpisodicMdp mdp;
    std::vector<int> optimal_actions; // per stage
    int d = 0;
};

OnlineHardInstance make_online_hard_instance(int d, int horizon, uint64_t seed);

/// Same chain with goal probabilities 1/2+eta (optimal) vs 1/2-eta, optimal
/// actions drawn from the first d-1 actions, and the logging behavior policy
/// that plays the last action w.p. 1-epsilon and explores the first d-1
/// uniformly otherwise.
struct OfflineHardInstance {
    EpisodicMdp mdp;
    StochasticPolicy behavior;
    std::vector<int> optimal_actions;
    int d = 0;
    double eta = 0.0;
    double epsilon = 0.0;
};

OfflineHardInstance make_offline_hard_instance(int d, int horizon, double eta,
                                               double epsilon, uint64_t seed);

/// eta = C / (96 e Cov T): the corruption-per-coverage parameterization of
/// the offline chain.
double offline_eta_for(double c_level, double coverage, double num_episodes);

/// Uniform-over-actions behavior policy for a model's shape.
StochasticPolicy uniform_behavior(const EpisodicMdp& model);

/// Perturbations-of-true model class: count-1 multiplicative log-uniform
/// perturbations of the true rows (scale `magnitude`), clamped to >= p_min on
/// the shared support and renormalized. True model at index 0.
ModelClass make_model_class_random(const EpisodicMdp& true_model, int count,
                                   double p_min, uint64_t seed,
                                   double magnitude = 0.5);

/// Structured classes for the chain instances: one model per assignment of
/// per-stage optimal actions over the stages where the decision matters
/// (2..H-1), capped with the true model always included at index 0.
ModelClass make_structured_class_online(const OnlineHardInstance& instance,
                                        int cap);
ModelClass make_structured_class_offline(const OfflineHardInstance& instance,
                                         int cap);

/// Random dense-support instance with rewards scaled so the best reachable
/// trajectory sum lands in [0.5, 1]. Used by tests and `measure`.
EpisodicMdp make_random_mdp(int num_states, int num_actions, int horizon,
                            uint64_t seed, double p_min = 1e-3);

/// Clamp on-support entries to >= p_min and renormalize, keeping the support
/// exactly; entries off `support` stay zero. Pinned-mass projection, so the
/// clamp holds after normalization.
void clamp_renormalize(std::vector<double>& row,
                       const std::vector<char>& support, double p_min);

} // namespace corrl
