#include "corrl/instances.hpp"

#include <cmath>

#include "corrl/divergence.hpp"

namespace corrl {

namespace {

EpisodicMdp chain_mdp(int d, int horizon, double p_goal_opt, double p_goal_sub,
                      const std::vector<int>& optimal_actions) {
    EpisodicMdp mdp;
    mdp.num_states = 4;
    mdp.num_actions = d;
    mdp.horizon = horizon;
    mdp.initial_state = kChainStart;
    mdp.transitions.assign(horizon,
                           std::vector<std::vector<double>>(4 * d,
                                                            std::vector<double>(4, 0.0)));
    mdp.rewards.assign(horizon, std::vector<double>(4 * d, 0.0));
    const double move = 1.0 / horizon;
    for (int h = 0; h < horizon; ++h) {
        for (int a = 0; a < d; ++a) {
            auto& from_start = mdp.transitions[h][mdp.sa(kChainStart, a)];
            from_start[kChainStart] = 1.0 - move;
            from_start[kChainDecision] = move;
            auto& from_decision = mdp.transitions[h][mdp.sa(kChainDecision, a)];
            const double p_goal = a == optimal_actions[h] ? p_goal_opt : p_goal_sub;
            from_decision[kChainGoal] = p_goal;
            from_decision[kChainSink] = 1.0 - p_goal;
            mdp.transitions[h][mdp.sa(kChainGoal, a)][kChainGoal] = 1.0;
            mdp.transitions[h][mdp.sa(kChainSink, a)][kChainSink] = 1.0;
        }
    }
    for (int a = 0; a < d; ++a)
        mdp.rewards[horizon - 1][mdp.sa(kChainGoal, a)] = 1.0;
    return mdp;
}

} // namespace

OnlineHardInstance make_online_hard_instance(int d, int horizon, uint64_t seed) {
    if (d < 2 || horizon < 3)
        throw Error("online hard instance needs d >= 2 and H >= 3");
    Rng rng(seed);
    OnlineHardInstance instance;
    instance.d = d;
    instance.optimal_actions.resize(horizon);
    for (int h = 0; h < horizon; ++h) instance.optimal_actions[h] = rng.uniform_int(d);
    instance.mdp = chain_mdp(d, horizon, 0.75, 0.25, instance.optimal_actions);
    instance.mdp.validate();
    return instance;
}

OfflineHardInstance make_offline_hard_instance(int d, int horizon, double eta,
                                               double epsilon, uint64_t seed) {
    if (d <= 3 || horizon <= 2)
        throw Error("offline hard instance needs d > 3 and H > 2");
    if (!(eta > 0.0 && eta < 0.5))
        throw Error("offline hard instance needs eta in (0, 1/2)");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw Error("offline hard instance needs epsilon in (0, 1]");
    Rng rng(seed);
    OfflineHardInstance instance;
    instance.d = d;
    instance.eta = eta;
    instance.epsilon = epsilon;
    instance.optimal_actions.resize(horizon);
    for (int h = 0; h < horizon; ++h)
        instance.optimal_actions[h] = rng.uniform_int(d - 1);
    instance.mdp =
        chain_mdp(d, horizon, 0.5 + eta, 0.5 - eta, instance.optimal_actions);
    instance.mdp.validate();

    // Logging policy: the last action with probability 1-epsilon, otherwise
    // uniform over the d-1 candidate-optimal actions.
    std::vector<double> action_row(d, epsilon / (d - 1));
    action_row[d - 1] = 1.0 - epsilon;
    instance.behavior.probs.assign(
        horizon, std::vector<std::vector<double>>(4, action_row));
    return instance;
}

double offline_eta_for(double c_level, double coverage, double num_episodes) {
    return c_level / (96.0 * std::exp(1.0) * coverage * num_episodes);
}

StochasticPolicy uniform_behavior(const EpisodicMdp& model) {
    StochasticPolicy behavior;
    std::vector<double> row(model.num_actions, 1.0 / model.num_actions);
    behavior.probs.assign(
        model.horizon,
        std::vector<std::vector<double>>(model.num_states, row));
    return behavior;
}

void clamp_renormalize(std::vector<double>& row, const std::vector<char>& support,
                       double p_min) {
    int n_support = 0;
    for (size_t i = 0; i < row.size(); ++i) {
        if (!support[i]) {
            row[i] = 0.0;
            continue;
        }
        ++n_support;
    }
    if (n_support * p_min > 1.0)
        throw Error("clamp_renormalize: p_min too large for the support");

    // Pinned-mass projection: entries that would fall below p_min are pinned
    // there and the remaining mass is rescaled, repeated until stable. A
    // single clamp-then-divide pass can land entries back under p_min.
    std::vector<char> pinned(row.size(), 0);
    while (true) {
        int n_pinned = 0;
        double free_mass = 0.0;
        for (size_t i = 0; i < row.size(); ++i) {
            if (!support[i]) continue;
            if (pinned[i])
                ++n_pinned;
            else
                free_mass += row[i];
        }
        if (n_pinned == n_support) break;
        const double target = 1.0 - p_min * n_pinned;
        const double scale = target / free_mass;
        bool changed = false;
        for (size_t i = 0; i < row.size(); ++i) {
            if (!support[i] || pinned[i]) continue;
            if (row[i] * scale < p_min) {
                pinned[i] = 1;
                changed = true;
            }
        }
        if (!changed) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (!support[i]) continue;
                row[i] = pinned[i] ? p_min : row[i] * scale;
            }
            return;
        }
    }
    for (size_t i = 0; i < row.size(); ++i)
        if (support[i]) row[i] = p_min; // fully pinned: uniform at the floor
}

ModelClass make_model_class_random(const EpisodicMdp& true_model, int count,
                                   double p_min, uint64_t seed, double magnitude) {
    if (count < 1) throw Error("make_model_class_random: count must be >= 1");
    ModelClass mc;
    mc.true_index = 0;
    mc.models.push_back(true_model);
    Rng rng(seed);
    for (int k = 1; k < count; ++k) {
        EpisodicMdp model = true_model;
        for (int h = 0; h < model.horizon; ++h) {
            for (int sa = 0; sa < model.num_states * model.num_actions; ++sa) {
                auto& row = model.transitions[h][sa];
                const auto& true_row = true_model.transitions[h][sa];
                std::vector<char> support(row.size(), 0);
                for (size_t y = 0; y < row.size(); ++y) {
                    support[y] = true_row[y] > 0.0;
                    if (support[y])
                        row[y] *= std::exp(magnitude * (2.0 * rng.uniform01() - 1.0));
                }
                clamp_renormalize(row, support, p_min);
            }
        }
        mc.models.push_back(std::move(model));
    }
    mc.ratio_bound = ratio_bound(mc);
    mc.validate();
    return mc;
}

namespace {

// Models are ordered lexicographically by assignment so the ordering leaks
// nothing about where the true model sits; tie-breaking rules stay blind to
// the answer. Under a cap that cuts the enumeration short, the true model
// replaces the last kept assignment.
ModelClass structured_chain_class(const EpisodicMdp& true_mdp,
                                  const std::vector<int>& optimal_actions,
                                  int n_choices, double p_goal_opt,
                                  double p_goal_sub, int cap) {
    if (cap < 1) throw Error("structured class: cap must be >= 1");
    const int H = true_mdp.horizon;
    const int n_free = H - 2; // stages 2..H-1 (1-based) carry the decision
    std::vector<int> true_assignment(optimal_actions.begin() + 1,
                                     optimal_actions.begin() + 1 + n_free);

    auto build = [&](const std::vector<int>& assignment) {
        EpisodicMdp model = true_mdp;
        for (int k = 0; k < n_free; ++k) {
            const int h = 1 + k;
            for (int a = 0; a < model.num_actions; ++a) {
                auto& row = model.transitions[h][model.sa(kChainDecision, a)];
                const double p_goal = a == assignment[k] ? p_goal_opt : p_goal_sub;
                row[kChainGoal] = p_goal;
                row[kChainSink] = 1.0 - p_goal;
            }
        }
        return model;
    };

    ModelClass mc;
    mc.true_index = -1;
    std::vector<int> assignment(n_free, 0);
    while (static_cast<int>(mc.models.size()) < cap) {
        if (assignment == true_assignment)
            mc.true_index = static_cast<int>(mc.models.size());
        mc.models.push_back(build(assignment));
        // next assignment, stage-major lexicographic
        int k = n_free - 1;
        while (k >= 0 && ++assignment[k] == n_choices) assignment[k--] = 0;
        if (k < 0) break;
    }
    if (mc.true_index < 0) {
        mc.models.back() = build(true_assignment);
        mc.true_index = static_cast<int>(mc.models.size()) - 1;
    }
    mc.ratio_bound = ratio_bound(mc);
    mc.validate();
    return mc;
}

} // namespace

ModelClass make_structured_class_online(const OnlineHardInstance& instance,
                                        int cap) {
    return structured_chain_class(instance.mdp, instance.optimal_actions,
                                  instance.d, 0.75, 0.25, cap);
}

ModelClass make_structured_class_offline(const OfflineHardInstance& instance,
                                         int cap) {
    return structured_chain_class(instance.mdp, instance.optimal_actions,
                                  instance.d - 1, 0.5 + instance.eta,
                                  0.5 - instance.eta, cap);
}

EpisodicMdp make_random_mdp(int num_states, int num_actions, int horizon,
                            uint64_t seed, double p_min) {
    EpisodicMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.horizon = horizon;
    mdp.initial_state = 0;
    const int n_sa = num_states * num_actions;
    mdp.transitions.assign(horizon, std::vector<std::vector<double>>(
                                        n_sa, std::vector<double>(num_states, 0.0)));
    mdp.rewards.assign(horizon, std::vector<double>(n_sa, 0.0));
    Rng rng(seed);
    const std::vector<char> full_support(num_states, 1);
    for (int h = 0; h < horizon; ++h) {
        for (int sa = 0; sa < n_sa; ++sa) {
            auto& row = mdp.transitions[h][sa];
            double sum = 0.0;
            for (int y = 0; y < num_states; ++y) {
                row[y] = -std::log(1.0 - rng.uniform01());
                sum += row[y];
            }
            for (int y = 0; y < num_states; ++y) row[y] /= sum;
            clamp_renormalize(row, full_support, p_min);
            mdp.rewards[h][sa] = rng.uniform01();
        }
    }
    // Scale rewards so the best reachable trajectory sum lands in [0.5, 1].
    std::vector<double> v(num_states, 0.0);
    for (int h = horizon - 1; h >= 0; --h) {
        std::vector<double> next = v;
        for (int x = 0; x < num_states; ++x) {
            double best = -1e300;
            for (int a = 0; a < num_actions; ++a) {
                double reach = 0.0;
                for (int y = 0; y < num_states; ++y)
                    reach = std::max(reach, next[y]);
                if (h == horizon - 1) reach = 0.0;
                best = std::max(best, mdp.rewards[h][mdp.sa(x, a)] + reach);
            }
            v[x] = best;
        }
    }
    const double target = 0.5 + 0.5 * rng.uniform01();
    const double scale = target / v[0];
    for (auto& stage : mdp.rewards)
        for (double& r : stage) r *= scale;
    mdp.validate();
    return mdp;
}

} // namespace corrl
